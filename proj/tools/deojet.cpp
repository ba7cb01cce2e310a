// deojet: identity-verification sweeps, evanescent-wave grid export and
// averaged-power computation for the differential energy operator families.
//
// Exit codes: 0 success, 1 residual/check failure, 2 argument error,
// 3 output I/O error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "deojet/verify.hpp"
#include "deojet/wavefield.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailedCases = 1;
constexpr int kExitBadArgs = 2;
constexpr int kExitIo = 3;

int write_output(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::cout << payload;
    return kExitOk;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    return kExitIo;
  }
  os << payload;
  if (!os) {
    std::cerr << "error: write to '" << path << "' failed\n";
    return kExitIo;
  }
  return kExitOk;
}

std::string human_table(const deojet::VerifyReport& rep) {
  std::ostringstream os;
  char buf[200];
  for (const auto& c : rep.cases) {
    std::snprintf(buf, sizeof(buf), "%-78s  %11.4e  %s\n", c.id.c_str(), c.residual, c.pass ? "pass" : "FAIL");
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "%zu cases, %zu passed, %zu failed, max residual %.4e (tol %.1e)\n", rep.total,
                rep.passed, rep.failed, rep.max_residual, rep.config.tol);
  os << buf;
  return os.str();
}

struct WaveArgs {
  deojet::EvanescentParams params;
  deojet::FieldSpec spec;
  double omega = std::nan("");
  std::string axis = "t";

  void resolve() {
    params.omega = std::isnan(omega) ? deojet::EvanescentParams::default_omega(params.k1, params.k2, params.c)
                                     : omega;
    if (axis != "t" && axis != "x") throw std::invalid_argument("--axis must be t or x");
    spec.axis = axis == "t" ? deojet::Axis::t : deojet::Axis::x;
    params.validate();
    spec.validate();
    if (params.k1 < 0.0)
      std::cerr << "warning: k1 = " << params.k1 << " < 0 gives a growing envelope exp(-k1 x)\n";
  }
};

void add_wave_params(CLI::App* cmd, WaveArgs& w) {
  cmd->add_option("--A", w.params.amplitude, "amplitude A (cm)")->capture_default_str();
  cmd->add_option("--k1", w.params.k1, "attenuation wavenumber k1 (cm^-1)")->capture_default_str();
  cmd->add_option("--k2", w.params.k2, "propagation wavenumber k2 (cm^-1)")->capture_default_str();
  cmd->add_option("--c", w.params.c, "wave speed c")->capture_default_str();
  cmd->add_option("--omega", w.omega, "angular frequency (default: c*sqrt(k2^2-k1^2))");
  cmd->add_option("--i", w.spec.i, "time-derivative order i")->capture_default_str();
  cmd->add_option("--n", w.spec.n, "field power n")->capture_default_str();
  cmd->add_option("--m", w.spec.m, "solution-set selector m (1: d^i u^n; m>=2: operator iterates)")
      ->capture_default_str();
  cmd->add_option("--axis", w.axis, "operator/derivative variable: t or x")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differential energy operators over exact jets: verification, wave grids, averaged power"};
  app.require_subcommand(1);

  // ---- verify ----
  deojet::VerifyConfig vc;
  std::string verify_out = "-";
  std::string verify_format = "json-report";
  std::string k_range = "-2:4";
  std::string convention = "order_one_plus";
  auto* verify = app.add_subcommand("verify", "run identity verification suites");
  verify->add_option("--suite", vc.suite,
                     "chainrule|square|cube|power|negative|eta|fit|prop2|membership|all")
      ->capture_default_str();
  verify->add_option("--p-max", vc.p_max, "max operator depth p")->capture_default_str();
  verify->add_option("--s-max", vc.s_max, "max derivative order s")->capture_default_str();
  verify->add_option("--n-max", vc.n_max, "max power n / L")->capture_default_str();
  verify->add_option("--k-range", k_range, "operator order range lo:hi")->capture_default_str();
  verify->add_option("--func", vc.funcs, "probe functions (exp:a | cos:w[:phi[:amp]] | gauss:sigma[:c] | poly:c0,c1,...)")
      ->capture_default_str();
  verify->add_option("--t0", vc.t0_points, "expansion points")->capture_default_str();
  verify->add_option("--tol", vc.tol, "pass/fail residual tolerance")->capture_default_str();
  verify->add_option("--seed", vc.seed, "seed for randomized antiderivative constants and draws")
      ->capture_default_str();
  verify->add_option("--jet-order", vc.jet_order, "jet truncation order")->capture_default_str();
  verify->add_option("--convention", convention, "inner recursion: order_one_plus|same_k")->capture_default_str();
  verify->add_flag("--deep-check", vc.deep_check, "re-expand power-ladder factors recursively");
  verify->add_option("-o,--out", verify_out, "output path ('-' for stdout)")->capture_default_str();
  verify->add_option("--format", verify_format, "json-report|csv|table")->capture_default_str();

  // ---- wave ----
  WaveArgs wave_args;
  deojet::GridSpec grid;
  std::string wave_out = "grid.csv";
  bool emit_gnuplot = false;
  auto* wave = app.add_subcommand("wave", "sample a field candidate over an (x,t) grid and write CSV");
  add_wave_params(wave, wave_args);
  wave->add_option("--x0", grid.x0, "grid x start")->capture_default_str();
  wave->add_option("--x1", grid.x1, "grid x end")->capture_default_str();
  wave->add_option("--t0", grid.t0, "grid t start")->capture_default_str();
  wave->add_option("--t1", grid.t1, "grid t end")->capture_default_str();
  wave->add_option("--nx", grid.nx, "grid points in x")->capture_default_str();
  wave->add_option("--nt", grid.nt, "grid points in t")->capture_default_str();
  wave->add_option("-o,--out", wave_out, "CSV output path")->capture_default_str();
  wave->add_flag("--emit-gnuplot", emit_gnuplot, "also write a companion gnuplot script (<out>.gp)");

  // ---- power ----
  WaveArgs power_args;
  power_args.spec.i = 0;
  power_args.spec.n = 1;
  double pa = 0.0, pb = 0.05, section_length = 1.0, period = 1.0, power_t0 = 0.0;
  int power_k = 0;
  int quad_nodes = 64, quad_panels = 4;
  auto* power = app.add_subcommand("power", "averaged power of a field candidate through a section");
  add_wave_params(power, power_args);
  power->add_option("--a", pa, "section start")->capture_default_str();
  power->add_option("--b", pb, "section end")->capture_default_str();
  power->add_option("--L", section_length, "section length factor L")->capture_default_str();
  power->add_option("--T", period, "period T")->capture_default_str();
  power->add_option("--k", power_k, "time-derivative order (alias of --i)")->capture_default_str();
  power->add_option("--t0-time", power_t0, "time slice t0")->capture_default_str();
  power->add_option("--quad-nodes", quad_nodes, "Gauss-Legendre nodes per panel")->capture_default_str();
  power->add_option("--quad-panels", quad_panels, "quadrature panels")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadArgs;
  }

  try {
    if (*verify) {
      if (std::sscanf(k_range.c_str(), "%d:%d", &vc.k_min, &vc.k_max) != 2)
        throw std::invalid_argument("--k-range expects lo:hi");
      if (convention == "order_one_plus")
        vc.convention = deojet::InnerRecursion::order_one_plus;
      else if (convention == "same_k")
        vc.convention = deojet::InnerRecursion::same_k;
      else
        throw std::invalid_argument("--convention must be order_one_plus or same_k");
      if (verify_format != "json-report" && verify_format != "csv" && verify_format != "table")
        throw std::invalid_argument("--format must be json-report, csv or table");

      const deojet::VerifyReport rep = deojet::run_verify(vc);
      std::string payload;
      if (verify_format == "json-report")
        payload = deojet::report_to_json(rep).dump(2) + "\n";
      else if (verify_format == "csv")
        payload = deojet::report_to_csv(rep);
      else
        payload = human_table(rep);
      const int io = write_output(verify_out, payload);
      if (io != kExitOk) return io;
      if (verify_out != "-" && !verify_out.empty())
        std::cerr << rep.passed << "/" << rep.total << " cases passed (max residual " << rep.max_residual << ")\n";
      return rep.all_pass() ? kExitOk : kExitFailedCases;
    }

    if (*wave) {
      wave_args.resolve();
      grid.validate();
      const deojet::GridData data = deojet::sample_grid(wave_args.params, wave_args.spec, grid);
      std::ostringstream os;
      deojet::write_grid_csv(os, data);
      const int io = write_output(wave_out, os.str());
      if (io != kExitOk) return io;
      if (emit_gnuplot) {
        std::ostringstream title;
        title << "d_t^" << wave_args.spec.i << " field, n=" << wave_args.spec.n << ", m=" << wave_args.spec.m;
        const int gp = write_output(wave_out + ".gp", deojet::gnuplot_script(wave_out, title.str()));
        if (gp != kExitOk) return gp;
      }
      return kExitOk;
    }

    if (*power) {
      if (!(pa < pb)) throw std::invalid_argument("power: requires --a < --b");
      if (!(period > 0.0)) throw std::invalid_argument("power: requires --T > 0");
      if (power->count("--k") > 0) power_args.spec.i = power_k;
      power_args.resolve();
      const deojet::PowerResult r =
          deojet::averaged_power(power_args.params, power_args.spec, pa, pb, section_length, period, power_t0,
                                 quad_nodes, quad_panels);
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "numeric         = %.12e\nclosed_form     = %.12e\nalpha           = %.12e\n"
                    "rel_discrepancy = %.12e\n",
                    r.numeric, r.closed_form, r.alpha, r.rel_discrepancy);
      std::cout << buf;
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadArgs;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailedCases;
  }
  return kExitBadArgs;
}
