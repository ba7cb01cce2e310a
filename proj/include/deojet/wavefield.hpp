#pragma once

/**
 * Two-variable application: evanescent-wave fields, Helmholtz / linear-PDE
 * residuals, dispersion checks, averaged power and grid sampling.
 *
 * The carrier is g_c(x,t) = A exp(-k1 x) exp(j(w t - k2 x)); the physical
 * field is u = Re(g_c).  Derivatives of u in either variable are exact
 * complex-exponential algebra, and everything built on top of u (powers,
 * operator iterates) runs through the jet machinery on those exact
 * derivative values.
 */

#include <complex>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "deojet/energy.hpp"
#include "deojet/generator.hpp"
#include "deojet/operators.hpp"

namespace deojet {

struct EvanescentParams {
  double amplitude = 10.0;  ///< A, cm
  double k1 = -50.0;        ///< attenuation wavenumber, cm^-1
  double k2 = 100.0;        ///< propagation wavenumber, cm^-1
  double c = 1.0;           ///< wave speed (nondimensional by default)
  double omega = default_omega(-50.0, 100.0, 1.0);

  /// The real-part dispersion choice w = c*sqrt(k2^2 - k1^2), defined when
  /// |k2| > |k1|; callers must supply omega themselves otherwise.
  static double default_omega(double k1, double k2, double c) {
    if (!(std::abs(k2) > std::abs(k1)))
      throw std::invalid_argument("default_omega: requires |k2| > |k1|; supply omega explicitly");
    return c * std::sqrt(k2 * k2 - k1 * k1);
  }

  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("EvanescentParams: c must be > 0");
    if (!std::isfinite(amplitude) || !std::isfinite(omega))
      throw std::invalid_argument("EvanescentParams: non-finite parameter");
  }
};

enum class Axis { t, x };

/// Selects a solution-set candidate: g = d_t^i u^n for m = 1 (the S_1 sets),
/// g = d_t^i ([[u]^(m-2)]_1^+)^n for m >= 2 (the S_2/S_m sets); `axis` is
/// the variable the derivatives and operators act in.
struct FieldSpec {
  int i = 3;
  int n = 2;
  int m = 1;
  Axis axis = Axis::t;

  void validate() const {
    if (i < 0 || n < 1 || m < 1) throw std::invalid_argument("FieldSpec: requires i >= 0, n >= 1, m >= 1");
  }
};

struct GridSpec {
  double x0 = 0.0, x1 = 0.1;
  double t0 = 0.0, t1 = 0.15;
  int nx = 101, nt = 101;

  void validate(std::size_t cell_cap = std::size_t{1} << 24) const {
    if (!(x0 < x1) || !(t0 < t1)) throw std::invalid_argument("GridSpec: empty ranges");
    if (nx < 2 || nt < 2) throw std::invalid_argument("GridSpec: need at least 2 points per axis");
    if (static_cast<std::size_t>(nx) * static_cast<std::size_t>(nt) > cell_cap)
      throw std::invalid_argument("GridSpec: grid exceeds the memory cap");
  }
  double x_at(int ix) const { return x0 + (x1 - x0) * ix / (nx - 1); }
  double t_at(int it) const { return t0 + (t1 - t0) * it / (nt - 1); }
};

/// Jet of the real field u along the chosen axis at (x, t): entry r is
/// Re{ A mu^r e^(lambda x + j w t) } with lambda = -k1 - j k2 and
/// mu = j w (time axis) or lambda (space axis).
inline Jet carrier_jet(const EvanescentParams& p, Axis axis, double x, double t, int order) {
  p.validate();
  const std::complex<double> jimag(0.0, 1.0);
  const std::complex<double> lambda(-p.k1, -p.k2);
  const std::complex<double> mu = axis == Axis::t ? jimag * p.omega : lambda;
  std::complex<double> acc = p.amplitude * std::exp(lambda * x + jimag * (p.omega * t));
  std::vector<double> v(static_cast<std::size_t>(order + 1));
  for (int r = 0; r <= order; ++r) {
    v[static_cast<std::size_t>(r)] = acc.real();
    acc *= mu;
  }
  return Jet(axis == Axis::t ? t : x, 0, std::move(v));
}

/// Value of the selected field candidate at one point.
inline double field_value(const EvanescentParams& p, const FieldSpec& spec, double x, double t) {
  spec.validate();
  const int order = spec.i + std::max(0, spec.m - 1) + 1;
  Jet g = carrier_jet(p, spec.axis, x, t, order);
  for (int level = 1; level < spec.m; ++level) g = bracket(g, g, 1, Sign::plus);
  return g.int_pow(spec.n).deriv(spec.i);
}

struct DispersionResidual {
  std::complex<double> complex_residual;  ///< (k1 + j k2)^2 - (j w / c)^2
  double real_part_residual = 0.0;        ///< k1^2 - k2^2 + w^2/c^2
};

inline DispersionResidual dispersion_residual(const EvanescentParams& p) {
  DispersionResidual r;
  const std::complex<double> k(p.k1, p.k2);
  const std::complex<double> jwc(0.0, p.omega / p.c);
  r.complex_residual = k * k - jwc * jwc;
  r.real_part_residual = p.k1 * p.k1 - p.k2 * p.k2 + p.omega * p.omega / (p.c * p.c);
  return r;
}

/// A scalar field of (x, t) with exact mixed partial derivatives.
class Field2D {
 public:
  using DerivFn = std::function<double(double x, double t, int dx, int dt)>;
  explicit Field2D(DerivFn fn) : fn_(std::move(fn)) {}

  double deriv(double x, double t, int dx, int dt) const {
    if (dx < 0 || dt < 0) throw std::invalid_argument("Field2D::deriv: negative order");
    return fn_(x, t, dx, dt);
  }
  double value(double x, double t) const { return fn_(x, t, 0, 0); }

 private:
  DerivFn fn_;
};

/// The evanescent field u itself (the (i=0, n=1, m=1) candidate).
inline Field2D evanescent_field(const EvanescentParams& p) {
  p.validate();
  return Field2D([p](double x, double t, int dx, int dt) {
    const std::complex<double> jimag(0.0, 1.0);
    const std::complex<double> lambda(-p.k1, -p.k2);
    std::complex<double> acc = p.amplitude * std::exp(lambda * x + jimag * (p.omega * t));
    for (int i = 0; i < dx; ++i) acc *= lambda;
    for (int i = 0; i < dt; ++i) acc *= jimag * p.omega;
    return acc.real();
  });
}

/// g(x,t) = F(t - direction * x / c); direction +1 travels right.
inline Field2D traveling_wave_field(Generator profile, double c, int direction = 1) {
  if (!(c > 0.0)) throw std::invalid_argument("traveling_wave_field: c must be > 0");
  if (direction != 1 && direction != -1) throw std::invalid_argument("traveling_wave_field: direction must be +-1");
  return Field2D([profile = std::move(profile), c, direction](double x, double t, int dx, int dt) {
    const double w = t - direction * x / c;
    double scale = 1.0;
    for (int i = 0; i < dx; ++i) scale *= -direction / c;
    return scale * profile.derivative(dx + dt, w);
  });
}

inline Field2D superpose(Field2D a, Field2D b) {
  return Field2D([a = std::move(a), b = std::move(b)](double x, double t, int dx, int dt) {
    return a.deriv(x, t, dx, dt) + b.deriv(x, t, dx, dt);
  });
}

struct GridData {
  GridSpec spec;
  std::vector<double> values;  ///< x-major: values[ix * nt + it]

  double at(int ix, int it) const { return values[static_cast<std::size_t>(ix) * spec.nt + it]; }
};

struct PdeResidual {
  GridData grid;
  double max_abs = 0.0;
};

/// Pointwise a1 * d_x^beta g + a2 * d_t^beta g over the grid.  The
/// Helmholtz instance is (a1, a2, beta) = (1, -1/c^2, 2).
inline PdeResidual linear_pde_residual(const Field2D& g, double a1, double a2, int beta, const GridSpec& grid) {
  if (beta < 1) throw std::invalid_argument("linear_pde_residual: beta must be >= 1");
  grid.validate();
  PdeResidual out;
  out.grid.spec = grid;
  out.grid.values.resize(static_cast<std::size_t>(grid.nx) * grid.nt);
  for (int ix = 0; ix < grid.nx; ++ix) {
    const double x = grid.x_at(ix);
    for (int it = 0; it < grid.nt; ++it) {
      const double t = grid.t_at(it);
      const double r = a1 * g.deriv(x, t, beta, 0) + a2 * g.deriv(x, t, 0, beta);
      out.grid.values[static_cast<std::size_t>(ix) * grid.nt + it] = r;
      out.max_abs = std::max(out.max_abs, std::abs(r));
    }
  }
  return out;
}

/// Max over the grid of | Psi_2^(+,x)(g) - (1/c^2) Psi_2^(+,t)(g) |, which
/// vanishes for single traveling waves.
inline double psi_wave_identity_residual(const Field2D& g, double c, const GridSpec& grid) {
  grid.validate();
  double worst = 0.0;
  for (int ix = 0; ix < grid.nx; ++ix) {
    const double x = grid.x_at(ix);
    for (int it = 0; it < grid.nt; ++it) {
      const double t = grid.t_at(it);
      const double gx = g.deriv(x, t, 1, 0), gt = g.deriv(x, t, 0, 1);
      const double psix = gx * gx + g.value(x, t) * g.deriv(x, t, 2, 0);
      const double psit = gt * gt + g.value(x, t) * g.deriv(x, t, 0, 2);
      worst = std::max(worst, std::abs(psix - psit / (c * c)));
    }
  }
  return worst;
}

struct Psi1RatioReport {
  double ratio = 0.0;          ///< reference value of Psi_1^(+,t) / Psi_1^(+,x)
  double max_deviation = 0.0;  ///< max relative deviation from it over the grid
  int defined_points = 0;
};

/// Reported ratio Psi_1^(+,t)(g) / Psi_1^(+,x)(g); constant (= -+c) only for
/// single traveling waves, so it is data, not an assertion.
inline Psi1RatioReport psi1_tx_ratio(const Field2D& g, const GridSpec& grid) {
  grid.validate();
  Psi1RatioReport rep;
  double scale = 0.0;
  std::vector<std::pair<double, double>> pairs;
  for (int ix = 0; ix < grid.nx; ++ix)
    for (int it = 0; it < grid.nt; ++it) {
      const double x = grid.x_at(ix), t = grid.t_at(it);
      const double v = g.value(x, t);
      const double pt = 2.0 * v * g.deriv(x, t, 0, 1);
      const double px = 2.0 * v * g.deriv(x, t, 1, 0);
      pairs.emplace_back(pt, px);
      scale = std::max(scale, std::abs(px));
    }
  const double floor = 1e-8 * std::max(scale, 1e-300);
  for (auto& [pt, px] : pairs) {
    if (std::abs(px) <= floor) continue;
    const double r = pt / px;
    if (rep.defined_points == 0) rep.ratio = r;
    rep.max_deviation = std::max(rep.max_deviation, std::abs(r - rep.ratio) / std::max(1.0, std::abs(rep.ratio)));
    ++rep.defined_points;
  }
  return rep;
}

struct PowerResult {
  double numeric = 0.0;          ///< (L/T) * integral(a..b) |d_t^i u^n(x, t0)|^2 dx, by quadrature
  double closed_form = 0.0;      ///< complex-carrier boundary-term estimate, evaluated verbatim
  double alpha = 0.0;            ///< numeric / numeric(i=0, n=1)
  double rel_discrepancy = 0.0;  ///< |numeric - closed_form| / max(|numeric|, eps)
};

/// Section-averaged power of the selected field candidate.  The quadrature
/// value is the authoritative one; the closed form is reported alongside
/// with its discrepancy, never reconciled.
inline PowerResult averaged_power(const EvanescentParams& p, const FieldSpec& spec, double a, double b,
                                  double section_length, double period, double t0,
                                  int quad_nodes = 64, int quad_panels = 4) {
  if (!(a < b)) throw std::invalid_argument("averaged_power: requires a < b");
  if (!(period > 0.0)) throw std::invalid_argument("averaged_power: requires T > 0");
  if (!(section_length > 0.0)) throw std::invalid_argument("averaged_power: requires L > 0");
  spec.validate();

  // local Gauss-Legendre sweep over x (panels keep oscillatory integrands honest)
  auto integral = [&](const FieldSpec& fs) {
    std::vector<double> xs, ws;
    detail::gauss_legendre_rule(quad_nodes, xs, ws);
    const double width = (b - a) / quad_panels;
    double acc = 0.0;
    for (int panel = 0; panel < quad_panels; ++panel) {
      const double lo = a + panel * width;
      for (int i = 0; i < quad_nodes; ++i) {
        const double x = lo + 0.5 * width * (xs[static_cast<std::size_t>(i)] + 1.0);
        const double v = field_value(p, fs, x, t0);
        acc += 0.5 * width * ws[static_cast<std::size_t>(i)] * v * v;
      }
    }
    return acc;
  };

  PowerResult out;
  out.numeric = section_length / period * integral(spec);
  FieldSpec baseline;
  baseline.i = 0;
  baseline.n = 1;
  baseline.m = 1;
  baseline.axis = spec.axis;
  const double base_power = section_length / period * integral(baseline);
  out.alpha = out.numeric / base_power;

  const std::complex<double> jimag(0.0, 1.0);
  const std::complex<double> prefactor = 1.0 / (2.0 * spec.n * std::complex<double>(-p.k1, -p.k2));
  const std::complex<double> rate = std::pow(static_cast<double>(spec.n) * jimag * p.omega, 2 * (spec.i + 1));
  const double ub = std::pow(evanescent_field(p).value(b, t0), 2 * spec.n);
  const double ua = std::pow(evanescent_field(p).value(a, t0), 2 * spec.n);
  out.closed_form = (prefactor * (section_length * rate) * (ub - ua)).real() / period;
  out.rel_discrepancy = std::abs(out.numeric - out.closed_form) / std::max(std::abs(out.numeric), 1e-30);
  return out;
}

inline GridData sample_grid(const EvanescentParams& p, const FieldSpec& spec, const GridSpec& grid) {
  grid.validate();
  spec.validate();
  GridData out;
  out.spec = grid;
  out.values.resize(static_cast<std::size_t>(grid.nx) * grid.nt);
  for (int ix = 0; ix < grid.nx; ++ix) {
    const double x = grid.x_at(ix);
    for (int it = 0; it < grid.nt; ++it)
      out.values[static_cast<std::size_t>(ix) * grid.nt + it] = field_value(p, spec, x, grid.t_at(it));
  }
  return out;
}

/// CSV grid format: header `x,t,value`, x-major rows, %.12e values, LF.
inline void write_grid_csv(std::ostream& os, const GridData& grid) {
  os << "x,t,value\n";
  char buf[96];
  for (int ix = 0; ix < grid.spec.nx; ++ix)
    for (int it = 0; it < grid.spec.nt; ++it) {
      std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%.12e\n", grid.spec.x_at(ix), grid.spec.t_at(it),
                    grid.at(ix, it));
      os << buf;
    }
}

/// Companion plotting script (portable pm3d surface).
inline std::string gnuplot_script(const std::string& csv_path, const std::string& title) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set title '" + title + "'\n";
  s += "set xlabel 'x'\nset ylabel 't'\n";
  s += "set dgrid3d 64,64\nset hidden3d\n";
  s += "splot '" + csv_path + "' using 1:2:3 every ::1 with pm3d notitle\n";
  return s;
}

}  // namespace deojet
