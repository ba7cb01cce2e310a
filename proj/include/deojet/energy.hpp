#pragma once

/**
 * Energy integrals and the analytic diagnostics built on them:
 * the energy function E(f^n) = integral of (f^n)^2, the Cauchy-Schwarz
 * bound, the operator energy-step inequality, the
 * Taylor ratio diagnostic, and sampling-based kernel membership probes.
 *
 * Integrands are always evaluated from exact generator derivatives,
 * never finite differences.
 */

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "deojet/generator.hpp"
#include "deojet/operators.hpp"

namespace deojet {

enum class QuadRule { gauss_legendre, composite_simpson };

/// Quadrature over [a, b].  gauss_legendre: n nodes on each of `panels`
/// equal subintervals (error O(h^(2n)) per panel on smooth integrands);
/// composite_simpson: `panels` parabolic panels, error O(h^4).
struct QuadratureSpec {
  double a = -5.0;
  double b = 0.0;
  QuadRule rule = QuadRule::gauss_legendre;
  int n = 64;       ///< nodes per panel (Gauss-Legendre); ignored by Simpson
  int panels = 1;

  void validate() const {
    if (!(a < b)) throw std::invalid_argument("QuadratureSpec: requires a < b");
    if (rule == QuadRule::gauss_legendre && n < 2) throw std::invalid_argument("QuadratureSpec: need >= 2 nodes");
    if (panels < 1) throw std::invalid_argument("QuadratureSpec: need >= 1 panel");
  }
};

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

}  // namespace detail

inline double integrate(const std::function<double(double)>& fn, const QuadratureSpec& q) {
  q.validate();
  const double width = (q.b - q.a) / q.panels;
  double acc = 0.0;
  if (q.rule == QuadRule::gauss_legendre) {
    std::vector<double> x, w;
    detail::gauss_legendre_rule(q.n, x, w);
    for (int p = 0; p < q.panels; ++p) {
      const double lo = q.a + p * width;
      for (int i = 0; i < q.n; ++i) {
        const double t = lo + 0.5 * width * (x[static_cast<std::size_t>(i)] + 1.0);
        const double v = fn(t);
        if (!std::isfinite(v)) throw std::runtime_error("integrate: non-finite sample");
        acc += 0.5 * width * w[static_cast<std::size_t>(i)] * v;
      }
    }
    return acc;
  }
  // composite Simpson
  for (int p = 0; p < q.panels; ++p) {
    const double lo = q.a + p * width;
    const double v0 = fn(lo), v1 = fn(lo + width / 2.0), v2 = fn(lo + width);
    if (!std::isfinite(v0) || !std::isfinite(v1) || !std::isfinite(v2))
      throw std::runtime_error("integrate: non-finite sample");
    acc += width / 6.0 * (v0 + 4.0 * v1 + v2);
  }
  return acc;
}

/// E(f^n) = integral over [a,b] of (f(t)^n)^2 dt.
inline double energy(const Generator& g, int n, const QuadratureSpec& q) {
  if (n < 1) throw std::invalid_argument("energy: n must be >= 1");
  return integrate([&](double t) { const double v = std::pow(g.value(t), n); return v * v; }, q);
}

struct CauchySchwarzResult {
  double lhs = 0.0;  ///< (integral of f^n)^2
  double rhs = 0.0;  ///< (b-a) * E(f^n)
  bool holds = false;
};

inline CauchySchwarzResult cauchy_schwarz_check(const Generator& g, int n, const QuadratureSpec& q) {
  CauchySchwarzResult r;
  const double mean = integrate([&](double t) { return std::pow(g.value(t), n); }, q);
  r.lhs = mean * mean;
  r.rhs = (q.b - q.a) * energy(g, n, q);
  r.holds = r.lhs <= r.rhs + 1e-12 * std::max(1.0, std::abs(r.rhs));
  return r;
}

struct EnergyStepResult {
  double lhs = 0.0;                  ///< E(Psi_(k+1)^+(f))
  double rhs_first_derivative = 0.0; ///< E(d/dt Psi_k^+(f)), the bounding form
  double rhs_kth_derivative = 0.0;   ///< E(d^k/dt^k Psi_k^+(f)), reported alongside
  bool holds = false;                ///< lhs <= rhs_first_derivative + tol
};

/// Energy-step inequality: raising the operator order cannot gain more
/// energy than differentiating the image once.  The k = 0 case reads the
/// antiderivative of f, which must have a closed form (every roster kind has).
inline EnergyStepResult psi_energy_step_check(const Generator& g, int k, const QuadratureSpec& q, double tol = 1e-8) {
  if (k < 0) throw std::invalid_argument("psi_energy_step_check: k must be >= 0");
  EnergyStepResult r;
  const int hi = 2 * k + 2;
  const int lo = std::min(0, k - 1);
  auto point_jet = [&](double t) {
    std::vector<double> v(static_cast<std::size_t>(hi - lo + 1));
    for (int m = lo; m <= hi; ++m) {
      if (m >= 0) {
        v[static_cast<std::size_t>(m - lo)] = g.derivative(m, t);
      } else {
        auto a = g.antiderivative(t);
        if (!a)
          throw std::invalid_argument("psi_energy_step_check: k = 0 needs a closed-form antiderivative for " + g.describe());
        v[static_cast<std::size_t>(m - lo)] = *a;
      }
    }
    return Jet(t, lo, std::move(v));
  };
  auto sq = [](double v) { return v * v; };
  r.lhs = integrate([&](double t) { return sq(psi(point_jet(t), k + 1, Sign::plus).deriv(0)); }, q);
  r.rhs_first_derivative = integrate([&](double t) { return sq(psi(point_jet(t), k, Sign::plus).deriv(1)); }, q);
  r.rhs_kth_derivative = integrate([&](double t) { return sq(psi(point_jet(t), k, Sign::plus).deriv(k)); }, q);
  r.holds = r.lhs <= r.rhs_first_derivative + tol;
  return r;
}

struct ConvergenceDiagnostic {
  /// ratio_k = |d^k f^(2n)(q) / d^(k-1) f^(2n)(q)| * (p-q)/(k+1) for k = 1..K;
  /// entries with a (numerically) zero denominator are gaps, not failures.
  std::vector<std::optional<double>> ratios;
  bool converging = false;  ///< the last defined ratio is < 1 (ratio test is asymptotic)
};

inline ConvergenceDiagnostic taylor_convergence_diagnostic(const Generator& g, int n, double q_point, double p_point,
                                                           int K) {
  if (K < 1) throw std::invalid_argument("taylor_convergence_diagnostic: K must be >= 1");
  if (n < 1) throw std::invalid_argument("taylor_convergence_diagnostic: n must be >= 1");
  JetConfig cfg;
  cfg.order = K;
  const Jet f2n = jet_from_generator(g, q_point, cfg).int_pow(2 * n);
  double scale = 0.0;
  for (int m = 0; m <= K; ++m) scale = std::max(scale, std::abs(f2n.deriv(m)));
  const double tiny = 1e-14 * std::max(scale, 1e-300);

  ConvergenceDiagnostic out;
  out.converging = true;
  for (int k = 1; k <= K; ++k) {
    const double den = f2n.deriv(k - 1);
    if (std::abs(den) <= tiny) {
      out.ratios.push_back(std::nullopt);
      continue;
    }
    const double r = std::abs(f2n.deriv(k) / den) * (p_point - q_point) / (k + 1);
    out.ratios.push_back(r);
    out.converging = r < 1.0;
  }
  return out;
}

struct MembershipReport {
  int p = 0;
  std::vector<int> probed_k;
  /// Per k: the smallest normalized |operator image| over the samples, taken
  /// across both families (minus skipped at k = 1, whose image is always 0).
  std::map<int, double> min_abs_image;
  bool is_candidate_member = false;
  double threshold = 1e-10;
};

/// Chebyshev sample points of [a, b] (the default probe layout).
inline std::vector<double> chebyshev_points(double a, double b, int count = 33) {
  if (count < 1 || !(a < b)) throw std::invalid_argument("chebyshev_points: bad arguments");
  std::vector<double> pts(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double z = std::cos(std::numbers::pi * (2.0 * i + 1.0) / (2.0 * count));
    pts[static_cast<std::size_t>(i)] = 0.5 * (a + b) + 0.5 * (b - a) * z;
  }
  return pts;
}

/// Sampling evidence for f outside the kernels of [[.]^p]_k^+ (all k) and
/// [[.]^p]_k^- (k != 1).  Candidate membership only; a vanishing minimum is
/// conclusive the other way (e.g. exponentials under every minus operator).
inline MembershipReport membership_probe(const Generator& g, int p, const std::vector<int>& k_range,
                                         const std::vector<double>& sample_points, double threshold = 1e-10,
                                         InnerRecursion conv = InnerRecursion::order_one_plus) {
  if (k_range.empty() || sample_points.empty())
    throw std::invalid_argument("membership_probe: empty probe set");
  MembershipReport rep;
  rep.p = p;
  rep.threshold = threshold;
  rep.is_candidate_member = true;

  int k_min = k_range.front();
  for (int k : k_range) k_min = std::min(k_min, k);
  JetConfig cfg;
  cfg.order = 2 * (p + 1) + 8;
  for (int k : k_range) cfg.order = std::max(cfg.order, std::abs(k) + 2 * (p + 1) + 2);
  cfg.neg_depth = std::max(0, 1 - k_min) + 1;

  // An image is "nonzero at t" if its value or its first two derivatives
  // are; with zero antiderivative constants the bare value of a negative-k
  // image is pinned to 0 and would be blind evidence.
  auto image_magnitude = [](const Jet& img) {
    double m = 0.0;
    for (int r = 0; r <= std::min(img.hi(), 2); ++r) m = std::max(m, std::abs(img.deriv(r)));
    return m;
  };
  for (int k : k_range) {
    rep.probed_k.push_back(k);
    double scale = 0.0, min_abs = std::numeric_limits<double>::infinity();
    for (double t : sample_points) {
      const Jet f = jet_from_generator(g, t, cfg);
      const double vp = image_magnitude(generalized_op(f, p, k, Sign::plus, conv));
      scale = std::max(scale, vp);
      double point_min = vp;
      if (k != 1) {
        const double vm = image_magnitude(generalized_op(f, p, k, Sign::minus, conv));
        scale = std::max(scale, vm);
        point_min = std::min(point_min, vm);
      }
      min_abs = std::min(min_abs, point_min);
    }
    const double normalized = scale > 0.0 ? min_abs / scale : 0.0;
    rep.min_abs_image[k] = normalized;
    if (!(normalized > threshold)) rep.is_candidate_member = false;
  }
  return rep;
}

}  // namespace deojet
