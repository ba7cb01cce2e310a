#pragma once

/**
 * Exact truncated-Taylor arithmetic at a point ("jets"), extended to
 * antiderivative orders.
 *
 * A Jet stores the derivative values d_m = (d/dt)^m f(t0) for a contiguous
 * range of orders m in [lo, hi].  Orders m < 0 hold chosen antiderivative
 * values (integration constants are free; see AntiderivPolicy).  All
 * operations are pure and work on the derivative values directly, so the
 * usual calculus rules (Leibniz, shifting) are exact up to roundoff.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace deojet {

/// Requested derivative order is outside the stored range.
class OrderError : public std::runtime_error {
 public:
  explicit OrderError(const std::string& what) : std::runtime_error(what) {}
};

/// Reciprocal/negative power of a jet whose value term is (numerically) zero.
class SingularityError : public std::runtime_error {
 public:
  explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

/// How to fill antiderivative (negative-order) entries that are not
/// determined by the data: all zeros, or seeded uniform draws in [-1, 1].
/// Identities built from brackets must hold for either choice.
enum class AntiderivPolicy { zeros, randomized };

struct NegativeFill {
  AntiderivPolicy policy = AntiderivPolicy::zeros;
  std::uint64_t seed = 0;
};

/// Binomial coefficient as an exact double (exact for n <= 56).
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  std::uint64_t num = 1;
  for (int i = 0; i < k; ++i) num = num * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
  return static_cast<double>(num);
}

class Jet {
 public:
  /// values[i] holds d^(lo+i) f (t0).
  Jet(double t0, int lo, std::vector<double> values) : t0_(t0), lo_(lo), values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("Jet: empty value list");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("Jet: non-finite derivative value");
  }

  double t0() const { return t0_; }
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(values_.size()) - 1; }
  int size() const { return static_cast<int>(values_.size()); }

  bool has(int order) const { return order >= lo() && order <= hi(); }

  /// Value of d^order f at t0.  Throws OrderError outside [lo, hi]; there is
  /// no silent truncation anywhere in this library.
  double deriv(int order) const {
    if (!has(order)) {
      std::ostringstream os;
      os << "Jet: order " << order << " outside stored range [" << lo() << ", " << hi() << "]";
      throw OrderError(os.str());
    }
    return values_[static_cast<std::size_t>(order - lo_)];
  }

  /// The jet of d^m f.  Pure relabelling: entry r of the result is entry
  /// m+r of *this, so shift(1) followed by shift(-1) is an exact identity.
  Jet shift(int m) const { return Jet(t0_, lo_ - m, values_); }

  Jet scaled(double a) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= a;
    return Jet(t0_, lo_, std::move(v));
  }

  Jet operator-() const { return scaled(-1.0); }

  /// Truncated Taylor evaluation: sum_{r=0..hi} d_r (t-t0)^r / r!.
  /// Requires order 0 to be stored; negative orders do not contribute.
  double eval(double t) const {
    if (lo() > 0) throw OrderError("Jet::eval: order 0 not stored");
    const double dt = t - t0_;
    double term = 1.0;  // dt^r / r!
    double acc = 0.0;
    for (int r = 0; r <= hi(); ++r) {
      if (r > 0) term *= dt / r;
      acc += deriv(r) * term;
    }
    return acc;
  }

  /// Integer power by repeated Leibniz products.  n = 0 gives the constant
  /// one jet; n < 0 goes through the reciprocal jet (requires a nonzero
  /// value term; |d_0| <= singular_tol raises SingularityError).
  Jet int_pow(int n, double singular_tol = 1e-12) const;

  friend Jet operator+(const Jet& a, const Jet& b) {
    check_same_point(a, b, "+");
    const int lo = std::max(a.lo(), b.lo()), hi = std::min(a.hi(), b.hi());
    check_overlap(lo, hi, "+");
    std::vector<double> v(static_cast<std::size_t>(hi - lo + 1));
    for (int r = lo; r <= hi; ++r) v[static_cast<std::size_t>(r - lo)] = a.deriv(r) + b.deriv(r);
    return Jet(a.t0(), lo, std::move(v));
  }

  friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

  /// General Leibniz rule on derivative values:
  ///   (fg)^(r) = sum_i C(r,i) f^(i) g^(r-i).
  /// Valid for r >= 0 only, so the product's range is [0, min(hi_a, hi_b)];
  /// antiderivatives of a product are not derivable from the factors.
  friend Jet operator*(const Jet& a, const Jet& b) {
    check_same_point(a, b, "*");
    if (a.lo() > 0 || b.lo() > 0)
      throw OrderError("Jet product: operands must store orders down to 0");
    const int hi = std::min(a.hi(), b.hi());
    check_overlap(0, hi, "*");
    std::vector<double> v(static_cast<std::size_t>(hi + 1));
    for (int r = 0; r <= hi; ++r) {
      double acc = 0.0;
      for (int i = 0; i <= r; ++i) acc += binomial(r, i) * a.deriv(i) * b.deriv(r - i);
      v[static_cast<std::size_t>(r)] = acc;
    }
    return Jet(a.t0(), 0, std::move(v));
  }

  friend Jet operator*(double a, const Jet& j) { return j.scaled(a); }
  friend Jet operator*(const Jet& j, double a) { return j.scaled(a); }

 private:
  static void check_same_point(const Jet& a, const Jet& b, const char* op) {
    if (a.t0() != b.t0()) {
      std::ostringstream os;
      os << "Jet " << op << ": mismatched expansion points " << a.t0() << " vs " << b.t0();
      throw std::invalid_argument(os.str());
    }
  }
  static void check_overlap(int lo, int hi, const char* op) {
    if (lo > hi) {
      std::ostringstream os;
      os << "Jet " << op << ": operand order ranges do not overlap";
      throw OrderError(os.str());
    }
  }

  double t0_;
  int lo_;
  std::vector<double> values_;
};

/// Entry-wise absolute values.  Feeding these through the same Leibniz
/// sums gives a magnitude bound for roundoff-aware comparisons.
inline Jet abs_entries(const Jet& j) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(j.size()));
  for (int r = j.lo(); r <= j.hi(); ++r) v.push_back(std::abs(j.deriv(r)));
  return Jet(j.t0(), j.lo(), std::move(v));
}

/// Worst entry-wise difference over the common order range, normalized by
/// the local magnitude (floored at 1).
inline double max_rel_entry_diff(const Jet& a, const Jet& b) {
  const int lo = std::max(a.lo(), b.lo()), hi = std::min(a.hi(), b.hi());
  if (lo > hi) throw OrderError("max_rel_entry_diff: no common orders");
  double worst = 0.0;
  for (int r = lo; r <= hi; ++r) {
    const double x = a.deriv(r), y = b.deriv(r);
    worst = std::max(worst, std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)}));
  }
  return worst;
}

/// Constant jet (value c, all derivatives zero) over orders [0, hi].
inline Jet constant_jet(double t0, double c, int hi) {
  std::vector<double> v(static_cast<std::size_t>(hi + 1), 0.0);
  v[0] = c;
  return Jet(t0, 0, std::move(v));
}

/// Reciprocal jet 1/f, solving the Leibniz convolution for the unknown
/// entries order by order.
inline Jet reciprocal(const Jet& f, double singular_tol = 1e-12) {
  if (f.lo() > 0) throw OrderError("reciprocal: order 0 not stored");
  const double d0 = f.deriv(0);
  if (std::abs(d0) <= singular_tol) {
    std::ostringstream os;
    os << "reciprocal: value term " << d0 << " within singularity threshold " << singular_tol
       << " (base lies in the operator kernel)";
    throw SingularityError(os.str());
  }
  const int hi = f.hi();
  std::vector<double> r(static_cast<std::size_t>(hi + 1));
  r[0] = 1.0 / d0;
  for (int m = 1; m <= hi; ++m) {
    double acc = 0.0;
    for (int i = 1; i <= m; ++i) acc += binomial(m, i) * f.deriv(i) * r[static_cast<std::size_t>(m - i)];
    r[static_cast<std::size_t>(m)] = -acc / d0;
  }
  return Jet(f.t0(), 0, std::move(r));
}

inline Jet Jet::int_pow(int n, double singular_tol) const {
  if (n == 1) return *this;
  if (n == 0) return constant_jet(t0(), 1.0, std::max(hi(), 0));
  if (n < 0) return reciprocal(*this, singular_tol).int_pow(-n);
  Jet acc = *this;
  for (int i = 1; i < n; ++i) acc = acc * (*this);
  return acc;
}

/// Extend a jet downward to new_lo, filling the missing antiderivative
/// entries per the policy.  Entries are drawn for order lo-1 first, then
/// lo-2, ... so a given seed yields a stable prefix.
inline Jet extend_down(const Jet& j, int new_lo, const NegativeFill& fill = {}) {
  if (new_lo >= j.lo()) return j;
  std::vector<double> head(static_cast<std::size_t>(j.lo() - new_lo), 0.0);
  if (fill.policy == AntiderivPolicy::randomized) {
    std::mt19937_64 rng(fill.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // head[k] holds order new_lo + k; draw top-down.
    for (int order = j.lo() - 1; order >= new_lo; --order)
      head[static_cast<std::size_t>(order - new_lo)] = u(rng);
  }
  std::vector<double> v;
  v.reserve(head.size() + static_cast<std::size_t>(j.size()));
  v.insert(v.end(), head.begin(), head.end());
  for (int r = j.lo(); r <= j.hi(); ++r) v.push_back(j.deriv(r));
  return Jet(j.t0(), new_lo, std::move(v));
}

/// Orders and fill policy for jets built from generators.
struct JetConfig {
  int order = 32;        ///< highest derivative order N (>= 1)
  int neg_depth = 0;     ///< antiderivative orders stored: -1 .. -neg_depth
  AntiderivPolicy antideriv_policy = AntiderivPolicy::zeros;
  std::uint64_t seed = 42;

  void validate() const {
    if (order < 1) throw std::invalid_argument("JetConfig: order must be >= 1");
    if (neg_depth < 0) throw std::invalid_argument("JetConfig: neg_depth must be >= 0");
  }
  NegativeFill fill() const { return NegativeFill{antideriv_policy, seed}; }
};

}  // namespace deojet
