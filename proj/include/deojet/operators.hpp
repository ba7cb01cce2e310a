#pragma once

/**
 * Differential energy operator families over jets.
 *
 * The building block is the order-k bracket
 *     [g,h]_k^+- = dg * d^(k-1)h +- g * d^k h,
 * applied to equal arguments this is Psi_k^+-.  Iterating the bracket gives
 * the generalized operators [[f]^p]_k^+-; two inner-recursion readings are
 * supported (see InnerRecursion) because the defining equation and the
 * ladder identities use different ones.
 */

#include <string>

#include "deojet/jet.hpp"

namespace deojet {

enum class Sign { plus, minus };

inline const char* sign_suffix(Sign s) { return s == Sign::plus ? "+" : "-"; }

/// How the inner iterates of [[f]^p]_k are built for p >= 1.
///
/// order_one_plus: inner iterates are order-1 plus brackets, so the depth-p
/// operator is the k-bracket of [[f]^(p-1)]_1^+.  This is the reading under
/// which the power-decomposition ladders hold, and the default.
///
/// same_k: every level uses order k and the outer sign (the literal
/// iterated-bracket definition).  Kept selectable; the two readings agree
/// for p = 0 and for k = 1 with plus sign, and diverge otherwise.
enum class InnerRecursion { order_one_plus, same_k };

inline const char* recursion_name(InnerRecursion c) {
  return c == InnerRecursion::order_one_plus ? "order_one_plus" : "same_k";
}

/// Names one operator: sign, order k, iteration depth p (depth -1 with
/// order 1 and plus sign is the identity operator; depth 0 is Psi_k).
struct OperatorId {
  Sign sign = Sign::plus;
  int order = 1;
  int depth = 0;

  std::string name() const {
    return "[[.]^" + std::to_string(depth) + "]_" + std::to_string(order) + "^" + sign_suffix(sign);
  }
};

/// Lowest base-jet order the k-bracket reads.
inline int bracket_required_lo(int k) { return std::min(0, k - 1); }

/// [g,h]_k^+- = dg * d^(k-1)h +- g * d^k h as a jet.
/// Order exhaustion in the shifts/products surfaces as OrderError.
inline Jet bracket(const Jet& g, const Jet& h, int k, Sign sign) {
  const Jet cross = g.shift(1) * h.shift(k - 1);
  const Jet direct = g * h.shift(k);
  return sign == Sign::plus ? cross + direct : cross - direct;
}

/// Psi_k^+-(f) = [f,f]_k^+-.
inline Jet psi(const Jet& f, int k, Sign sign) { return bracket(f, f, k, sign); }

/// The p-fold inner iterate: apply the inner bracket p times.
/// Under order_one_plus this is [[f]^(p-1)]_1^+ (and f itself for p = 0).
inline Jet iterate_base(const Jet& f, int p, int k, Sign sign, InnerRecursion conv,
                        const NegativeFill& fill = {}) {
  if (p < 0) throw std::invalid_argument("iterate_base: p must be >= 0");
  const int inner_k = conv == InnerRecursion::order_one_plus ? 1 : k;
  const Sign inner_sign = conv == InnerRecursion::order_one_plus ? Sign::plus : sign;
  Jet g = f;
  for (int q = 0; q < p; ++q) {
    Jet base = extend_down(g, std::min(g.lo(), bracket_required_lo(inner_k)), fill);
    g = bracket(base, base, inner_k, inner_sign);
  }
  return g;
}

/// [[f]^p]_k^+-.  p = -1 is accepted only as the identity convention
/// (order 1, plus); any other negative depth is an argument error.
inline Jet generalized_op(const Jet& f, int p, int k, Sign sign, InnerRecursion conv,
                          const NegativeFill& fill = {}) {
  if (p == -1) {
    if (k == 1 && sign == Sign::plus) return f;
    throw std::invalid_argument("generalized_op: depth -1 denotes the identity only for k = 1, plus");
  }
  if (p < 0) throw std::invalid_argument("generalized_op: negative depth");
  Jet base = iterate_base(f, p, k, sign, conv, fill);
  base = extend_down(base, std::min(base.lo(), bracket_required_lo(k)), fill);
  return bracket(base, base, k, sign);
}

/// Counter-example operator family eta_k at depth p:
///     3 * db * d^(k-1)b - b * d^k b,   b = the depth-p inner iterate.
/// Entry-wise equal to plus-op + 2 * minus-op over the same base.
inline Jet eta(const Jet& f, int k, int p, InnerRecursion conv, const NegativeFill& fill = {}) {
  if (p < 0) throw std::invalid_argument("eta: p must be >= 0");
  Jet base = iterate_base(f, p, k, Sign::plus, conv, fill);
  base = extend_down(base, std::min(base.lo(), bracket_required_lo(k)), fill);
  return 3.0 * (base.shift(1) * base.shift(k - 1)) - base * base.shift(k);
}

/// theta_k^+- at depth p: ((L-1)/2) times the generalized operator.
inline Jet theta(const Jet& f, int k, int L, Sign sign, int p, InnerRecursion conv,
                 const NegativeFill& fill = {}) {
  if (L <= 1) throw std::invalid_argument("theta: L must be > 1");
  return (static_cast<double>(L - 1) / 2.0) * generalized_op(f, p, k, sign, conv, fill);
}

/// Derivative chain rule residual at depth p:
///     | d/dt G_k(f) - G_(k+1)(f) - G_(k-1)(df) |
/// where all three terms are brackets over the same depth-p base (the last
/// one over the shifted base), so the identity must hold for any choice of
/// antiderivative constants.  The residual is the max over the comparable
/// orders, scaled by the Leibniz magnitude of the bracket terms (floored at
/// 1); minus-family images can cancel to pure roundoff, and the raw values
/// would then be a meaningless yardstick.
inline double chain_rule_residual(const Jet& f, int k, Sign sign, int p, InnerRecursion conv,
                                  const NegativeFill& fill = {}) {
  Jet base = iterate_base(f, p, k, sign, conv, fill);
  base = extend_down(base, std::min(base.lo(), std::min(0, k - 1)), fill);

  const Jet lhs = bracket(base, base, k, sign).shift(1);
  const Jet up = bracket(base, base, k + 1, sign);
  const Jet down = bracket(base.shift(1), base.shift(1), k - 1, sign);

  const Jet mag = abs_entries(base);
  const Jet s_lhs = bracket(mag, mag, k, Sign::plus).shift(1);
  const Jet s_up = bracket(mag, mag, k + 1, Sign::plus);
  const Jet s_down = bracket(mag.shift(1), mag.shift(1), k - 1, Sign::plus);

  const int lo = std::max({lhs.lo(), up.lo(), down.lo()});
  const int hi = std::min({lhs.hi(), up.hi(), down.hi()});
  if (lo > hi) throw OrderError("chain_rule_residual: no comparable orders left");
  double worst = 0.0;
  for (int r = lo; r <= hi; ++r) {
    const double a = lhs.deriv(r), b = up.deriv(r), c = down.deriv(r);
    const double scale = std::max({1.0, s_lhs.deriv(r), s_up.deriv(r), s_down.deriv(r)});
    worst = std::max(worst, std::abs(a - b - c) / scale);
  }
  return worst;
}

/// Scaled residual of the counter-example identity
///     eta_k = plus-op + 2 * minus-op  (over the shared depth-p base).
inline double eta_decomposition_residual(const Jet& f, int k, int p, InnerRecursion conv,
                                         const NegativeFill& fill = {}) {
  const Jet lhs = eta(f, k, p, conv, fill);
  const Jet rhs =
      generalized_op(f, p, k, Sign::plus, conv, fill) + 2.0 * generalized_op(f, p, k, Sign::minus, conv, fill);
  Jet base = iterate_base(f, p, k, Sign::plus, conv, fill);
  base = extend_down(base, std::min(base.lo(), bracket_required_lo(k)), fill);
  const Jet mag = abs_entries(base);
  const Jet scale = 3.0 * (mag.shift(1) * mag.shift(k - 1)) + mag * mag.shift(k);
  const int lo = std::max({lhs.lo(), rhs.lo(), scale.lo()});
  const int hi = std::min({lhs.hi(), rhs.hi(), scale.hi()});
  if (lo > hi) throw OrderError("eta_decomposition_residual: no comparable orders left");
  double worst = 0.0;
  for (int r = lo; r <= hi; ++r)
    worst = std::max(worst, std::abs(lhs.deriv(r) - rhs.deriv(r)) / std::max(1.0, scale.deriv(r)));
  return worst;
}

}  // namespace deojet
