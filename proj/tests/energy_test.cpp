#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "deojet/energy.hpp"

using namespace deojet;

namespace {

QuadratureSpec gl(double a, double b, int n = 64, int panels = 1) {
  QuadratureSpec q;
  q.a = a;
  q.b = b;
  q.n = n;
  q.panels = panels;
  return q;
}

TEST(Energy, ExponentialAnalytic) {
  // integral of e^{2t} over [-5, 0] = (1 - e^{-10})/2
  const double e = energy(Generator(gen::Exponential{1.0}), 1, gl(-5.0, 0.0));
  EXPECT_NEAR(e, (1.0 - std::exp(-10.0)) / 2.0, 1e-9);
}

TEST(Energy, ZeroFunction) {
  EXPECT_DOUBLE_EQ(energy(Generator(gen::Polynomial{{0.0}}), 1, gl(-2.0, 1.0)), 0.0);
}

TEST(Energy, GaussianHalfLine) {
  // integral of e^{-2t^2} over (-inf, 0] = sqrt(pi/2)/2; [-8, 0] captures it
  const double e = energy(Generator(gen::Gaussian{1.0, 0.0}), 1, gl(-8.0, 0.0, 64, 4));
  EXPECT_NEAR(e, std::sqrt(std::numbers::pi / 2.0) / 2.0, 1e-6);
}

TEST(Energy, NonNegativeAndMonotoneInUpperLimit) {
  const Generator g(gen::Cosine{1.0, 2.0, 0.3});
  double prev = 0.0;
  for (double b : {-2.0, -1.0, 0.0, 1.0}) {
    const double e = energy(g, 2, gl(-3.0, b, 64, 2));
    EXPECT_GE(e, 0.0);
    EXPECT_GE(e, prev - 1e-12);
    prev = e;
  }
}

TEST(Energy, AdditiveOverAdjacentIntervals) {
  const Generator g(gen::Cosine{1.0, 2.0, 0.3});
  const double whole = energy(g, 2, gl(-3.0, 1.0, 64, 4));
  const double split = energy(g, 2, gl(-3.0, -1.0, 64, 2)) + energy(g, 2, gl(-1.0, 1.0, 64, 2));
  EXPECT_NEAR(whole, split, 1e-10 * std::max(1.0, whole));
}

TEST(Energy, StableUnderPanelDoubling) {
  const Generator g(gen::Gaussian{1.3, -0.4});
  const double coarse = energy(g, 2, gl(-5.0, 0.0, 32, 2));
  const double fine = energy(g, 2, gl(-5.0, 0.0, 32, 4));
  EXPECT_NEAR(coarse, fine, 1e-8 * std::max(1.0, std::abs(fine)));
}

TEST(Energy, SimpsonAgreesOnSmoothIntegrands) {
  QuadratureSpec q = gl(-2.0, 0.0);
  q.rule = QuadRule::composite_simpson;
  q.panels = 400;
  const Generator g(gen::Exponential{0.7});
  EXPECT_NEAR(energy(g, 1, q), energy(g, 1, gl(-2.0, 0.0)), 1e-8);
}

TEST(Energy, NonFiniteSampleIsAnError) {
  // e^{400 t} squared overflows over [0, 2]
  EXPECT_THROW(energy(Generator(gen::Exponential{400.0}), 2, gl(0.0, 2.0)), std::runtime_error);
  EXPECT_THROW(energy(Generator(gen::Exponential{1.0}), 0, gl(0.0, 1.0)), std::invalid_argument);
  QuadratureSpec bad = gl(1.0, 0.0);
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(CauchySchwarz, EqualityForConstants) {
  const auto r = cauchy_schwarz_check(Generator(gen::Polynomial{{1.0}}), 1, gl(0.0, 1.0));
  EXPECT_NEAR(r.lhs, 1.0, 1e-12);
  EXPECT_NEAR(r.rhs, 1.0, 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST(CauchySchwarz, SpecCases) {
  EXPECT_TRUE(cauchy_schwarz_check(Generator(gen::Exponential{1.0}), 1, gl(-5.0, 0.0)).holds);
  EXPECT_TRUE(cauchy_schwarz_check(Generator(gen::Cosine{1.0, 2.0, 0.0}), 1, gl(-std::numbers::pi, 0.0)).holds);
}

TEST(CauchySchwarz, RandomizedDraws) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::uniform_real_distribution<double> lo(-4.0, -0.5);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<Generator> pool = {Generator(gen::Exponential{u(rng)}), Generator(gen::Cosine{u(rng), u(rng), u(rng)}),
                                   Generator(gen::Gaussian{u(rng), lo(rng) / 4.0}),
                                   Generator(gen::Polynomial{{u(rng), u(rng), u(rng)}})};
    const Generator& g = pool[static_cast<std::size_t>(rep) % pool.size()];
    const double a = lo(rng);
    const auto r = cauchy_schwarz_check(g, 1 + rep % 3, gl(a, a + u(rng), 64, 2));
    EXPECT_TRUE(r.holds) << g.describe();
  }
}

TEST(EnergyStep, HoldsForDecayingRoster) {
  const QuadratureSpec q = gl(-5.0, 0.0, 64, 4);
  for (int k = 0; k <= 3; ++k) {
    const auto gauss = psi_energy_step_check(Generator(gen::Gaussian{1.0, 0.0}), k, q);
    EXPECT_TRUE(gauss.holds) << "gauss k=" << k;
    const auto exp07 = psi_energy_step_check(Generator(gen::Exponential{0.7}), k, q);
    EXPECT_TRUE(exp07.holds) << "exp k=" << k;
  }
}

TEST(EnergyStep, TrivialWhenHigherImageVanishes) {
  // constant f: Psi_{k+1}^+(f) = 0 <= anything
  const auto r = psi_energy_step_check(Generator(gen::Polynomial{{2.0}}), 1, gl(-1.0, 0.0));
  EXPECT_NEAR(r.lhs, 0.0, 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST(EnergyStep, HalfExponentialCase) {
  const auto r = psi_energy_step_check(Generator(gen::Exponential{0.5}), 1, gl(-10.0, 0.0, 64, 2));
  // Psi_2^+(e^{t/2}) = 2 (1/2)^2 e^t; energies compare with factor (2a)^2 = 1 < 4
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.lhs / r.rhs_first_derivative, 0.25, 1e-6);
}

TEST(EnergyStep, KthDerivativeFormReported) {
  const auto r = psi_energy_step_check(Generator(gen::Gaussian{1.3, 0.0}), 2, gl(-5.0, 0.0, 64, 4));
  EXPECT_GT(r.rhs_kth_derivative, 0.0);
  EXPECT_NE(r.rhs_kth_derivative, r.rhs_first_derivative);  // d^2 vs d of Psi_2^+ genuinely differ
}

TEST(TaylorDiagnostic, ExponentialRatios) {
  // f^2 = e^{2t}: ratio_k = 2 (p-q) / (k+1)
  const auto d = taylor_convergence_diagnostic(Generator(gen::Exponential{1.0}), 1, 0.0, 0.5, 10);
  ASSERT_EQ(d.ratios.size(), 10u);
  for (int k = 1; k <= 10; ++k) {
    ASSERT_TRUE(d.ratios[k - 1].has_value());
    EXPECT_NEAR(*d.ratios[k - 1], 1.0 / (k + 1), 1e-12);
    EXPECT_LT(*d.ratios[k - 1], 1.0);
  }
  EXPECT_TRUE(d.converging);
}

TEST(TaylorDiagnostic, PolynomialGapsBeyondDegree) {
  const auto d = taylor_convergence_diagnostic(Generator(gen::Polynomial{{1.0, 1.0}}), 1, 0.0, 1.0, 8);
  // f^2 = (1+t)^2 has derivative orders 0..2; ratios beyond hit exact zeros
  ASSERT_TRUE(d.ratios[0].has_value());
  ASSERT_TRUE(d.ratios[1].has_value());
  EXPECT_NEAR(*d.ratios[1], 2.0 / (2.0 + 1.0) / 2.0, 1e-12);  // |2/2| * 1/3
  EXPECT_TRUE(d.ratios[2].has_value());
  EXPECT_DOUBLE_EQ(*d.ratios[2], 0.0);  // numerator zero, denominator 2
  EXPECT_FALSE(d.ratios[3].has_value());  // zero denominator -> gap
  EXPECT_TRUE(d.converging);
}

TEST(TaylorDiagnostic, WideIntervalIsAsymptoticallyConverging) {
  // p - q = 10: early ratios exceed 1, tail drops below 1
  const auto d = taylor_convergence_diagnostic(Generator(gen::Exponential{1.0}), 1, 0.0, 10.0, 40);
  EXPECT_GT(*d.ratios[0], 1.0);
  EXPECT_LT(*d.ratios[39], 1.0);
  EXPECT_TRUE(d.converging);
}

TEST(Membership, ExponentialFailsMinusFamily) {
  const auto rep = membership_probe(Generator(gen::Exponential{0.8}), 0, {-1, 0, 2, 3},
                                    chebyshev_points(-1.5, -0.25), 1e-10, InnerRecursion::order_one_plus);
  EXPECT_FALSE(rep.is_candidate_member);
  for (int k : {2, 3}) EXPECT_LE(rep.min_abs_image.at(k), 1e-10);
}

TEST(Membership, CosineIsACandidateOnEvenOrders) {
  const auto rep = membership_probe(Generator(gen::Cosine{1.0, 2.0, 0.0}), 0, {-1, 0, 2},
                                    chebyshev_points(-1.5, -0.25), 1e-10, InnerRecursion::order_one_plus);
  EXPECT_TRUE(rep.is_candidate_member);
  EXPECT_EQ(rep.probed_k.size(), 3u);
}

TEST(Membership, CosineLiesInOddMinusKernels) {
  // f' f^(k-1) and f f^(k) coincide for a pure sinusoid at odd k, so
  // Psi_3^- annihilates cosines; the probe must report non-membership
  const auto rep = membership_probe(Generator(gen::Cosine{1.0, 2.0, 0.3}), 0, {3},
                                    chebyshev_points(-1.5, -0.25), 1e-10, InnerRecursion::order_one_plus);
  EXPECT_FALSE(rep.is_candidate_member);
  EXPECT_LE(rep.min_abs_image.at(3), 1e-10);
}

TEST(Membership, ZeroFunctionIsNot) {
  const auto rep = membership_probe(Generator(gen::Polynomial{{0.0}}), 0, {2, 3}, chebyshev_points(-1.0, -0.2),
                                    1e-10, InnerRecursion::order_one_plus);
  EXPECT_FALSE(rep.is_candidate_member);
}

TEST(Membership, DepthOneProbes) {
  // depth-1 base of a cosine is again a pure sinusoid: even orders pass,
  // exponentials stay kernel-bound
  const auto cos_rep = membership_probe(Generator(gen::Cosine{1.0, 2.0, 0.3}), 1, {0, 2},
                                        chebyshev_points(-1.5, -0.25), 1e-10, InnerRecursion::order_one_plus);
  EXPECT_TRUE(cos_rep.is_candidate_member);
  const auto exp_rep = membership_probe(Generator(gen::Exponential{0.7}), 1, {0, 2, 3},
                                        chebyshev_points(-1.5, -0.25), 1e-10, InnerRecursion::order_one_plus);
  EXPECT_FALSE(exp_rep.is_candidate_member);
  const auto gauss_rep = membership_probe(Generator(gen::Gaussian{1.3, 0.0}), 1, {0, 2, 3},
                                          chebyshev_points(-1.5, -0.25), 1e-10, InnerRecursion::order_one_plus);
  EXPECT_TRUE(gauss_rep.is_candidate_member);
}

TEST(ChebyshevPoints, LayoutAndValidation) {
  const auto pts = chebyshev_points(-1.0, 1.0, 5);
  ASSERT_EQ(pts.size(), 5u);
  for (double p : pts) {
    EXPECT_GT(p, -1.0);
    EXPECT_LT(p, 1.0);
  }
  EXPECT_THROW(chebyshev_points(1.0, -1.0), std::invalid_argument);
}

}  // namespace
