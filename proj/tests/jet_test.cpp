#include <gtest/gtest.h>

#include <random>

#include "deojet/generator.hpp"
#include "deojet/jet.hpp"

using namespace deojet;

namespace {

Jet exp_jet(double rate, double t0, int order, int neg_depth = 0) {
  JetConfig cfg;
  cfg.order = order;
  cfg.neg_depth = neg_depth;
  return jet_from_generator(Generator(gen::Exponential{rate}), t0, cfg);
}

TEST(JetFromGenerator, ExponentialAtZero) {
  // all derivatives of e^t at 0 are 1
  const Jet j = exp_jet(1.0, 0.0, 3);
  ASSERT_EQ(j.lo(), 0);
  ASSERT_EQ(j.hi(), 3);
  for (int m = 0; m <= 3; ++m) EXPECT_DOUBLE_EQ(j.deriv(m), 1.0);
}

TEST(JetFromGenerator, PolynomialOnePlusT) {
  JetConfig cfg;
  cfg.order = 2;
  const Jet j = jet_from_generator(Generator(gen::Polynomial{{1.0, 1.0}}), 0.0, cfg);
  EXPECT_DOUBLE_EQ(j.deriv(0), 1.0);
  EXPECT_DOUBLE_EQ(j.deriv(1), 1.0);
  EXPECT_DOUBLE_EQ(j.deriv(2), 0.0);
}

TEST(JetFromGenerator, CosineQuadrantExact) {
  // d^m cos(2t) at 0 cycles 1, 0, -4, 0, 16
  JetConfig cfg;
  cfg.order = 4;
  const Jet j = jet_from_generator(Generator(gen::Cosine{1.0, 2.0, 0.0}), 0.0, cfg);
  const double expect[] = {1.0, 0.0, -4.0, 0.0, 16.0};
  for (int m = 0; m <= 4; ++m) EXPECT_DOUBLE_EQ(j.deriv(m), expect[m]) << "m=" << m;
}

TEST(Shift, ConsumesOneOrder) {
  const Jet j(0.0, 0, {1.0, 1.0, 1.0, 1.0});
  const Jet d = j.shift(1);
  EXPECT_EQ(d.lo(), -1);
  EXPECT_EQ(d.hi(), 2);
  for (int r = 0; r <= 2; ++r) EXPECT_DOUBLE_EQ(d.deriv(r), 1.0);
  EXPECT_THROW(d.deriv(3), OrderError);
}

TEST(Shift, AntiderivativeUsesStoredConstant) {
  const Jet j(0.0, -1, {0.0, 1.0, 1.0, 1.0, 1.0});  // neg_consts{-1: 0} + e^t derivs
  const Jet anti = j.shift(-1);
  EXPECT_DOUBLE_EQ(anti.deriv(0), 0.0);
  for (int r = 1; r <= 4; ++r) EXPECT_DOUBLE_EQ(anti.deriv(r), 1.0);
}

TEST(Shift, RoundTripIsExact) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(9);
    for (double& x : v) x = u(rng);
    const Jet j(0.25, -2, v);
    const Jet back = j.shift(1).shift(-1);
    const Jet back2 = j.shift(-1).shift(1);
    ASSERT_EQ(back.lo(), j.lo());
    ASSERT_EQ(back.hi(), j.hi());
    for (int r = j.lo(); r <= j.hi(); ++r) {
      EXPECT_EQ(back.deriv(r), j.deriv(r));  // bit-identical
      EXPECT_EQ(back2.deriv(r), j.deriv(r));
    }
  }
}

TEST(Mul, BinomialSquare) {
  // (1+t)^2 = 1 + 2t + t^2 -> derivative values 1, 2, 2
  const Jet j(0.0, 0, {1.0, 1.0, 0.0});
  const Jet sq = j * j;
  EXPECT_DOUBLE_EQ(sq.deriv(0), 1.0);
  EXPECT_DOUBLE_EQ(sq.deriv(1), 2.0);
  EXPECT_DOUBLE_EQ(sq.deriv(2), 2.0);
}

TEST(Mul, IdentityElement) {
  const Jet f = exp_jet(0.7, 0.3, 6);
  const Jet one = constant_jet(0.3, 1.0, 6);
  const Jet prod = f * one;
  for (int r = 0; r <= 6; ++r) EXPECT_DOUBLE_EQ(prod.deriv(r), f.deriv(r));
}

TEST(Mul, ExpTimesExp) {
  // e^t * e^t = e^{2t}: derivatives 1, 2, 4, 8
  const Jet f = exp_jet(1.0, 0.0, 3);
  const Jet p = f * f;
  EXPECT_DOUBLE_EQ(p.deriv(0), 1.0);
  EXPECT_DOUBLE_EQ(p.deriv(1), 2.0);
  EXPECT_DOUBLE_EQ(p.deriv(2), 4.0);
  EXPECT_DOUBLE_EQ(p.deriv(3), 8.0);
}

TEST(Mul, LeibnizConvolutionBitExact) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<double> a(8), b(8);
    for (double& x : a) x = u(rng);
    for (double& x : b) x = u(rng);
    const Jet ja(0.0, 0, a), jb(0.0, 0, b);
    const Jet p = ja * jb;
    for (int r = 0; r <= 7; ++r) {
      double acc = 0.0;
      for (int i = 0; i <= r; ++i) acc += binomial(r, i) * a[i] * b[r - i];
      EXPECT_EQ(p.deriv(r), acc) << "r=" << r;
    }
  }
}

TEST(Mul, MismatchedPointsRejected) {
  const Jet a = exp_jet(1.0, 0.0, 3);
  const Jet b = exp_jet(1.0, 0.5, 3);
  EXPECT_THROW(a * b, std::invalid_argument);
  EXPECT_THROW(a + b, std::invalid_argument);
}

TEST(Mul, RequiresOrderZero) {
  const Jet a = exp_jet(1.0, 0.0, 4);
  EXPECT_THROW(a.shift(-2) * a, OrderError);  // lo > 0 on the left operand
}

TEST(IntPow, ReciprocalOfOnePlusT) {
  // 1/(1+t): derivatives 1, -1, 2, -6
  const Jet j(0.0, 0, {1.0, 1.0, 0.0, 0.0});
  const Jet r = j.int_pow(-1);
  EXPECT_NEAR(r.deriv(0), 1.0, 1e-15);
  EXPECT_NEAR(r.deriv(1), -1.0, 1e-15);
  EXPECT_NEAR(r.deriv(2), 2.0, 1e-15);
  EXPECT_NEAR(r.deriv(3), -6.0, 1e-15);
}

TEST(IntPow, FirstPowerIsSameJet) {
  const Jet f = exp_jet(0.7, -0.5, 5, 2);
  const Jet p = f.int_pow(1);
  EXPECT_EQ(p.lo(), f.lo());
  for (int r = f.lo(); r <= f.hi(); ++r) EXPECT_EQ(p.deriv(r), f.deriv(r));
}

TEST(IntPow, CubeOfExp) {
  // (e^t)^3 = e^{3t}: derivatives 1, 3, 9
  const Jet f = exp_jet(1.0, 0.0, 2);
  const Jet p = f.int_pow(3);
  EXPECT_DOUBLE_EQ(p.deriv(0), 1.0);
  EXPECT_DOUBLE_EQ(p.deriv(1), 3.0);
  EXPECT_DOUBLE_EQ(p.deriv(2), 9.0);
}

TEST(IntPow, ReciprocalTimesSelfIsOne) {
  // j * (1/j) is the constant-one jet up to 1e-12 at the cancellation scale
  // of the Leibniz products (reciprocal entries of oscillatory jets grow
  // fast, so high orders cannot cancel below roundoff * magnitude)
  JetConfig cfg;
  cfg.order = 12;
  for (const Generator& g : {Generator(gen::Exponential{0.7}), Generator(gen::Cosine{1.0, 2.0, 0.3}),
                             Generator(gen::Gaussian{1.3, 0.0}), Generator(gen::Polynomial{{1.0, 1.0, 0.0, 1.0}})}) {
    for (double t0 : {-0.7, 0.1, 0.4}) {
      const Jet j = jet_from_generator(g, t0, cfg);
      const Jet inv = j.int_pow(-1);
      const Jet prod = j * inv;
      const Jet mag = abs_entries(j) * abs_entries(inv);
      EXPECT_NEAR(prod.deriv(0), 1.0, 1e-12) << g.describe();
      for (int r = 1; r <= prod.hi(); ++r)
        EXPECT_NEAR(prod.deriv(r), 0.0, 1e-12 * std::max(1.0, mag.deriv(r))) << g.describe() << " r=" << r;
    }
  }
  // random data under the same magnitude-scaled bound
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(8);
    for (double& x : v) x = u(rng);
    v[0] = 1.1 + 0.4 * u(rng);
    const Jet j(0.0, 0, v);
    const Jet inv = j.int_pow(-1);
    const Jet prod = j * inv;
    const Jet mag = abs_entries(j) * abs_entries(inv);
    EXPECT_NEAR(prod.deriv(0), 1.0, 1e-12);
    for (int r = 1; r <= prod.hi(); ++r)
      EXPECT_NEAR(prod.deriv(r), 0.0, 1e-12 * std::max(1.0, mag.deriv(r))) << "r=" << r;
  }
}

TEST(IntPow, ZeroPowerIsOne) {
  const Jet f = exp_jet(0.7, 0.0, 4);
  const Jet p = f.int_pow(0);
  EXPECT_DOUBLE_EQ(p.deriv(0), 1.0);
  for (int r = 1; r <= 4; ++r) EXPECT_DOUBLE_EQ(p.deriv(r), 0.0);
}

TEST(IntPow, SingularityDetected) {
  const Jet j(0.0, 0, {0.0, 1.0, 0.5});
  EXPECT_THROW(j.int_pow(-1), SingularityError);
  EXPECT_THROW(j.int_pow(-3), SingularityError);
}

TEST(Eval, ExponentialNearPoint) {
  const Jet j = exp_jet(1.0, 0.0, 10);
  EXPECT_NEAR(j.eval(0.1), std::exp(0.1), 1e-9);
}

TEST(Eval, AtExpansionPointReturnsValueTerm) {
  const Jet j = exp_jet(0.7, 0.4, 6);
  EXPECT_DOUBLE_EQ(j.eval(0.4), j.deriv(0));
}

TEST(Eval, PolynomialIsExactEverywhere) {
  JetConfig cfg;
  cfg.order = 3;
  const Jet j = jet_from_generator(Generator(gen::Polynomial{{1.0, 1.0}}), 0.0, cfg);
  EXPECT_DOUBLE_EQ(j.eval(2.0), 3.0);
}

TEST(ExtendDown, ZerosAndDeterministicRandom) {
  const Jet j = exp_jet(1.0, 0.0, 4);
  const Jet z = extend_down(j, -2);
  EXPECT_DOUBLE_EQ(z.deriv(-1), 0.0);
  EXPECT_DOUBLE_EQ(z.deriv(-2), 0.0);
  const NegativeFill fill{AntiderivPolicy::randomized, 99};
  const Jet r1 = extend_down(j, -3, fill);
  const Jet r2 = extend_down(j, -3, fill);
  for (int m = -3; m <= -1; ++m) EXPECT_EQ(r1.deriv(m), r2.deriv(m));
  EXPECT_NE(r1.deriv(-1), 0.0);
  // shallower extension agrees on the shared orders
  const Jet r3 = extend_down(j, -2, fill);
  EXPECT_EQ(r3.deriv(-1), r1.deriv(-1));
  EXPECT_EQ(r3.deriv(-2), r1.deriv(-2));
}

TEST(Construction, Validation) {
  EXPECT_THROW(Jet(0.0, 0, {}), std::invalid_argument);
  EXPECT_THROW(Jet(0.0, 0, {1.0, std::nan("")}), std::invalid_argument);
  JetConfig bad;
  bad.order = 0;
  EXPECT_THROW(jet_from_generator(Generator(gen::Exponential{1.0}), 0.0, bad), std::invalid_argument);
}

}  // namespace
