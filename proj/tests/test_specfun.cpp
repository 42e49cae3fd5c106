#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "biharm/specfun.hpp"

using namespace biharm;
using namespace biharm::specfun;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST(Erf, ReferenceValue) { EXPECT_LE(rel(specfun::erf(1.0), 0.8427007929497149), 2e-16); }

TEST(Erf, OddAndZero) {
  EXPECT_EQ(specfun::erf(0.0), 0.0);
  EXPECT_EQ(specfun::erf(1.3), -specfun::erf(-1.3));
}

TEST(Erf, BoundedAndMonotone) {
  double prev = -1.0;
  for (int i = -400; i <= 400; ++i) {
    const double v = specfun::erf(i * 0.02);
    EXPECT_LE(std::abs(v), 1.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(ExpIntegral, ReferenceValues) {
  EXPECT_LE(rel(exp_integral_e1(1.0), 0.21938393439552027), 2e-15);
  EXPECT_LE(rel(exp_integral_e1(5.0), 0.0011482955912753257), 1e-14);
  EXPECT_LE(rel(exp_integral_e1(1e-8), 17.843465089050833), 1e-15);
}

TEST(ExpIntegral, BracketingBound) {
  const double x = 5.0;
  const double v = exp_integral_e1(x);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, std::exp(-x) / x);
}

TEST(ExpIntegral, SmallArgumentExpansion) {
  EXPECT_NEAR(exp_integral_e1(1e-8), -std::numbers::egamma - std::log(1e-8), 1e-7);
}

TEST(ExpIntegral, ContinuousAcrossBranchPoint) {
  const double below = exp_integral_e1(std::nextafter(1.0, 0.0));
  const double above = exp_integral_e1(std::nextafter(1.0, 2.0));
  EXPECT_LE(rel(below, above), 1e-14);
}

TEST(ExpIntegral, RejectsNonPositive) {
  EXPECT_THROW(exp_integral_e1(0.0), DomainError);
  EXPECT_THROW(exp_integral_e1(-1.0), DomainError);
  EXPECT_THROW(exp_integral_e1(NAN), DomainError);
}

TEST(IncompleteGamma, HalfOrderIsErf) {
  const double x = 0.7;
  EXPECT_LE(rel(lower_incomplete_gamma(0.5, x * x), std::sqrt(std::numbers::pi) * std::erf(x)), 1e-15);
}

TEST(IncompleteGamma, IntegerOrderClosedForm) {
  // (k-1)! (1 - e^{-x} sum_{j<k} x^j / j!) with k = 3, x = 2
  const double x = 2.0;
  const double closed = 2.0 * (1.0 - std::exp(-x) * (1.0 + x + x * x / 2.0));
  EXPECT_LE(rel(lower_incomplete_gamma(3.0, x), closed), 1e-15);
  EXPECT_LE(rel(lower_incomplete_gamma(3.0, x), 0.6466471676338731), 1e-15);
}

TEST(IncompleteGamma, ReferenceValues) {
  EXPECT_LE(rel(lower_incomplete_gamma(0.5, 0.49), 1.2013713361654885), 1e-15);
  EXPECT_LE(rel(lower_incomplete_gamma(2.5, 10.0), 1.3276790708673576), 1e-15);
  EXPECT_LE(rel(lower_incomplete_gamma(7.3, 3.1), 36.93040143401183), 1e-14);
  EXPECT_LE(rel(lower_incomplete_gamma(0.2, 40.0), 4.590843711998803), 1e-15);
}

TEST(IncompleteGamma, ZeroAndLimit) {
  EXPECT_EQ(lower_incomplete_gamma(2.0, 0.0), 0.0);
  EXPECT_LE(rel(lower_incomplete_gamma(0.5, 36.0) / std::sqrt(std::numbers::pi), 1.0), 1e-15);
}

TEST(IncompleteGamma, MonotoneInX) {
  for (double a : {0.5, 1.5, 4.0}) {
    double prev = 0.0;
    for (int i = 1; i <= 300; ++i) {
      const double v = lower_incomplete_gamma(a, 0.1 * i);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(IncompleteGamma, QuotientMatchesQuotient) {
  for (double a : {0.5, 1.5, 3.5, 49.0})
    for (double x : {0.01, 0.5, 2.0, 30.0, 60.0})
      EXPECT_LE(rel(gamma_quotient(a, x), lower_incomplete_gamma(a, x) / std::pow(x, a)), 1e-13)
          << "a = " << a << ", x = " << x;
  EXPECT_EQ(gamma_quotient(2.5, 0.0), 1.0 / 2.5);
}

TEST(IncompleteGamma, RejectsBadArguments) {
  EXPECT_THROW(lower_incomplete_gamma(0.0, 1.0), DomainError);
  EXPECT_THROW(lower_incomplete_gamma(-1.0, 1.0), DomainError);
  EXPECT_THROW(lower_incomplete_gamma(1.0, -1.0), DomainError);
}

TEST(Kummer, ReferenceValues) {
  EXPECT_LE(rel(kummer_1f1(-0.5, 1.5, -1.0), 1.3041759198043617), 1e-15);
  EXPECT_LE(rel(kummer_1f1(0.5, 1.5, -1.0), 0.7468241328124270), 1e-15);
  EXPECT_LE(rel(kummer_1f1(0.3, 2.5, -7.5), 0.6281638413958348), 1e-14);
  EXPECT_LE(rel(kummer_1f1(1.7, 4.2, 9.1), 242.61667928739485), 1e-14);
  EXPECT_LE(rel(kummer_1f1(-1.3, 1.5, -3.2), 4.218299668598084), 1e-14);
  EXPECT_LE(rel(kummer_1f1(2.0, 5.5, -10.0), 0.09519295662801911), 1e-14);
}

TEST(Kummer, ErfSpecialCase) {
  // 1F1(1/2; 3/2; -x^2) = sqrt(pi) erf(x) / (2x)
  for (double x : {0.1, 1.0, 3.0}) {
    const double want = std::sqrt(std::numbers::pi) * std::erf(x) / (2.0 * x);
    EXPECT_LE(rel(kummer_1f1(0.5, 1.5, -x * x), want), 1e-14);
  }
}

TEST(Kummer, TransformationIdentity) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> ua(-2.0, 3.0), uc(0.5, 6.0), uz(0.0, 15.0);
  for (int i = 0; i < 50; ++i) {
    const double a = ua(gen), c = uc(gen), z = uz(gen);
    const double lhs = kummer_1f1(a, c, z);
    const double rhs = std::exp(z) * kummer_1f1(c - a, c, -z);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)))
        << "a = " << a << ", c = " << c << ", z = " << z;
  }
}

TEST(Kummer, Errors) {
  EXPECT_THROW(kummer_1f1(1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(kummer_1f1(1.0, -2.0, 1.0), DomainError);
  EXPECT_THROW(kummer_1f1(1.0, 2.0, 800.0), DomainError);
  EXPECT_THROW(kummer_1f1(1.0, 2.0, 50.0, EvalAccuracy{1e-15, 5}), NonConvergence);
  EXPECT_EQ(kummer_1f1(1.0, 2.0, 0.0), 1.0);
}

TEST(Hermite, LowDegrees) {
  const double x = 0.37;
  EXPECT_EQ(hermite(0, x), 1.0);
  EXPECT_DOUBLE_EQ(hermite(1, x), 2 * x);
  EXPECT_DOUBLE_EQ(hermite(2, x), 4 * x * x - 2);
  EXPECT_DOUBLE_EQ(hermite(3, x), 8 * x * x * x - 12 * x);
  EXPECT_THROW(hermite(-1, x), DomainError);
}

TEST(Hermite, DerivativeIdentity) {
  // H_k'(x) = 2k H_{k-1}(x), checked with a central difference
  const double step = 1e-5;
  for (int k = 1; k <= 8; ++k)
    for (double x : {-1.2, 0.3, 2.1}) {
      const double fd = (hermite(k, x + step) - hermite(k, x - step)) / (2 * step);
      EXPECT_NEAR(fd, 2.0 * k * hermite(k - 1, x), 1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST(Laguerre, MatchesBinomialSum) {
  // L_k^{(g)}(y) = sum_j (-1)^j binom(k + g, k - j) y^j / j!
  auto binom = [](double top, int bottom) {
    double v = 1.0;
    for (int i = 0; i < bottom; ++i) v *= (top - i) / (i + 1);
    return v;
  };
  for (int k = 0; k <= 6; ++k)
    for (double g : {0.0, 1.5, 4.0})
      for (double y : {0.0, 0.5, 2.0, 5.0}) {
        double sum = 0.0, fact = 1.0, ypow = 1.0;
        for (int j = 0; j <= k; ++j) {
          sum += ((j % 2) ? -1.0 : 1.0) * binom(k + g, k - j) * ypow / fact;
          ypow *= y;
          fact *= j + 1;
        }
        EXPECT_NEAR(gen_laguerre(k, g, y), sum, 1e-12 * std::max(1.0, std::abs(sum)));
      }
  EXPECT_DOUBLE_EQ(gen_laguerre(2, 0.0, 1.0), -0.5);
  EXPECT_THROW(gen_laguerre(1, -1.0, 0.0), DomainError);
}

TEST(EvalAccuracyTest, Validation) {
  EXPECT_THROW((EvalAccuracy{0.0, 10}.validate()), DomainError);
  EXPECT_THROW((EvalAccuracy{1e-15, 0}.validate()), DomainError);
  EXPECT_NO_THROW(EvalAccuracy{}.validate());
}
