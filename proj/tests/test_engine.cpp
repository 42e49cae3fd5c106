#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "biharm/engine.hpp"
#include "biharm/verify.hpp"

using namespace biharm;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

DENode node_at_t(double t) {
  DENode nd;
  nd.t = t;
  nd.log_t = std::log(t);
  nd.log1p_t = std::log1p(t);
  return nd;
}

double symmetric_value(std::int64_t n, int M, std::int64_t step, std::int64_t k1, int threads = 1) {
  const GridSpec grid{1.0 / static_cast<double>(step)};
  return evaluate_symmetric(IsotropicGaussianPolyDensity::test_density(n), AxisPoint{k1}, grid,
                            BasisOrder(M), DEQuadrature{}, EvalOptions{threads})
      .value;
}

double generic_value(std::int64_t n, int M, std::int64_t step, const std::vector<std::int64_t>& k,
                     int threads = 1) {
  const GridSpec grid{1.0 / static_cast<double>(step)};
  const std::vector<std::vector<std::int64_t>> pts{k};
  return evaluate(build_test_density(Dimension(n), grid), pts, grid, BasisOrder(M), DEQuadrature{},
                  EvalOptions{threads})
      .front()
      .value;
}

}  // namespace

TEST(Conv1d, ZeroSamples) {
  const std::vector<double> zeros(41, 0.0);
  EXPECT_EQ(conv1d(zeros, -20, node_at_t(1.0), 5.0, BasisOrder(3), 0), 0.0);
}

TEST(Conv1d, SingleUnitSample) {
  std::vector<double> v(41, 0.0);
  v[20] = 1.0;
  const double t = 2.5;
  const double want = 1.0 / std::sqrt(std::numbers::pi * 5.0 * (1.0 + t));
  EXPECT_LE(rel(conv1d(v, -20, node_at_t(t), 5.0, BasisOrder(1), 0), want), 1e-15);
}

TEST(Conv1d, GaussianMatchesBruteForce) {
  const double h = 0.1, D = 5.0, t = 1.0;
  std::vector<double> v;
  for (int m = -65; m <= 65; ++m) v.push_back(std::exp(-(h * m) * (h * m)));
  long double brute = 0.0L;
  for (int m = -65; m <= 65; ++m) {
    const long double d = -m;
    brute += std::exp(-(h * m) * (h * m)) * std::exp(-static_cast<double>(d * d) / (D * (1.0 + t)));
  }
  brute /= std::sqrt(std::numbers::pi * D * (1.0 + t));
  EXPECT_LE(rel(conv1d(v, -65, node_at_t(t), D, BasisOrder(1), 0), static_cast<double>(brute)), 1e-15);
}

TEST(Conv1d, HigherOrderKernelsMatchPrintedPolynomials) {
  const double h = 0.1, D = 5.0;
  std::vector<double> v;
  for (int m = -65; m <= 65; ++m) v.push_back((h * m) * (h * m) * std::exp(-(h * m) * (h * m)));
  for (double t : {0.01, 1.0, 40.0})
    for (int M = 2; M <= 4; ++M)
      for (std::int64_t k : {0, 9, -13}) {
        // Scaled by the sum of absolute terms since the signed sums and the
        // printed polynomials both cancel.
        double q = 0.0, r = 0.0, qabs = 0.0, rabs = 0.0;
        for (int m = -65; m <= 65; ++m) {
          const double d = static_cast<double>(k - m);
          const double g = v[static_cast<std::size_t>(m + 65)] * std::exp(-d * d / (D * (1.0 + t)));
          const double pq = verify::fixtures::printed_q(M, d / std::sqrt(D), t);
          const double pr = verify::fixtures::printed_r(M, d / std::sqrt(D), t);
          q += g * pq;
          r += g * pr;
          qabs += std::abs(g * pq);
          rabs += std::abs(g * pr);
        }
        const double norm = 1.0 / std::sqrt(std::numbers::pi * D * (1.0 + t));
        EXPECT_LE(std::abs(conv1d(v, -65, node_at_t(t), D, BasisOrder(M), k) - norm * q), 1e-13 * norm * qabs);
        EXPECT_LE(std::abs(conv1d(v, -65, node_at_t(t), D, BasisOrder(M), k, Kernel1D::r) - norm * r),
                  1e-13 * norm * rabs);
      }
}

TEST(Conv1d, DetectsTruncatedSupport) {
  const std::vector<double> ones(21, 1.0);
  EXPECT_THROW(conv1d(ones, -10, node_at_t(1.0), 5.0, BasisOrder(1), 0), SupportTruncated);
  EXPECT_THROW(conv1d(ones, -10, node_at_t(1.0), -1.0, BasisOrder(1), 0), DomainError);
}

TEST(Evaluate, OracleEquivalenceWithDirectSum) {
  const std::vector<std::vector<std::int64_t>> coarse{
      {0, 0, 0, 0, 0}, {1, -2, 0, 3, 1}, {4, 0, 0, -1, 0}, {-3, 3, 2, 0, -1}, {0, 5, -5, 0, 2}};
  EXPECT_LE(verify::detail::tensor_vs_direct(GridSpec{0.2, 5.0, 2.2}, DEQuadrature{}, coarse), 1e-10);
  const std::vector<std::vector<std::int64_t>> fine{
      {0, 0, 0, 0, 0}, {2, -4, 0, 6, 1}, {8, 0, 0, -1, 0}, {-5, 5, 3, 0, -2}, {0, 9, -9, 0, 3}};
  EXPECT_LE(verify::detail::tensor_vs_direct(GridSpec{0.1, 5.0, 2.2}, DEQuadrature{}, fine), 1e-10);
}

TEST(Evaluate, FirstOrderMatchesClosedFormWeights) {
  // Origin of a unit sample: the tensor sum reduces to a single weight a_0.
  const GridSpec grid{0.1};
  SeparatedDensity d;
  d.n = 5;
  d.h = grid.h;
  d.m_first = -3;
  d.factors = {{0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0}};
  d.terms = {{1.0, std::vector<std::uint32_t>(5, 0)}};
  const std::vector<std::vector<std::int64_t>> pts{{0, 0, 0, 0, 0}};
  const double v = evaluate(d, pts, grid, BasisOrder(1), DEQuadrature{}).front().value;
  const double want = std::pow(grid.scale(), 4) / std::pow(std::numbers::pi * grid.D, 2.5) * phi2(Dimension(5), 0.0);
  EXPECT_LE(rel(v, want), 1e-12);
}

TEST(Evaluate, TableTwoAnchor) {
  const double err = std::abs(generic_value(5, 4, 20, {20, 0, 0, 0, 0}) - std::exp(-1.0));
  EXPECT_LE(rel(err, 0.70e-8), 0.05);
}

TEST(Evaluate, TableFourAnchor) {
  const double err = std::abs(generic_value(3, 4, 10, {10, 10, 10}) - std::exp(-3.0));
  EXPECT_LE(rel(err, 0.236e-6), 0.01);
}

TEST(Evaluate, ThreeDimensionalFirstOrderRate) {
  double prev = 0.0;
  for (std::int64_t step : {20, 40}) {
    const double err = std::abs(generic_value(3, 1, step, {step, step, step}) - std::exp(-3.0));
    if (prev > 0.0) {
      EXPECT_NEAR(std::log2(prev / err), 2.0, 0.05);
    }
    prev = err;
  }
}

TEST(Evaluate, PermutationAndSignSymmetry) {
  const GridSpec grid{0.1};
  const auto d = build_test_density(Dimension(5), grid);
  const std::vector<std::vector<std::int64_t>> pts{
      {7, -3, 0, 12, 1}, {12, 1, 7, 0, -3}, {-7, 3, 0, -12, -1}, {0, 12, -1, 3, 7}};
  const auto out = evaluate(d, pts, grid, BasisOrder(3), DEQuadrature{});
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_LE(rel(out[i].value, out[0].value), 1e-13);
}

TEST(Evaluate, DeterministicAcrossThreadCounts) {
  const std::vector<std::int64_t> k{10, 0, 0, 3, -2, 0};
  const double one = generic_value(6, 4, 10, k, 1);
  EXPECT_EQ(generic_value(6, 4, 10, k, 1), one);
  EXPECT_EQ(generic_value(6, 4, 10, k, 3), one);
  EXPECT_EQ(symmetric_value(50, 4, 20, 20, 1), symmetric_value(50, 4, 20, 20, 4));
}

TEST(Evaluate, LogDomainProductsMatchPlainAlgebra) {
  // n above the log-product threshold: a rank-one Gaussian evaluated generically
  // must equal the symmetric closed expression A1 A0^{n-1}.
  const std::int64_t n = 1500;
  const GridSpec grid{0.1};
  SeparatedDensity d;
  d.n = n;
  d.h = grid.h;
  d.m_first = -grid.half_width();
  d.factors = {detail::sample_line(grid, 0)};
  d.terms = {{1.0, std::vector<std::uint32_t>(n, 0)}};
  std::vector<std::int64_t> k(n, 0);
  k[0] = 10;
  const std::vector<std::vector<std::int64_t>> pts{k};
  const double generic = evaluate(d, pts, grid, BasisOrder(2), DEQuadrature{}).front().value;
  const double sym = evaluate_symmetric(IsotropicGaussianPolyDensity{1.0, 0.0, 0.0, n}, AxisPoint{10}, grid,
                                        BasisOrder(2), DEQuadrature{})
                         .value;
  EXPECT_LE(rel(generic, sym), 1e-11);
}

TEST(Evaluate, Errors) {
  const GridSpec grid{0.1};
  auto d = build_test_density(Dimension(5), grid);
  const std::vector<std::vector<std::int64_t>> bad{{0, 0, 0}};
  EXPECT_THROW(evaluate(d, bad, grid, BasisOrder(1), DEQuadrature{}), DomainError);
  EXPECT_THROW(evaluate(d, {}, GridSpec{0.2}, BasisOrder(1), DEQuadrature{}), DomainError);
  d.n = 4;
  for (auto& t : d.terms) t.factor.resize(4);
  const std::vector<std::vector<std::int64_t>> p4{{0, 0, 0, 0}};
  EXPECT_THROW(evaluate(d, p4, grid, BasisOrder(1), DEQuadrature{}), UnsupportedDimension);
  EXPECT_THROW(evaluate_symmetric(IsotropicGaussianPolyDensity::test_density(3), AxisPoint{0}, grid,
                                  BasisOrder(1), DEQuadrature{}),
               UnsupportedDimension);
  SeparatedDensity empty;
  empty.n = 5;
  EXPECT_THROW(empty.validate(), DomainError);
}

TEST(Symmetric, EqualsGenericPath) {
  for (std::int64_t n : {5, 6, 8})
    for (std::int64_t k1 : {0, 20, 40}) {
      std::vector<std::int64_t> k(static_cast<std::size_t>(n), 0);
      k[0] = k1;
      EXPECT_LE(rel(symmetric_value(n, 4, 20, k1), generic_value(n, 4, 20, k)), 1e-12)
          << "n = " << n << ", k1 = " << k1;
    }
  std::vector<std::int64_t> k(5, 0);
  k[0] = 40;
  EXPECT_LE(rel(symmetric_value(5, 4, 40, 40), generic_value(5, 4, 40, k)), 1e-12);
}

TEST(Symmetric, ConvergenceRatesApproachTwoM) {
  // Last rate measured while the error is still above 1e-12.
  for (int M = 1; M <= 4; ++M) {
    double prev = 0.0, last_rate = 0.0;
    for (std::int64_t step : {10, 20, 40, 80, 160}) {
      const double err = std::abs(symmetric_value(5, M, step, step) - std::exp(-1.0));
      if (prev > 1e-12 && err > 1e-12) last_rate = std::log2(prev / err);
      prev = err;
    }
    EXPECT_NEAR(last_rate, 2.0 * M, 0.15) << "M = " << M;
  }
}

TEST(Symmetric, HighDimensionalTableOneValue) {
  const double err = std::abs(symmetric_value(10000, 4, 40, 0) - 1.0);
  EXPECT_LE(rel(err, 0.258e-6), 0.02);
}

TEST(Saturation, FirstOrderD5MatchesLatticeSum) {
  const auto rep = saturation_epsilon0(BasisOrder(1), 5.0, 5, 3);
  double lattice = 0.0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c)
        for (int d = -3; d <= 3; ++d)
          for (int e = -3; e <= 3; ++e) {
            const int nu2 = a * a + b * b + c * c + d * d + e * e;
            if (nu2 > 0) lattice += std::exp(-std::numbers::pi * std::numbers::pi * 5.0 * nu2);
          }
  EXPECT_LE(rel(rep.epsilon0, lattice), 1e-12);
  EXPECT_LT(rep.epsilon0, 1e-19);
  EXPECT_NEAR(rep.epsilon0, 3.7e-21, 0.1e-21);
  EXPECT_GE(rep.epsilon0, 0.0);
  EXPECT_EQ(rep.cutoff, 3);
}

TEST(Saturation, LimitsAndBaseCase) {
  EXPECT_EQ(saturation_epsilon0(BasisOrder(4), 1e4, 5, 4).epsilon0, 0.0);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (int M = 1; M <= 4; ++M) {
    double want = 0.0;
    for (int m = 1; m <= 5; ++m) {
      const double z = pi2 * 5.0 * m * m;
      double poly = 0.0, term = 1.0;
      for (int k = 0; k < M; ++k) {
        poly += term;
        term *= z / (k + 1);
      }
      want += 2.0 * std::exp(-z) * poly;
    }
    EXPECT_LE(rel(saturation_epsilon0(BasisOrder(M), 5.0, 1, 5).epsilon0, want), 1e-14);
  }
  EXPECT_THROW(saturation_epsilon0(BasisOrder(1), 0.0, 5, 3), DomainError);
}

TEST(TestDensity, RankAndValues) {
  const GridSpec grid{0.1};
  EXPECT_EQ(build_test_density(Dimension(3), grid).rank(), 10u);
  const auto d5 = build_test_density(Dimension(5), grid);
  EXPECT_EQ(d5.rank(), 21u);
  const std::vector<std::int64_t> x1{10, 0, 0, 0, 0};
  EXPECT_LE(rel(d5.at(x1), 4.0 * std::exp(-1.0) * (5.0 * 7.0 - 4.0 * 7.0 + 4.0)), 1e-14);
  const std::vector<std::int64_t> origin(5, 0);
  EXPECT_EQ(d5.at(origin), 4.0 * 5.0 * 7.0);
  const auto iso = IsotropicGaussianPolyDensity::test_density(5);
  const std::vector<std::int64_t> pt{3, -7, 0, 12, 1};
  double r2 = 0.0;
  for (auto k : pt) r2 += (0.1 * k) * (0.1 * k);
  EXPECT_LE(rel(d5.at(pt), iso(r2)), 1e-13);
  EXPECT_THROW(build_test_density(Dimension(65), grid), RankBudgetExceeded);
}
