#ifndef BIHARM_VERIFY_HPP
#define BIHARM_VERIFY_HPP

// Self-verification suite run by `biharm --verify`. Each check compares a
// library result against an independent reference (frozen high-precision
// values, printed polynomials, brute-force sums, reference table entries)
// and reports the measured deviation next to its tolerance.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "biharm/engine.hpp"
#include "biharm/harness.hpp"
#include "biharm/kernels.hpp"
#include "biharm/quad.hpp"
#include "biharm/specfun.hpp"

namespace biharm::verify {

enum class Level { quick, full };

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// The printed closed forms of Q_M and R_M for M <= 4, written out term by
/// term in s = 1 + t.
namespace fixtures {

inline double printed_q(int M, double x, double t) {
  const double s = 1.0 + t;
  const double x2 = x * x;
  double q = 1.0;
  if (M >= 2) q += -x2 / (s * s) + 1.0 / (2.0 * s);
  if (M >= 3) q += x2 * x2 / (2.0 * std::pow(s, 4)) - 3.0 * x2 / (2.0 * std::pow(s, 3)) + 3.0 / (8.0 * s * s);
  if (M >= 4)
    q += -std::pow(x2, 3) / (6.0 * std::pow(s, 6)) + 5.0 * x2 * x2 / (4.0 * std::pow(s, 5)) -
         15.0 * x2 / (8.0 * std::pow(s, 4)) + 5.0 / (16.0 * std::pow(s, 3));
  return q;
}

inline double printed_r(int M, double x, double t) {
  const double s = 1.0 + t;
  const double x2 = x * x;
  double r = x2 / s;
  if (M >= 2) r += -x2 * x2 / std::pow(s, 3) + 5.0 * x2 / (2.0 * s * s) - 1.0 / (2.0 * s);
  if (M >= 3)
    r += std::pow(x2, 3) / (2.0 * std::pow(s, 5)) - 7.0 * x2 * x2 / (2.0 * std::pow(s, 4)) +
         39.0 * x2 / (8.0 * std::pow(s, 3)) - 3.0 / (4.0 * s * s);
  if (M >= 4)
    r += -std::pow(x2, 4) / (6.0 * std::pow(s, 7)) + 9.0 * std::pow(x2, 3) / (4.0 * std::pow(s, 6)) -
         65.0 * x2 * x2 / (8.0 * std::pow(s, 5)) + 125.0 * x2 / (16.0 * std::pow(s, 4)) -
         15.0 / (16.0 * std::pow(s, 3));
  return r;
}

// Scale used for the relative comparison: the sum of absolute values of the
// monomial terms, so points near a root of the polynomial do not inflate the
// measured deviation.
inline double printed_scale(int M, double x, double t) {
  const double s = 1.0 + t;
  const double a = x * x;
  double sc = 1.0 + a / s;
  for (int k = 1; k < M; ++k) sc += 3.0 * std::pow(1.0 + a, k + 1) / std::pow(s, k);
  return sc;
}

}  // namespace fixtures

/// B_n(e^{-|.|^2}) at n in {3, 5, 6, 7, 10, 100} and r in {0, 0.001, 0.5, 1,
/// 2, 4, 9}, from 40-digit arithmetic.
struct Phi2Reference {
  std::int64_t n;
  double values[7];
};
inline constexpr double kPhi2Radii[7] = {0.0, 0.001, 0.5, 1.0, 2.0, 4.0, 9.0};
inline constexpr Phi2Reference kPhi2Table[] = {
    {3, {-0.25, -0.250000083333325, -0.27033047528872278, -0.32604397995109042,
         -0.49846023716495397, -0.91392151684988982, -2.0063192895666605}},
    {5, {0.083333333333333333, 0.083333316666670238, 0.079379944164653105, 0.069668973373991834,
         0.048525007914956407, 0.026829135464470055, 0.012232727623276238}},
    {6, {0.03125, 0.031249989583335937, 0.028800783071404868, 0.022992465073215145,
         0.011790295464409118, 0.0036621094024744079, 0.00076207895137936290}},
    {7, {0.016666666666666667, 0.016666659523811508, 0.014998658575126180, 0.011150443459434373,
         0.0044143562374458139, 0.00078431951270506580, 7.4572643666165242e-05}},
    {10, {0.0052083333333333333, 0.0052083302083343750, 0.0044884870687501117,
          0.0029171158053665961, 0.00065820172797165499, 2.4795567213503798e-05,
          2.2649808797283305e-07}},
    {100, {2.6573129251700680e-05, 2.6573103741508854e-05, 2.0903657124890602e-05,
           1.0178539095814113e-05, 5.7477482988070697e-07, 6.3882278158837496e-12,
           1.6266587302614381e-34}},
};

namespace detail {

inline double rel_dev(double got, double want) {
  return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
}

// Factor-of-two agreement measured as |log2(got / want)|.
inline double log2_ratio(double got, double want) { return std::abs(std::log2(got / want)); }

// Rank-one density e^{-c |x|^2} sampled on the grid, together with the same
// function as a pointwise callable for the direct sum.
inline SeparatedDensity narrow_gaussian(const GridSpec& grid, double c, std::int64_t n) {
  SeparatedDensity dens;
  dens.n = n;
  dens.h = grid.h;
  dens.m_first = -grid.half_width();
  std::vector<double> line;
  for (std::int64_t m = -grid.half_width(); m <= grid.half_width(); ++m) {
    const double x = grid.h * static_cast<double>(m);
    line.push_back(std::exp(-c * x * x));
  }
  dens.factors = {line};
  dens.terms = {{1.0, std::vector<std::uint32_t>(static_cast<std::size_t>(n), 0)}};
  return dens;
}

struct NarrowGaussian {
  double c;
  double operator()(std::span<const double> x) const {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::exp(-c * r2);
  }
};

// Largest relative gap between evaluate() and direct_cubature() at the given
// grid points, n = 5, M = 1.
inline double tensor_vs_direct(const GridSpec& grid, const DEQuadrature& rule,
                               const std::vector<std::vector<std::int64_t>>& pts) {
  const double c = 10.0;
  const auto tensor = evaluate(narrow_gaussian(grid, c, 5), pts, grid, BasisOrder(1), rule);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> x;
    for (auto k : pts[i]) x.push_back(grid.h * static_cast<double>(k));
    const auto direct = direct_cubature(NarrowGaussian{c}, grid, BasisOrder(1), x, Dimension(5));
    worst = std::max(worst, rel_dev(tensor[i].value, direct.value));
  }
  return worst;
}

inline double table_abs_error(std::int64_t n, int M, std::int64_t step, double x1,
                              harness::PointKind point = harness::PointKind::axis) {
  harness::RunConfig cfg;
  cfg.dims = {n};
  cfg.orders = {M};
  cfg.steps = {step};
  cfg.x1 = {x1};
  cfg.point = point;
  return harness::run_table(cfg).front().abs_err;
}

}  // namespace detail

inline std::vector<CheckResult> run_verify(Level level) {
  std::vector<CheckResult> out;
  auto check = [&](std::string name, double tol, const std::function<double()>& measure) {
    CheckResult r;
    r.name = std::move(name);
    r.tolerance = tol;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.measured = measure();
      r.passed = std::isfinite(r.measured) && r.measured <= tol;
    } catch (const std::exception& e) {
      r.measured = NAN;
      r.passed = false;
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  };
  const DEQuadrature rule;

  check("specfun.erf(1) vs series reference", 2e-16,
        [] { return detail::rel_dev(specfun::erf(1.0), 0.8427007929497149); });
  check("specfun.E1(1) vs series reference", 2e-15,
        [] { return detail::rel_dev(specfun::exp_integral_e1(1.0), 0.21938393439552027); });
  check("specfun.gamma(1/2, x^2) = sqrt(pi) erf(x)", 1e-15, [] {
    const double x = 0.7;
    return detail::rel_dev(specfun::lower_incomplete_gamma(0.5, x * x),
                           std::sqrt(std::numbers::pi) * std::erf(x));
  });
  check("specfun.1F1 vs high-precision references", 1e-13, [] {
    struct Case { double a, c, z, v; };
    const Case cases[] = {{-0.5, 1.5, -1.0, 1.3041759198043617},
                          {0.3, 2.5, -7.5, 0.6281638413958348},
                          {1.7, 4.2, 9.1, 242.61667928739485},
                          {2.0, 5.5, -10.0, 0.09519295662801911}};
    double worst = 0.0;
    for (const auto& c : cases)
      worst = std::max(worst, detail::rel_dev(specfun::kummer_1f1(c.a, c.c, c.z), c.v));
    return worst;
  });
  check("kernels.phi2 vs high-precision table", 1e-13, [] {
    double worst = 0.0;
    for (const auto& row : kPhi2Table)
      for (int i = 0; i < 7; ++i)
        worst = std::max(worst, detail::rel_dev(phi2(Dimension(row.n), kPhi2Radii[i]), row.values[i]));
    return worst;
  });
  check("kernels.ladder difference identity", 1e-13, [] {
    double worst = 0.0;
    for (std::int64_t n : {3, 5, 6, 10})
      for (int M : {2, 3})
        for (double r : {0.0, 0.5, 1.0, 2.0}) {
          const double y = r * r;
          const double diff = phi2M(Dimension(n), BasisOrder(M + 1), r) -
                              phi2M(Dimension(n), BasisOrder(M), r);
          const double want = std::exp(-y) / 16.0 *
                              specfun::gen_laguerre(M - 2, static_cast<double>(n) / 2.0 - 1.0, y) /
                              ((M - 1.0) * M);
          worst = std::max(worst, std::abs(diff - want));
        }
    return worst;
  });
  check("quad.integral_phi2 vs closed form", 1e-11, [&] {
    double worst = 0.0;
    for (std::int64_t n : {3, 5, 6, 10, 100})
      for (double r : {0.0, 0.5, 1.0, 2.0, 4.0})
        worst = std::max(worst, detail::rel_dev(integral_phi2(Dimension(n), r, rule),
                                                phi2(Dimension(n), r)));
    return worst;
  });
  check("quad.Q_M/R_M vs printed polynomials", 1e-12, [] {
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> ux(-4.0, 4.0);
    std::uniform_real_distribution<double> ulogt(-6.0, 6.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double x = ux(gen);
      const double t = std::pow(10.0, ulogt(gen));
      for (int M = 1; M <= 4; ++M) {
        const double sc = fixtures::printed_scale(M, x, t);
        worst = std::max(worst, std::abs(qm_poly(BasisOrder(M), x, t) - fixtures::printed_q(M, x, t)) / sc);
        worst = std::max(worst, std::abs(rm_poly(BasisOrder(M), x, t) - fixtures::printed_r(M, x, t)) / sc);
      }
    }
    return worst;
  });
  check("quad.DE tail: last node share of the n = 5 integral", kTailTolerance, [&] {
    const auto nodes = rule.nodes();
    double total = 0.0;
    for (const auto& nd : nodes) total += std::exp(nd.log_weight - 2.5 * nd.log1p_t);
    return std::exp(nodes.back().log_weight - 2.5 * nodes.back().log1p_t) / total;
  });
  check("quad.DE self-consistency (tau halved, nodes doubled)", 1e-13, [&] {
    DEQuadrature fine = rule;
    fine.tau = rule.tau / 2.0;
    fine.s_end = 2 * rule.s_end;
    double worst = 0.0;
    for (std::int64_t n : {3, 5, 10})
      for (double r : {0.0, 1.0, 3.0})
        worst = std::max(worst, detail::rel_dev(integral_phi2(Dimension(n), r, rule),
                                                integral_phi2(Dimension(n), r, fine)));
    return worst;
  });
  check("engine.conv1d vs brute-force sum", 1e-14, [&] {
    const double h = 0.1;
    const double D = 5.0;
    const std::int64_t K = 65;
    std::vector<double> samples;
    for (std::int64_t m = -K; m <= K; ++m) samples.push_back(std::exp(-(h * m) * (h * m)));
    double worst = 0.0;
    for (std::int64_t s : {0, 100, 200}) {
      const auto nd = rule.node(s);
      for (int M = 1; M <= 4; ++M)
        for (std::int64_t k : {0, 7, -20}) {
          double brute = 0.0;
          for (std::int64_t m = -K; m <= K; ++m) {
            const double d = static_cast<double>(k - m);
            brute += samples[static_cast<std::size_t>(m + K)] * std::exp(-d * d / (D * (1.0 + nd.t))) *
                     fixtures::printed_q(M, d / std::sqrt(D), nd.t);
          }
          brute /= std::sqrt(std::numbers::pi * D * (1.0 + nd.t));
          worst = std::max(worst, detail::rel_dev(conv1d(samples, -K, nd, D, BasisOrder(M), k), brute));
        }
    }
    return worst;
  });
  check("engine.tensor vs direct cubature (n = 5, M = 1, h = 0.2)", 1e-10, [&] {
    return detail::tensor_vs_direct(GridSpec{0.2, 5.0, 2.2}, rule,
                                    {{0, 0, 0, 0, 0}, {3, -1, 0, 2, 5}});
  });
  check("engine.symmetric path vs generic path (n = 5, 6, 8)", 1e-12, [&] {
    const GridSpec grid{1.0 / 20.0};
    double worst = 0.0;
    for (std::int64_t n : {5, 6, 8}) {
      const auto iso = IsotropicGaussianPolyDensity::test_density(n);
      const double sym = evaluate_symmetric(iso, AxisPoint{20}, grid, BasisOrder(4), rule).value;
      std::vector<std::int64_t> k(static_cast<std::size_t>(n), 0);
      k[0] = 20;
      const std::vector<std::vector<std::int64_t>> pts{k};
      const double gen = evaluate(expand(iso, grid), pts, grid, BasisOrder(4), rule).front().value;
      worst = std::max(worst, detail::rel_dev(sym, gen));
    }
    return worst;
  });
  check("engine.saturation eps0(M = 1, D = 5, n = 5) vs lattice sum", 1e-12, [] {
    const auto rep = saturation_epsilon0(BasisOrder(1), 5.0, 5, 3);
    const double pi2D = std::numbers::pi * std::numbers::pi * 5.0;
    double lattice = 0.0;
    std::int64_t nu[5];
    for (std::int64_t idx = 0; idx < 16807; ++idx) {
      std::int64_t v = idx;
      double norm2 = 0.0;
      for (auto& c : nu) {
        c = v % 7 - 3;
        v /= 7;
        norm2 += static_cast<double>(c * c);
      }
      if (norm2 > 0.0) lattice += std::exp(-pi2D * norm2);
    }
    if (!(rep.epsilon0 < 1e-19)) return static_cast<double>(INFINITY);
    return detail::rel_dev(rep.epsilon0, lattice);
  });
  check("table 2: n = 5, M = 4, h = 1/20 within factor 2 of 0.70E-08", 1.0,
        [] { return detail::log2_ratio(detail::table_abs_error(5, 4, 20, 1.0), 0.70e-8); });
  check("table 4: n = 3, M = 4, h = 1/10 within factor 2 of 0.236E-06", 1.0, [] {
    return detail::log2_ratio(
        detail::table_abs_error(3, 4, 10, 1.0, harness::PointKind::diagonal), 0.236e-6);
  });
  check("table 1: n = 100, x1 = 2 relative error within factor 2 of 0.254E-08", 1.0, [] {
    return detail::log2_ratio(detail::table_abs_error(100, 4, 40, 2.0) / std::exp(-4.0), 0.254e-8);
  });

  if (level == Level::full) {
    check("table 1: n = 10^4, x1 = 0 relative error within factor 2 of 0.258E-06", 1.0,
          [] { return detail::log2_ratio(detail::table_abs_error(10000, 4, 40, 0.0), 0.258e-6); });
    check("table 3: n = 10^7, M = 4, h = 1/40 within factor 2 of 0.95E-04", 1.0, [] {
      return detail::log2_ratio(detail::table_abs_error(10000000, 4, 40, 1.0), 0.95e-4);
    });
    check("engine.tensor vs direct cubature (n = 5, M = 1, h = 0.1)", 1e-10, [&] {
      return detail::tensor_vs_direct(GridSpec{0.1, 5.0, 2.2}, rule, {{4, 0, -3, 1, 0}});
    });
  }
  return out;
}

}  // namespace biharm::verify

#endif  // BIHARM_VERIFY_HPP
