#ifndef BIHARM_ENGINE_HPP
#define BIHARM_ENGINE_HPP

// Separated-representation cubature of B_n f on grid points.
//
// For f = sum_p beta_p prod_j f_j^{(p)} the tensor-basis cubature at h k is
//
//   (h sqrt D)^4 / 16 * tau sum_p beta_p sum_s t_s t'_s prod_j sigma_j^{(p)}(k_j, s),
//
//   sigma(k, s) = (pi D (1+t_s))^{-1/2}
//                 sum_m f(h m) e^{-(k-m)^2 / (D (1+t_s))} Q_M((k-m)/sqrt D, t_s),
//
// so every n-dimensional sum collapses to one-dimensional convolutions. The
// normalization is carried per dimension to keep each factor O(1); products
// over very many dimensions are accumulated as sign plus log-magnitude.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "biharm/errors.hpp"
#include "biharm/kernels.hpp"
#include "biharm/quad.hpp"

namespace biharm {

/// Gaussian factor below which the 1-D kernel is cut: e^{-x} < 1e-18.
inline constexpr double kKernelCutoffExponent = 41.446531673892822;  // ln(1e18)
/// Largest relative weight of a boundary sample that conv1d accepts when the
/// kernel reaches past the sampled range. x^4 e^{-x^2} cut at |x| = 6.5 sits
/// near 1e-16 of the sum, so the limit leaves two digits of headroom.
inline constexpr double kSupportTolerance = 1e-14;
/// Past this dimension count per-node products go through logarithms.
inline constexpr std::int64_t kLogProductThreshold = 1000;

/// Rank-P sum of products of one-dimensional sampled functions.
///
/// Distinct 1-D sample vectors live once in `factors`; each term refers to
/// them by index, one index per dimension. All factors are sampled at h m for
/// m in [m_first, m_first + size).
struct SeparatedDensity {
  struct Term {
    double weight = 1.0;
    std::vector<std::uint32_t> factor;  // size n
  };

  std::int64_t n = 0;
  double h = 0.0;
  std::int64_t m_first = 0;
  std::vector<std::vector<double>> factors;
  std::vector<Term> terms;

  std::size_t rank() const { return terms.size(); }

  void validate() const {
    if (n < 3) throw DomainError("SeparatedDensity: n must be at least 3");
    if (terms.empty()) throw DomainError("SeparatedDensity: rank must be at least 1");
    if (factors.empty()) throw DomainError("SeparatedDensity: no factor samples");
    const std::size_t len = factors.front().size();
    for (const auto& f : factors)
      if (f.size() != len) throw DomainError("SeparatedDensity: factors must share the index range");
    for (const auto& t : terms) {
      if (static_cast<std::int64_t>(t.factor.size()) != n)
        throw DomainError("SeparatedDensity: term does not cover every dimension");
      for (auto idx : t.factor)
        if (idx >= factors.size()) throw DomainError("SeparatedDensity: factor index out of range");
    }
  }

  // Pointwise value at h m (m given per dimension); used by tests and the
  // direct-sum oracle.
  double at(std::span<const std::int64_t> m) const {
    double total = 0.0;
    for (const auto& t : terms) {
      double prod = t.weight;
      for (std::size_t j = 0; j < t.factor.size(); ++j) {
        const std::int64_t i = m[j] - m_first;
        if (i < 0 || i >= static_cast<std::int64_t>(factors[t.factor[j]].size())) {
          prod = 0.0;
          break;
        }
        prod *= factors[t.factor[j]][static_cast<std::size_t>(i)];
      }
      total += prod;
    }
    return total;
  }
};

/// Density e^{-|x|^2} (c0 + c1 |x|^2 + c2 |x|^4) on R^n.
struct IsotropicGaussianPolyDensity {
  double c0 = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  std::int64_t n = 5;

  /// 4 e^{-|x|^2} (n(n+2) - 4(n+2)|x|^2 + 4|x|^4), whose potential is e^{-|x|^2}.
  static IsotropicGaussianPolyDensity test_density(std::int64_t n) {
    const double nd = static_cast<double>(n);
    return {4.0 * nd * (nd + 2.0), -16.0 * (nd + 2.0), 16.0, n};
  }

  double operator()(double r2) const { return std::exp(-r2) * (c0 + r2 * (c1 + r2 * c2)); }
};

/// Evaluation point (k_1, 0, ..., 0) in grid indices.
struct AxisPoint {
  std::int64_t k1 = 0;
};

struct SaturationReport {
  double D = 0.0;
  int M = 1;
  double epsilon0 = 0.0;
  std::int64_t cutoff = 0;
};

enum class Kernel1D { q, r };

/// Per-dimension normalized discrete convolution sigma(k, t_s) with kernel
/// Q_M (or R_M when `kind` is Kernel1D::r). `samples[i]` is f(h (m_first + i)).
inline double conv1d(std::span<const double> samples, std::int64_t m_first, const DENode& node,
                     double D, BasisOrder M, std::int64_t k, Kernel1D kind = Kernel1D::q) {
  if (!(D > 0.0)) throw DomainError("conv1d: D must be positive");
  if (samples.empty()) return 0.0;
  const double inv = std::exp(-node.log1p_t);  // 1/(1+t)
  const double gauss_scale = inv / D;
  const double arg_scale = std::sqrt(inv / D);
  const detail::HermitePolyKernel poly(M.value, inv, kind == Kernel1D::r);

  const std::int64_t m_last = m_first + static_cast<std::int64_t>(samples.size()) - 1;
  const double width = std::sqrt(kKernelCutoffExponent / gauss_scale);
  std::int64_t lo = m_first;
  std::int64_t hi = m_last;
  bool clipped_lo = true;
  bool clipped_hi = true;
  if (std::isfinite(width) && width < 4e18) {
    const auto w = static_cast<std::int64_t>(std::floor(width));
    if (k - w > m_first) { lo = k - w; clipped_lo = false; }
    if (k + w < m_last) { hi = k + w; clipped_hi = false; }
  }
  if (lo > hi) return 0.0;

  double sum = 0.0;
  double abs_sum = 0.0;
  double edge_lo = 0.0;
  double edge_hi = 0.0;
  for (std::int64_t m = lo; m <= hi; ++m) {
    const double f = samples[static_cast<std::size_t>(m - m_first)];
    if (f == 0.0) continue;
    const double d = static_cast<double>(k - m);
    const double term = f * std::exp(-d * d * gauss_scale) * poly(d * arg_scale);
    sum += term;
    abs_sum += std::abs(term);
    if (m == m_first) edge_lo = term;
    if (m == m_last) edge_hi = term;
  }
  // The kernel reaches past the sampled range: the samples must have decayed.
  if ((clipped_lo && std::abs(edge_lo) > kSupportTolerance * abs_sum) ||
      (clipped_hi && std::abs(edge_hi) > kSupportTolerance * abs_sum))
    throw SupportTruncated("conv1d: kernel support exceeds the sampled range at k = " +
                           std::to_string(k));
  const double norm = std::exp(-0.5 * (std::log(std::numbers::pi * D) + node.log1p_t));
  return norm * sum;
}

namespace detail {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// handled by exactly one worker, so results written per index do not depend
// on the thread count.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Sign and log-magnitude of a product, for dimension counts where the plain
// product under- or overflows.
struct SignedLog {
  double log_mag = 0.0;
  bool negative = false;

  void mul(double v) {
    if (v == 0.0) {
      log_mag = -INFINITY;
      return;
    }
    negative ^= v < 0.0;
    log_mag += std::log(std::abs(v));
  }
  void mul_pow(double v, double p) {
    if (v == 0.0) {
      log_mag = p > 0.0 ? -INFINITY : log_mag;
      return;
    }
    if (v < 0.0 && std::fmod(p, 2.0) != 0.0) negative = !negative;
    log_mag += p * std::log(std::abs(v));
  }
  double value() const { return negative ? -std::exp(log_mag) : std::exp(log_mag); }
};

inline void check_grid_matches(const SeparatedDensity& density, const GridSpec& grid) {
  if (std::abs(density.h - grid.h) > 1e-12 * grid.h)
    throw DomainError("evaluate: density was sampled with a different grid step");
}

}  // namespace detail

struct EvalOptions {
  int threads = 1;
};

/// Tensor-basis cubature of B_n f at grid points h k (each k has n entries).
/// Supports n = 3 and n >= 5.
inline std::vector<PotentialSample> evaluate(const SeparatedDensity& density,
                                             std::span<const std::vector<std::int64_t>> points,
                                             const GridSpec& grid, BasisOrder M,
                                             const DEQuadrature& rule, EvalOptions opts = {}) {
  density.validate();
  grid.validate();
  detail::check_grid_matches(density, grid);
  const std::int64_t n = density.n;
  if (n == 4) throw UnsupportedDimension("evaluate: n = 4 has no separated t-integral form");
  const bool three_d = n == 3;
  const bool use_log = n > kLogProductThreshold;
  const auto nodes = rule.nodes();
  const std::size_t S = nodes.size();
  const double scale4 = std::pow(grid.scale(), 4);

  std::vector<PotentialSample> out;
  out.reserve(points.size());
  for (const auto& k : points) {
    if (static_cast<std::int64_t>(k.size()) != n)
      throw DomainError("evaluate: evaluation point has wrong dimension");

    // One sigma table per distinct (factor, k_j) pair.
    std::map<std::pair<std::uint32_t, std::int64_t>, std::size_t> slot_of;
    std::vector<std::pair<std::uint32_t, std::int64_t>> slots;
    std::vector<std::vector<std::size_t>> term_slots(density.terms.size());
    for (std::size_t p = 0; p < density.terms.size(); ++p) {
      const auto& term = density.terms[p];
      term_slots[p].resize(static_cast<std::size_t>(n));
      for (std::size_t j = 0; j < term.factor.size(); ++j) {
        const auto key = std::make_pair(term.factor[j], k[j]);
        auto [it, inserted] = slot_of.emplace(key, slots.size());
        if (inserted) slots.push_back(key);
        term_slots[p][j] = it->second;
      }
    }
    std::vector<double> sigma_q(slots.size() * S);
    std::vector<double> sigma_r(three_d ? slots.size() * S : 0);
    detail::parallel_for(slots.size() * S, opts.threads, [&](std::size_t idx) {
      const std::size_t slot = idx / S;
      const std::size_t s = idx % S;
      const auto& samples = density.factors[slots[slot].first];
      sigma_q[idx] = conv1d(samples, density.m_first, nodes[s], grid.D, M, slots[slot].second);
      if (three_d)
        sigma_r[idx] = conv1d(samples, density.m_first, nodes[s], grid.D, M, slots[slot].second,
                              Kernel1D::r);
    });

    detail::KahanSum total;
    std::vector<double> last_node(density.terms.size());
    for (std::size_t p = 0; p < density.terms.size(); ++p) {
      const auto& ts = term_slots[p];
      detail::KahanSum acc;
      double last = 0.0;
      for (std::size_t s = 0; s < S; ++s) {
        double contrib;
        if (three_d) {
          const double a0 = sigma_q[ts[0] * S + s];
          const double a1 = sigma_q[ts[1] * S + s];
          const double a2 = sigma_q[ts[2] * S + s];
          const double r_part = sigma_r[ts[0] * S + s] * a1 * a2 +
                                a0 * sigma_r[ts[1] * S + s] * a2 +
                                a0 * a1 * sigma_r[ts[2] * S + s];
          contrib = nodes[s].dt_weight * a0 * a1 * a2 + nodes[s].weight * r_part;
        } else if (use_log) {
          detail::SignedLog prod{nodes[s].log_weight, false};
          for (const auto slot : ts) prod.mul(sigma_q[slot * S + s]);
          contrib = prod.value();
        } else {
          double prod = 1.0;
          for (const auto slot : ts) prod *= sigma_q[slot * S + s];
          contrib = prod == 0.0 ? 0.0 : nodes[s].weight * prod;
        }
        acc.add(contrib);
        last = contrib;
      }
      last_node[p] = density.terms[p].weight * last;
      total.add(density.terms[p].weight * acc.sum);
    }
    double tail = 0.0;
    for (double v : last_node) tail += v;
    detail::check_tail(tail, total.sum, "evaluate");

    PotentialSample sample;
    sample.point.resize(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) sample.point[j] = grid.h * static_cast<double>(k[j]);
    sample.value = three_d ? -scale4 / 8.0 * total.sum : scale4 / 16.0 * total.sum;
    sample.method = Method::tensor;
    sample.M = M.value;
    sample.h = grid.h;
    sample.D = grid.D;
    out.push_back(std::move(sample));
  }
  return out;
}

namespace detail {

inline std::vector<double> sample_line(const GridSpec& grid, int power) {
  const std::int64_t K = grid.half_width();
  std::vector<double> v(static_cast<std::size_t>(2 * K + 1));
  for (std::int64_t m = -K; m <= K; ++m) {
    const double x = grid.h * static_cast<double>(m);
    const double x2 = x * x;
    v[static_cast<std::size_t>(m + K)] = std::pow(x2, power / 2) * std::exp(-x2);
  }
  return v;
}

}  // namespace detail

/// Maximum dimension for which isotropic densities are expanded into an
/// explicit separated representation (rank grows like n^2 / 2).
inline constexpr std::int64_t kMaxExpandedDimension = 64;

/// Rank-expanded form of e^{-|x|^2} (c0 + c1 |x|^2 + c2 |x|^4) with factors
/// e^{-x^2}, x^2 e^{-x^2}, x^4 e^{-x^2}, using
/// |x|^4 = sum_j x_j^4 + 2 sum_{i<j} x_i^2 x_j^2.
inline SeparatedDensity expand(const IsotropicGaussianPolyDensity& dens, const GridSpec& grid,
                               std::int64_t max_dimension = kMaxExpandedDimension) {
  grid.validate();
  const std::int64_t n = dens.n;
  if (n < 3) throw DomainError("expand: n must be at least 3");
  if (n > max_dimension)
    throw RankBudgetExceeded("expand: n = " + std::to_string(n) +
                             " exceeds the rank budget; use evaluate_symmetric");
  SeparatedDensity out;
  out.n = n;
  out.h = grid.h;
  out.m_first = -grid.half_width();
  out.factors = {detail::sample_line(grid, 0), detail::sample_line(grid, 2),
                 detail::sample_line(grid, 4)};
  const auto nn = static_cast<std::size_t>(n);
  auto base = [&] { return std::vector<std::uint32_t>(nn, 0); };
  if (dens.c0 != 0.0) out.terms.push_back({dens.c0, base()});
  if (dens.c1 != 0.0) {
    for (std::size_t i = 0; i < nn; ++i) {
      auto f = base();
      f[i] = 1;
      out.terms.push_back({dens.c1, std::move(f)});
    }
  }
  if (dens.c2 != 0.0) {
    for (std::size_t i = 0; i < nn; ++i) {
      auto f = base();
      f[i] = 2;
      out.terms.push_back({dens.c2, std::move(f)});
    }
    for (std::size_t i = 0; i < nn; ++i) {
      for (std::size_t j = i + 1; j < nn; ++j) {
        auto f = base();
        f[i] = 1;
        f[j] = 1;
        out.terms.push_back({2.0 * dens.c2, std::move(f)});
      }
    }
  }
  if (out.terms.empty()) out.terms.push_back({0.0, base()});
  return out;
}

/// Separated representation of the benchmark density
/// 4 e^{-|x|^2} (n(n+2) - 4(n+2)|x|^2 + 4|x|^4); rank 1 + 2n + n(n-1)/2.
inline SeparatedDensity build_test_density(Dimension dim, const GridSpec& grid) {
  return expand(IsotropicGaussianPolyDensity::test_density(dim.value), grid);
}

/// Same value as evaluate() on expand(density) at (k1, 0, ..., 0), in time
/// independent of n. All dimensions but the first see the same three 1-D sums
///   A = sigma[e^{-x^2}], B = sigma[x^2 e^{-x^2}], C = sigma[x^4 e^{-x^2}],
/// so the rank-expanded product collapses to A0^{n-3} times
///   c0 A1 A0^2 + c1 (B1 A0^2 + (n-1) A1 B0 A0)
///   + c2 (C1 A0^2 + (n-1) A1 C0 A0 + 2 (n-1) B1 B0 A0 + (n-1)(n-2) A1 B0^2),
/// with index 1 for the first axis and 0 for the others.
inline PotentialSample evaluate_symmetric(const IsotropicGaussianPolyDensity& density,
                                          AxisPoint point, const GridSpec& grid, BasisOrder M,
                                          const DEQuadrature& rule, EvalOptions opts = {}) {
  grid.validate();
  const std::int64_t n = density.n;
  if (n < 5) throw UnsupportedDimension("evaluate_symmetric: requires n >= 5");
  const auto nodes = rule.nodes();
  const std::size_t S = nodes.size();
  const std::int64_t K = grid.half_width();
  const std::vector<double> lines[3] = {detail::sample_line(grid, 0), detail::sample_line(grid, 2),
                                        detail::sample_line(grid, 4)};

  // table[(line * 2 + on_axis) * S + s]
  std::vector<double> table(6 * S);
  detail::parallel_for(6 * S, opts.threads, [&](std::size_t idx) {
    const std::size_t s = idx % S;
    const std::size_t which = idx / S;
    const std::int64_t k = (which % 2 == 1) ? point.k1 : 0;
    table[idx] = conv1d(lines[which / 2], -K, nodes[s], grid.D, M, k);
  });

  const double nd = static_cast<double>(n);
  const double nm1 = nd - 1.0;
  const double nm2 = nd - 2.0;
  detail::KahanSum acc;
  double last = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    const double A0 = table[0 * S + s], A1 = table[1 * S + s];
    const double B0 = table[2 * S + s], B1 = table[3 * S + s];
    const double C0 = table[4 * S + s], C1 = table[5 * S + s];
    const double A0sq = A0 * A0;
    const double E = density.c0 * A1 * A0sq + density.c1 * (B1 * A0sq + nm1 * A1 * B0 * A0) +
                     density.c2 * (C1 * A0sq + nm1 * A1 * C0 * A0 + 2.0 * nm1 * B1 * B0 * A0 +
                                   nm1 * nm2 * A1 * B0 * B0);
    detail::SignedLog prod{nodes[s].log_weight, false};
    prod.mul_pow(A0, nd - 3.0);
    prod.mul(E);
    const double contrib = prod.value();
    acc.add(contrib);
    last = contrib;
  }
  detail::check_tail(last, acc.sum, "evaluate_symmetric");

  PotentialSample sample;
  sample.point = {grid.h * static_cast<double>(point.k1)};
  sample.value = std::pow(grid.scale(), 4) / 16.0 * acc.sum;
  sample.method = Method::tensor_symmetric;
  sample.M = M.value;
  sample.h = grid.h;
  sample.D = grid.D;
  return sample;
}

/// Saturation number eps_0(D) of the tensor generating function of order 2M:
///   eps_0 = sum_{nu in Z^n \ 0} prod_j g(sqrt D nu_j) = S^n - 1,
///   S = sum_{|m| <= cutoff} g(sqrt D m),
///   g(xi) = e^{-pi^2 xi^2} sum_{k<M} (pi^2 xi^2)^k / k!,
/// g being the Fourier transform of one tensor factor (g(0) = 1).
inline SaturationReport saturation_epsilon0(BasisOrder M, double D, std::int64_t n,
                                            std::int64_t cutoff) {
  if (!(D > 0.0)) throw DomainError("saturation_epsilon0: D must be positive");
  if (n < 1) throw DomainError("saturation_epsilon0: n must be positive");
  if (cutoff < 1) throw DomainError("saturation_epsilon0: cutoff must be positive");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double tail = 0.0;  // S - 1
  for (std::int64_t m = cutoff; m >= 1; --m) {
    const double z = pi2 * D * static_cast<double>(m * m);
    double poly = 0.0;
    double term = 1.0;
    for (int k = 0; k < M.value; ++k) {
      poly += term;
      term *= z / (k + 1);
    }
    tail += 2.0 * std::exp(-z) * poly;
  }
  const double eps = std::expm1(static_cast<double>(n) * std::log1p(tail));
  return {D, M.value, eps, cutoff};
}

}  // namespace biharm

#endif  // BIHARM_ENGINE_HPP
