#ifndef BIHARM_QUAD_HPP
#define BIHARM_QUAD_HPP

// Double-exponential trapezoidal rule for integrals over t in (0, inf), the
// t-dependent polynomials Q_M and R_M of the tensor-product kernels, the
// one-dimensional integral form of B_n(e^{-|.|^2}) and the lattice weights
// a_k^{(M)}.
//
// The substitution is t = exp(a (s + e^s)), s = b (u - e^{-u}), so that
//   t(u)  = exp(ab (u - e^{-u}) + a exp(b (u - e^{-u})))
//   t'(u) = t(u) ab (1 + e^{-u}) (1 + exp(b (u - e^{-u})))
// and the trapezoidal nodes are u_s = tau * s.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "biharm/errors.hpp"
#include "biharm/kernels.hpp"
#include "biharm/specfun.hpp"

namespace biharm {

/// Relative size of the last node's contribution above which a quadrature
/// sum is declared truncated.
inline constexpr double kTailTolerance = 1e-16;

struct DETransform {
  double t;
  double tprime;
};

struct DELogTransform {
  double log_t;
  double log_tprime;
};

inline DELogTransform de_log_transform(double u, double a, double b) {
  const double w = u - std::exp(-u);
  const double bw = std::exp(b * w);
  const double log_t = a * b * w + a * bw;
  const double log_tprime = log_t + std::log(a * b) + std::log1p(std::exp(-u)) + std::log1p(bw);
  return {log_t, log_tprime};
}

/// t = Phi(u) and t' = Phi'(u). Values beyond the binary64 range come back as
/// +inf; DENode keeps the logarithms for such nodes.
inline DETransform de_transform(double u, double a, double b) {
  const auto lt = de_log_transform(u, a, b);
  return {std::exp(lt.log_t), std::exp(lt.log_tprime)};
}

/// One trapezoidal node of the transformed rule.
struct DENode {
  double u = 0.0;
  double t = 0.0;
  double log_t = 0.0;
  double log1p_t = 0.0;        // log(1 + t)
  double weight = 0.0;         // tau t t', the measure element of t dt
  double log_weight = 0.0;
  double dt_weight = 0.0;      // tau t', the measure element of dt
  double log_dt_weight = 0.0;
  double damp = 0.0;           // (1 + t)^{-1/2}
};

struct DEQuadrature {
  double a = 6.0;
  double b = 5.0;
  double tau = 0.003;
  std::int64_t s_begin = 0;
  std::int64_t s_end = 300;  // exclusive

  void validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !(tau > 0.0))
      throw DomainError("DEQuadrature: a, b and tau must be positive");
    if (!(s_begin < s_end)) throw DomainError("DEQuadrature: empty node range");
  }
  std::size_t size() const { return static_cast<std::size_t>(s_end - s_begin); }

  DENode node(std::int64_t s) const {
    DENode nd;
    nd.u = tau * static_cast<double>(s);
    const auto lt = de_log_transform(nd.u, a, b);
    nd.log_t = lt.log_t;
    nd.t = std::exp(lt.log_t);
    nd.log1p_t = lt.log_t > 36.0 ? lt.log_t + std::log1p(std::exp(-lt.log_t))
                                 : std::log1p(nd.t);
    nd.log_dt_weight = std::log(tau) + lt.log_tprime;
    nd.log_weight = nd.log_dt_weight + lt.log_t;
    nd.dt_weight = std::exp(nd.log_dt_weight);
    nd.weight = std::exp(nd.log_weight);
    nd.damp = std::exp(-0.5 * nd.log1p_t);
    return nd;
  }

  std::vector<DENode> nodes() const {
    validate();
    std::vector<DENode> out;
    out.reserve(size());
    for (std::int64_t s = s_begin; s < s_end; ++s) out.push_back(node(s));
    return out;
  }
};

namespace detail {

// Q_M or R_M in the scaled variable y = x / sqrt(1 + t), with inv = 1/(1 + t):
//   sum_{k<M} (-1)^k / (k! 4^k) inv^k P_{2k}(y)
// where P_{2k} = H_{2k} for Q and S_{2k}(y) = y^2 H_{2k} - 4k y H_{2k-1}
// + 2k(2k-1) H_{2k-2} for R.
struct HermitePolyKernel {
  int M;
  bool r_variant;
  double coeff[16];

  HermitePolyKernel(int order, double inv, bool use_r) : M(order), r_variant(use_r) {
    if (M > 16) throw DomainError("Q_M/R_M: order above 16 is not supported");
    double c = 1.0;
    for (int k = 0; k < M; ++k) {
      coeff[k] = c;
      c *= -inv / (4.0 * (k + 1));
    }
  }

  double operator()(double y) const {
    double hm2 = 0.0;    // H_{j-2}
    double hm1 = 0.0;    // H_{j-1}
    double hj = 1.0;     // H_j
    double sum = 0.0;
    for (int j = 0;; ++j) {
      if (j % 2 == 0) {
        const int k = j / 2;
        const double p =
            r_variant ? y * y * hj - 2.0 * j * y * hm1 + j * (j - 1.0) * hm2 : hj;
        sum += coeff[k] * p;
        if (k == M - 1) return sum;
      }
      const double next = 2.0 * y * hj - 2.0 * j * hm1;
      hm2 = hm1;
      hm1 = hj;
      hj = next;
    }
  }
};

inline double inv_one_plus(double t) { return std::isinf(t) ? 0.0 : 1.0 / (1.0 + t); }

}  // namespace detail

/// Q_M(x, t) = sum_{k<M} (-1)^k / (k! 4^k) (1+t)^{-k} H_{2k}(x / sqrt(1+t)).
inline double qm_poly(BasisOrder M, double x, double t) {
  if (!(t >= 0.0)) throw DomainError("qm_poly: t must be nonnegative");
  const double inv = detail::inv_one_plus(t);
  return detail::HermitePolyKernel(M.value, inv, false)(x * std::sqrt(inv));
}

/// R_M(x, t) = sum_{k<M} (-1)^k / (k! 4^k) (1+t)^{-k} S_{2k}(x / sqrt(1+t)).
inline double rm_poly(BasisOrder M, double x, double t) {
  if (!(t >= 0.0)) throw DomainError("rm_poly: t must be nonnegative");
  const double inv = detail::inv_one_plus(t);
  return detail::HermitePolyKernel(M.value, inv, true)(x * std::sqrt(inv));
}

namespace detail {

struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

inline void check_tail(double last, double total, const char* who) {
  if (std::abs(last) > kTailTolerance * std::abs(total))
    throw QuadratureDivergence(std::string(who) +
                               ": last quadrature node still contributes; extend the rule");
}

}  // namespace detail

/// B_n(e^{-|.|^2}) at |x| = r from its one-dimensional t-integral:
///   n >= 5:  (1/16) int_0^inf e^{-r^2/(1+t)} (1+t)^{-n/2} t dt
///   n = 3:  -(1/8)  int_0^inf e^{-r^2/(1+t)} ((1+t)^{-3/2} + t r^2 (1+t)^{-5/2}) dt
inline double integral_phi2(Dimension dim, double r, const DEQuadrature& rule) {
  if (dim.value == 4) throw UnsupportedDimension("integral_phi2: n = 4 has no t-integral form");
  if (!(r >= 0.0)) throw DomainError("integral_phi2: r must be nonnegative");
  const auto nodes = rule.nodes();
  const double y = r * r;
  const double half_n = dim.as_double() / 2.0;
  detail::KahanSum acc;
  double last = 0.0;
  for (const auto& nd : nodes) {
    const double gauss = -y * std::exp(-nd.log1p_t);
    double term;
    if (dim.value == 3) {
      term = std::exp(nd.log_dt_weight + gauss - 1.5 * nd.log1p_t) +
             y * std::exp(nd.log_weight + gauss - 2.5 * nd.log1p_t);
    } else {
      term = std::exp(nd.log_weight + gauss - half_n * nd.log1p_t);
    }
    acc.add(term);
    last = term;
  }
  detail::check_tail(last, acc.sum, "integral_phi2");
  return dim.value == 3 ? -acc.sum / 8.0 : acc.sum / 16.0;
}

/// Lattice weight
///   a_k^{(M)} = (pi D)^{-n/2} tau sum_s t_s t'_s (1+t_s)^{-n/2}
///               prod_j e^{-k_j^2 / (D (1+t_s))} Q_M(k_j / sqrt D, t_s).
/// The (1+t)^{-n/2} factor comes from rescaling the tensor kernel to the grid.
inline double tensor_weight(std::span<const std::int64_t> k, BasisOrder M, double D,
                            const DEQuadrature& rule, Dimension dim) {
  if (dim.value < 5) throw UnsupportedDimension("tensor_weight: requires n >= 5");
  if (static_cast<std::int64_t>(k.size()) != dim.value)
    throw DomainError("tensor_weight: index vector has wrong dimension");
  if (!(D > 0.0)) throw DomainError("tensor_weight: D must be positive");
  const auto nodes = rule.nodes();
  const double log_norm = -0.5 * std::log(std::numbers::pi * D);
  detail::KahanSum acc;
  double last = 0.0;
  for (const auto& nd : nodes) {
    const double inv = std::exp(-nd.log1p_t);
    const detail::HermitePolyKernel poly(M.value, inv, false);
    double log_mag = nd.log_weight;
    bool negative = false;
    for (const std::int64_t kj : k) {
      const double kd = static_cast<double>(kj);
      const double q = poly(kd / std::sqrt(D) * std::sqrt(inv));
      if (q == 0.0) {
        log_mag = -INFINITY;
        break;
      }
      negative ^= q < 0.0;
      log_mag += log_norm - 0.5 * nd.log1p_t - kd * kd * inv / D + std::log(std::abs(q));
    }
    const double term = negative ? -std::exp(log_mag) : std::exp(log_mag);
    acc.add(term);
    last = term;
  }
  detail::check_tail(last, acc.sum, "tensor_weight");
  return acc.sum;
}

}  // namespace biharm

#endif  // BIHARM_QUAD_HPP
