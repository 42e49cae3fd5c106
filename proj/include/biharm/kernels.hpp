#ifndef BIHARM_KERNELS_HPP
#define BIHARM_KERNELS_HPP

// Closed-form biharmonic potentials of the radial generating functions
// e^{-|x|^2} L_{M-1}^{(n/2)}(|x|^2) and the direct lattice-sum cubature built
// on them. The direct sum is exponential in n and is meant as an oracle for
// the separated (tensor) engine at small n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "biharm/errors.hpp"
#include "biharm/specfun.hpp"

namespace biharm {

/// Space dimension n >= 3.
struct Dimension {
  std::int64_t value;

  constexpr explicit Dimension(std::int64_t n) : value(n) {
    if (n < 3) throw DomainError("Dimension: n must be at least 3");
  }
  constexpr double as_double() const { return static_cast<double>(value); }
  friend constexpr bool operator==(Dimension, Dimension) = default;
};

/// Approximation order 2M of the generating function.
struct BasisOrder {
  int value;

  constexpr explicit BasisOrder(int m) : value(m) {
    if (m < 1) throw DomainError("BasisOrder: M must be at least 1");
  }
  friend constexpr bool operator==(BasisOrder, BasisOrder) = default;
};

/// Uniform grid step h, shape parameter D and density truncation radius.
struct GridSpec {
  double h;
  double D = 5.0;
  double radius = 6.5;

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("GridSpec: h must be positive");
    if (!(D > 0.0) || !std::isfinite(D)) throw DomainError("GridSpec: D must be positive");
    if (!(radius > 0.0)) throw DomainError("GridSpec: radius must be positive");
  }
  // Largest index m with |h m| <= radius.
  std::int64_t half_width() const {
    return static_cast<std::int64_t>(std::floor(radius / h * (1.0 + 1e-12)));
  }
  double scale() const { return h * std::sqrt(D); }
};

enum class Method { closed_form, direct, tensor, tensor_symmetric };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed-form";
    case Method::direct: return "direct";
    case Method::tensor: return "tensor";
    case Method::tensor_symmetric: return "tensor-symmetric";
  }
  return "?";
}

struct PotentialSample {
  std::vector<double> point;
  double value = 0.0;
  Method method = Method::closed_form;
  int M = 1;
  double h = 0.0;
  double D = 0.0;
};

namespace detail {

// sqrt(pi) erf(r) / r, i.e. gamma(1/2, r^2) / r.
inline double sqrt_pi_erf_over_r(double r) {
  if (r == 0.0) return 2.0;
  return std::sqrt(std::numbers::pi) * specfun::erf(r) / r;
}

// (e^{-y} - 1)/y - ln y - E1(y) summed as one series; exact for all y and
// free of cancellation for y < 1.
inline double log_kernel_series(double y) {
  double sum = std::numbers::egamma;
  double fact = 1.0;  // k!
  double ypow = 1.0;  // y^{k-1}
  for (int k = 1; k < 200; ++k) {
    fact *= k;
    const double term = ((k % 2) ? -1.0 : 1.0) * ypow / fact * (y / k + 1.0);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    ypow *= y;
  }
  return sum;
}

}  // namespace detail

/// Phi_2(x) = B_n(e^{-|.|^2})(x) at |x| = r.
inline double phi2(Dimension dim, double r) {
  if (!(r >= 0.0)) throw DomainError("phi2: r must be nonnegative");
  const std::int64_t n = dim.value;
  const double y = r * r;
  if (n == 3) {
    return -std::exp(-y) / 8.0 - detail::sqrt_pi_erf_over_r(r) * (2.0 * y + 1.0) / 16.0;
  }
  if (n == 4) {
    if (y < 1.0) return detail::log_kernel_series(y) / 16.0;
    return (std::expm1(-y) / y - 2.0 * std::log(r) - specfun::exp_integral_e1(y)) / 16.0;
  }
  const double nd = dim.as_double();
  // Near the origin the explicit n = 5, 6 formulas cancel; the Kummer series
  // (positive terms after the transformation) is exact there.
  if (y < 1.0 || (n > 6 && y <= 50.0)) {
    return specfun::kummer_1f1((nd - 4.0) / 2.0, nd / 2.0, -y) / (4.0 * (nd - 2.0) * (nd - 4.0));
  }
  if (n == 5) {
    return (std::exp(-y) / y + detail::sqrt_pi_erf_over_r(r) * (2.0 * y - 1.0) / (2.0 * y)) / 16.0;
  }
  if (n == 6) {
    return (std::expm1(-y) + y) / (16.0 * y * y);
  }
  // Far field, n >= 7: B_n e^{-|.|^2} = (q(n/2-2, y) - q(n/2-1, y)) / 16 with
  // q(a, y) = gamma(a, y) / y^a.
  return (specfun::gamma_quotient(nd / 2.0 - 2.0, y) - specfun::gamma_quotient(nd / 2.0 - 1.0, y)) /
         16.0;
}

/// Phi_{2M}(x) = B_n(L_{M-1}^{(n/2)}(|.|^2) e^{-|.|^2})(x) at |x| = r.
inline double phi2M(Dimension dim, BasisOrder order, double r) {
  if (!(r >= 0.0)) throw DomainError("phi2M: r must be nonnegative");
  const int M = order.value;
  const double base = phi2(dim, r);
  if (M == 1) return base;
  const double y = r * r;
  const double a = dim.as_double() / 2.0 - 1.0;
  double ladder = 0.0;
  for (int j = 0; j <= M - 3; ++j) {
    ladder += specfun::gen_laguerre(j, a, y) / ((j + 1.0) * (j + 2.0));
  }
  return base + specfun::gamma_quotient(a, y) / 16.0 + std::exp(-y) / 16.0 * ladder;
}

/// eta_{2M}(x) = pi^{-n/2} L_{M-1}^{(n/2)}(r^2) e^{-r^2}.
inline double radial_eta2M(Dimension dim, BasisOrder order, double r) {
  const double nd = dim.as_double();
  const double y = r * r;
  return std::exp(-0.5 * nd * std::log(std::numbers::pi) - y) *
         specfun::gen_laguerre(order.value - 1, nd / 2.0, y);
}

struct DirectOptions {
  std::int64_t max_dimension = 6;
  // Upper bound on the number of lattice points in the enclosing cube.
  double max_lattice_points = 5e9;
};

/// Direct lattice-sum cubature
///   (h sqrt D)^4 / (pi D)^{n/2} sum_m f(h m) Phi_{2M}((x - h m) / (h sqrt D))
/// over the lattice points with |h m| <= grid.radius.
///
/// `density` is any callable taking std::span<const double> (a point in R^n)
/// and returning the sample f(h m). Terms are visited in lexicographic order
/// in a canonical frame where x has been reflected and permuted to have
/// nonnegative, nonincreasing coordinates, so evaluation points that differ
/// by a hyperoctahedral symmetry produce bitwise-identical sums whenever the
/// density is exactly symmetric.
template <class Density>
PotentialSample direct_cubature(const Density& density, const GridSpec& grid, BasisOrder order,
                                std::span<const double> x, Dimension dim,
                                const DirectOptions& opts = {}) {
  grid.validate();
  const std::int64_t n = dim.value;
  if (static_cast<std::int64_t>(x.size()) != n)
    throw DomainError("direct_cubature: point has wrong dimension");
  if (n > opts.max_dimension)
    throw DimensionTooLarge("direct_cubature: n = " + std::to_string(n) + " exceeds the direct-sum cap");
  const std::int64_t K = grid.half_width();
  const double cube = std::pow(2.0 * K + 1.0, static_cast<double>(n));
  if (cube > opts.max_lattice_points)
    throw DimensionTooLarge("direct_cubature: lattice sum exceeds the operation budget");

  const auto nn = static_cast<std::size_t>(n);
  std::vector<std::size_t> perm(nn);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t i, std::size_t j) { return std::abs(x[i]) > std::abs(x[j]); });
  std::vector<double> xc(nn);
  std::vector<double> sign(nn);
  for (std::size_t j = 0; j < nn; ++j) {
    xc[j] = std::abs(x[perm[j]]);
    sign[perm[j]] = std::signbit(x[perm[j]]) ? -1.0 : 1.0;
  }

  const double h = grid.h;
  const double scale = grid.scale();
  const double r2max = grid.radius * grid.radius;
  std::vector<std::int64_t> m(nn);
  std::vector<double> partial_r2(nn + 1, 0.0);  // sum_{i<j} (h m_i)^2
  std::vector<double> partial_d2(nn + 1, 0.0);  // sum_{i<j} (xc_i - h m_i)^2
  std::vector<double> sample_point(nn);

  double sum = 0.0;
  double comp = 0.0;
  // Odometer over the ball, pruning each axis by the remaining radius.
  auto axis_limit = [&](std::size_t j) {
    const double rem = r2max - partial_r2[j];
    return rem < 0.0 ? std::int64_t{-1}
                     : static_cast<std::int64_t>(std::floor(std::sqrt(rem) / h * (1.0 + 1e-12)));
  };
  std::vector<std::int64_t> limit(nn);
  std::size_t j = 0;
  limit[0] = axis_limit(0);
  m[0] = -limit[0];
  while (true) {
    if (m[j] > limit[j]) {
      if (j == 0) break;
      --j;
      ++m[j];
      continue;
    }
    const double hm = h * static_cast<double>(m[j]);
    partial_r2[j + 1] = partial_r2[j] + hm * hm;
    const double d = xc[j] - hm;
    partial_d2[j + 1] = partial_d2[j] + d * d;
    if (j + 1 < nn) {
      ++j;
      limit[j] = axis_limit(j);
      m[j] = -limit[j];
      continue;
    }
    if (partial_r2[nn] <= r2max) {
      for (std::size_t i = 0; i < nn; ++i)
        sample_point[perm[i]] = sign[perm[i]] * h * static_cast<double>(m[i]);
      const double f = density(std::span<const double>(sample_point));
      if (f != 0.0) {
        const double term = f * phi2M(dim, order, std::sqrt(partial_d2[nn]) / scale);
        const double yk = term - comp;
        const double t = sum + yk;
        comp = (t - sum) - yk;
        sum = t;
      }
    }
    ++m[j];
  }

  const double nd = dim.as_double();
  const double prefactor =
      std::exp(4.0 * std::log(scale) - 0.5 * nd * std::log(std::numbers::pi * grid.D));
  PotentialSample out;
  out.point.assign(x.begin(), x.end());
  out.value = prefactor * sum;
  out.method = Method::direct;
  out.M = order.value;
  out.h = grid.h;
  out.D = grid.D;
  return out;
}

}  // namespace biharm

#endif  // BIHARM_KERNELS_HPP
