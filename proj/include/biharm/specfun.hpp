#ifndef BIHARM_SPECFUN_HPP
#define BIHARM_SPECFUN_HPP

// Scalar special functions used by the closed-form biharmonic kernels:
// error function, exponential integral E1, lower incomplete gamma (and the
// quotient gamma(a,x)/x^a that appears in the kernels), Kummer's confluent
// hypergeometric function, Hermite and generalized Laguerre polynomials.
// All evaluation is plain binary64.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "biharm/errors.hpp"

namespace biharm::specfun {

struct EvalAccuracy {
  double rel_tol = 1e-15;
  int max_terms = 500;

  void validate() const {
    if (!(rel_tol > 0.0)) throw DomainError("EvalAccuracy: rel_tol must be positive");
    if (max_terms < 1) throw DomainError("EvalAccuracy: max_terms must be >= 1");
  }
};

// Largest |z| accepted by kummer_1f1; beyond this the positive-term series
// overflows binary64.
inline constexpr double kKummerMaxArgument = 700.0;

inline double erf(double x) { return std::erf(x); }

/// E1(x) = int_x^inf e^{-t}/t dt for x > 0. Log-plus-series form for x <= 1,
/// modified Lentz continued fraction above.
inline double exp_integral_e1(double x, EvalAccuracy acc = {}) {
  acc.validate();
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("exp_integral_e1: argument must be positive and finite");
  if (x <= 1.0) {
    double sum = 0.0;
    double term = 1.0;  // (-x)^k / k!
    for (int k = 1; k <= acc.max_terms; ++k) {
      term *= -x / k;
      const double contrib = term / k;
      sum += contrib;
      if (std::abs(contrib) < acc.rel_tol * std::abs(sum)) {
        return -std::numbers::egamma - std::log(x) - sum;
      }
    }
    throw NonConvergence("exp_integral_e1: series did not converge");
  }
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= acc.max_terms; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < acc.rel_tol) return h * std::exp(-x);
  }
  throw NonConvergence("exp_integral_e1: continued fraction did not converge");
}

namespace detail {

// Continued fraction for Gamma(a,x) e^{x} x^{-a}, valid for x > a + 1.
inline double upper_gamma_cf(double a, double x, const EvalAccuracy& acc) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= acc.max_terms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < acc.rel_tol) return h;
  }
  throw NonConvergence("incomplete gamma: continued fraction did not converge");
}

// e^{x} * gamma(a,x) / x^a as the series sum_k x^k / (a (a+1) ... (a+k)).
inline double lower_gamma_series(double a, double x, const EvalAccuracy& acc) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k <= acc.max_terms; ++k) {
    term *= x / (a + k);
    sum += term;
    if (term < acc.rel_tol * sum) return sum;
  }
  throw NonConvergence("incomplete gamma: series did not converge");
}

inline void check_gamma_args(double a, double x, const char* who) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw DomainError(std::string(who) + ": a must be positive");
  if (!(x >= 0.0) || std::isnan(x))
    throw DomainError(std::string(who) + ": x must be nonnegative");
}

}  // namespace detail

/// gamma(a, x) / x^a, continuous at x = 0 where it equals 1/a. This is the
/// form in which the incomplete gamma function enters the kernels
/// (gamma(n/2 - 1, r^2) / r^{n-2}), so it is evaluated directly rather than
/// as a quotient.
inline double gamma_quotient(double a, double x, EvalAccuracy acc = {}) {
  acc.validate();
  detail::check_gamma_args(a, x, "gamma_quotient");
  if (x == 0.0) return 1.0 / a;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::exp(-x) * detail::lower_gamma_series(a, x, acc);
  const double h = detail::upper_gamma_cf(a, x, acc);
  return std::exp(std::lgamma(a) - a * std::log(x)) - std::exp(-x) * h;
}

/// gamma(a, x) = int_0^x t^{a-1} e^{-t} dt.
inline double lower_incomplete_gamma(double a, double x, EvalAccuracy acc = {}) {
  acc.validate();
  detail::check_gamma_args(a, x, "lower_incomplete_gamma");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return std::tgamma(a);
  if (x < a + 1.0)
    return std::exp(a * std::log(x) - x) * detail::lower_gamma_series(a, x, acc);
  const double h = detail::upper_gamma_cf(a, x, acc);
  return std::tgamma(a) - std::exp(a * std::log(x) - x) * h;
}

namespace detail {

// Plain Maclaurin series of 1F1(a; c; z). Used only where all terms past the
// first share a sign (z >= 0 after the Kummer transformation).
inline double kummer_series(double a, double c, double z, const EvalAccuracy& acc) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < acc.max_terms; ++k) {
    const double ratio = (a + k) / (c + k) * z / (k + 1);
    term *= ratio;
    if (term == 0.0) return sum;  // a is a nonpositive integer: polynomial
    sum += term;
    if (std::abs(ratio) < 1.0 && std::abs(term) < acc.rel_tol * std::abs(sum)) return sum;
  }
  throw NonConvergence("kummer_1f1: series did not converge within max_terms");
}

}  // namespace detail

/// Kummer's confluent hypergeometric function 1F1(a; c; z).
///
/// Negative arguments go through the Kummer transformation
/// 1F1(a; c; z) = e^z 1F1(c - a; c; -z), so the series that is actually summed
/// has a nonnegative argument.
inline double kummer_1f1(double a, double c, double z, EvalAccuracy acc = {}) {
  acc.validate();
  if (c <= 0.0 && c == std::floor(c))
    throw DomainError("kummer_1f1: c must not be a nonpositive integer");
  if (!std::isfinite(a) || !std::isfinite(c) || !std::isfinite(z))
    throw DomainError("kummer_1f1: non-finite argument");
  if (std::abs(z) > kKummerMaxArgument)
    throw DomainError("kummer_1f1: |z| exceeds the supported range");
  if (z == 0.0) return 1.0;
  if (z < 0.0) return std::exp(z) * detail::kummer_series(c - a, c, -z, acc);
  return detail::kummer_series(a, c, z, acc);
}

/// Physicists' Hermite polynomial H_k(x).
inline double hermite(int k, double x) {
  if (k < 0) throw DomainError("hermite: degree must be nonnegative");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int j = 1; j < k; ++j) {
    const double next = 2.0 * x * cur - 2.0 * j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Generalized Laguerre polynomial L_k^{(gamma)}(y), gamma > -1.
inline double gen_laguerre(int k, double gamma, double y) {
  if (k < 0) throw DomainError("gen_laguerre: degree must be nonnegative");
  if (!(gamma > -1.0)) throw DomainError("gen_laguerre: gamma must exceed -1");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + gamma - y;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 + gamma - y) * cur - (j + gamma) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace biharm::specfun

#endif  // BIHARM_SPECFUN_HPP
