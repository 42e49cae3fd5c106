#ifndef BIHARM_ERRORS_HPP
#define BIHARM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace biharm {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class RankBudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Quadrature rule ends while the integrand is still significant.
class QuadratureDivergence : public Error {
 public:
  using Error::Error;
};

// A one-dimensional convolution reaches the edge of the sampled range with a
// non-negligible kernel weight.
class SupportTruncated : public Error {
 public:
  using Error::Error;
};

}  // namespace biharm

#endif  // BIHARM_ERRORS_HPP
