#pragma once

#include <stdexcept>
#include <string>

namespace dofc {

// Raised when a numerical inverse Laplace transform cannot be trusted at the
// requested point (evaluator failure on the contour, or an untamable
// amplification with no usable tail bound).
class InversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a quadrature refinement pair disagrees beyond tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double coarse, double fine)
      : std::runtime_error(what), coarse_value(coarse), fine_value(fine) {}
  double coarse_value;
  double fine_value;
};

}  // namespace dofc
