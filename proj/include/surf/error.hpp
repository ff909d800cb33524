#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surf {

enum class ErrorCode {
  evaluation,          // non-finite speed or objective sample
  degenerate_front,    // total PF length below the numerical floor
  insufficient_samples,
  ordering,            // knots or weights not strictly increasing
  shape,               // mismatched lengths / dimensions
  domain,              // argument outside the admissible range
  non_invertible,
  parameter,
  numerical,           // failed factorization or ill-conditioned solve
  rank,                // flow matrix not full column rank
  augmentation,        // constraint-augmented Hessian not positive definite
  unsupported,
  divergence,
  coverage,            // arm never pulled
  budget,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::evaluation: return "evaluation";
    case ErrorCode::degenerate_front: return "degenerate_front";
    case ErrorCode::insufficient_samples: return "insufficient_samples";
    case ErrorCode::ordering: return "ordering";
    case ErrorCode::shape: return "shape";
    case ErrorCode::domain: return "domain";
    case ErrorCode::non_invertible: return "non_invertible";
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::rank: return "rank";
    case ErrorCode::augmentation: return "augmentation";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::coverage: return "coverage";
    case ErrorCode::budget: return "budget";
  }
  return "unknown";
}

/// Every failure raised by the library. `module` names the component that
/// raised it so CLI messages can be module-qualified.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string_view module, const std::string& what)
      : std::runtime_error(std::string(module) + ": " + what), code_(code), module_(module), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string module_;
  std::string detail_;
};

}  // namespace surf
