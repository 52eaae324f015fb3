#ifndef AMTK_ERRORS_HPP
#define AMTK_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace am {

// Thrown when a Cholesky pivot is non-positive. Usually means the kappa*I
// floor was lost somewhere upstream of the factorization.
struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidState : std::runtime_error {
  explicit InvalidState(const std::string& what) : std::runtime_error(what) {}
};

// Radial exponential lower-bound fit found no positive growth rate.
struct FitFailed : std::runtime_error {
  explicit FitFailed(const std::string& what) : std::runtime_error(what) {}
};

// No radius in the search grid yields a validated geometric drift condition.
// Expected outcome for heavy-tailed targets.
struct NoDriftFound : std::runtime_error {
  explicit NoDriftFound(const std::string& what) : std::runtime_error(what) {}
};

struct ContourNotFound : std::runtime_error {
  explicit ContourNotFound(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureOverflow : std::runtime_error {
  explicit QuadratureOverflow(const std::string& what) : std::runtime_error(what) {}
};

struct GridCoverageError : std::runtime_error {
  explicit GridCoverageError(const std::string& what) : std::runtime_error(what) {}
};

struct TooShort : std::invalid_argument {
  explicit TooShort(const std::string& what) : std::invalid_argument(what) {}
};

// Chain driver halt: the drift function V overflowed the representable range.
struct OverflowHalt : std::runtime_error {
  explicit OverflowHalt(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Aggregates every config violation, not just the first one.
struct ValidationError : std::runtime_error {
  std::vector<std::string> violations;
  explicit ValidationError(std::vector<std::string> errs)
      : std::runtime_error(join(errs)), violations(std::move(errs)) {}

 private:
  static std::string join(const std::vector<std::string>& errs) {
    std::string out = "config validation failed:";
    for (const auto& e : errs) out += "\n  - " + e;
    return out;
  }
};

}  // namespace am

#endif  // AMTK_ERRORS_HPP
