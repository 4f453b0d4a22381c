// conelp - conic linear programming sensitivity toolkit
// Licensed under Apache 2.0

#ifndef CONELP_ERRORS_HPP
#define CONELP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace conelp {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InteriorTestUnsupported : std::logic_error {
    using std::logic_error::logic_error;
};

struct BarrierUnsupported : std::logic_error {
    using std::logic_error::logic_error;
};

struct NotInterior : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyInterior : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPolyhedral : std::logic_error {
    using std::logic_error::logic_error;
};

struct RangeTestFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by sensitivity operations when a required hypothesis does not hold.
// `hypothesis()` returns one of the stable keys used in reports:
// "primal_strict_feasibility", "dual_strict_feasibility", "finite_value".
class HypothesisViolation : public std::runtime_error {
  public:
    HypothesisViolation(std::string key, const std::string& detail)
        : std::runtime_error(key + ": " + detail), key_(std::move(key)) {}
    const std::string& hypothesis() const noexcept { return key_; }

  private:
    std::string key_;
};

} // namespace conelp

#endif
