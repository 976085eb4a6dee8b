#pragma once

#include <stdexcept>
#include <string>

namespace tcvar {

/// Base of every error thrown by the library. `kind()` is a stable tag used
/// by the CLI to pick an exit code and by tests to match error categories.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define TCVAR_DEFINE_ERROR(Name)                                              \
  class Name : public Error {                                                 \
  public:                                                                     \
    explicit Name(const std::string& what) : Error(#Name, what) {}            \
  }

// fp-core
TCVAR_DEFINE_ERROR(InvalidPrecision);
TCVAR_DEFINE_ERROR(InvalidFpNum);
TCVAR_DEFINE_ERROR(DivisionByZero);
TCVAR_DEFINE_ERROR(EmptyInput);
TCVAR_DEFINE_ERROR(DomainError);
TCVAR_DEFINE_ERROR(MalformedEncoding);

// netlist
TCVAR_DEFINE_ERROR(InvalidFanIn);
TCVAR_DEFINE_ERROR(DanglingInput);
TCVAR_DEFINE_ERROR(ArityMismatch);
TCVAR_DEFINE_ERROR(ParseError);
TCVAR_DEFINE_ERROR(GateLimitExceeded);

// gadgets / model / compiler
TCVAR_DEFINE_ERROR(PrecisionMismatch);
TCVAR_DEFINE_ERROR(StrictPolicyViolation);
TCVAR_DEFINE_ERROR(ShapeMismatch);
TCVAR_DEFINE_ERROR(ShrinkNotSupported);
TCVAR_DEFINE_ERROR(RowSumZero);
TCVAR_DEFINE_ERROR(KernelTooLarge);
TCVAR_DEFINE_ERROR(IndexOutOfRange);
TCVAR_DEFINE_ERROR(ConfigError);

#undef TCVAR_DEFINE_ERROR

}  // namespace tcvar
