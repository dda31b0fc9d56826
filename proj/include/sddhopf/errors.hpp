#pragma once

#include <stdexcept>
#include <string>

namespace sddhopf {

// Numerical failures reported by the analysis modules. Usage and configuration
// problems use ConfigError and its subclasses instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SDDHOPF_DEFINE_ERROR(Name, Base)      \
    class Name : public Base {                \
    public:                                   \
        using Base::Base;                     \
    }

SDDHOPF_DEFINE_ERROR(NoConvergence, Error);
SDDHOPF_DEFINE_ERROR(SingularJacobian, Error);
SDDHOPF_DEFINE_ERROR(NonFiniteJacobian, Error);
SDDHOPF_DEFINE_ERROR(BoundaryZero, Error);
SDDHOPF_DEFINE_ERROR(NoRootInWindow, Error);
SDDHOPF_DEFINE_ERROR(AmbiguousRoot, Error);
SDDHOPF_DEFINE_ERROR(SingularImplicitDerivative, Error);
SDDHOPF_DEFINE_ERROR(InnerIterationDivergence, Error);
SDDHOPF_DEFINE_ERROR(DisagreementError, Error);
SDDHOPF_DEFINE_ERROR(ModeOverflow, Error);
SDDHOPF_DEFINE_ERROR(SingularAtStationary, Error);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

SDDHOPF_DEFINE_ERROR(ParseError, ConfigError);

class SchemaError : public ConfigError {
public:
    SchemaError(std::string field, const std::string& what)
        : ConfigError("config field '" + field + "': " + what), field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

#undef SDDHOPF_DEFINE_ERROR

}  // namespace sddhopf
