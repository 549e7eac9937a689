#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bsq {

/// Base class for every failure raised by the library.
///
/// `kind()` is a stable machine-readable tag (e.g. "CountMismatch") and
/// `module()` names the component that raised it; the CLI prints both on
/// the first line of its error output.
class Error : public std::runtime_error {
public:
    Error(std::string kind, std::string module, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)), module_(std::move(module)) {}

    const std::string& kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    std::string kind_;
    std::string module_;
};

#define BSQ_DEFINE_ERROR(Name, Module)                                         \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what, std::string module = Module)    \
            : Error(#Name, std::move(module), what) {}                         \
    }

BSQ_DEFINE_ERROR(InputError, "periodic_fn");
BSQ_DEFINE_ERROR(NonFinite, "ode_engine");
BSQ_DEFINE_ERROR(DomainError, "floquet_surface");
BSQ_DEFINE_ERROR(AmbiguousSelection, "floquet_surface");
BSQ_DEFINE_ERROR(CountMismatch, "floquet_surface");
BSQ_DEFINE_ERROR(RealnessViolation, "floquet_surface");
BSQ_DEFINE_ERROR(NormalizationFailure, "three_point");
BSQ_DEFINE_ERROR(PositivityFailure, "hill_side");
BSQ_DEFINE_ERROR(NonRealData, "spectral_map");
BSQ_DEFINE_ERROR(JacobianSingular, "spectral_map");
BSQ_DEFINE_ERROR(BlowUp, "boussinesq_flow");

#undef BSQ_DEFINE_ERROR

}  // namespace bsq
