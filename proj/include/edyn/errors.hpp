#pragma once

#include <stdexcept>
#include <string>

namespace edyn {

// Base of every error raised by the library. `where` names the operation.
class Error : public std::runtime_error {
public:
    Error(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

#define EDYN_ERROR_KIND(Name)                                                  \
    class Name : public Error {                                                \
    public:                                                                    \
        using Error::Error;                                                    \
    }

EDYN_ERROR_KIND(PreconditionError);
EDYN_ERROR_KIND(ConstraintConflict);
EDYN_ERROR_KIND(SingularConfiguration);
EDYN_ERROR_KIND(ModeUnsupported);
EDYN_ERROR_KIND(BoundaryTooClose);
EDYN_ERROR_KIND(UnresolvedCluster);
EDYN_ERROR_KIND(IntervalExhausted);
EDYN_ERROR_KIND(BudgetInfeasible);
EDYN_ERROR_KIND(RetryExhausted);
EDYN_ERROR_KIND(OrbitInfeasible);
EDYN_ERROR_KIND(StructuralError);
EDYN_ERROR_KIND(InternalLogicError);
EDYN_ERROR_KIND(NumericOverflow);

#undef EDYN_ERROR_KIND

} // namespace edyn
