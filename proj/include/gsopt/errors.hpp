#ifndef GSOPT_ERRORS_HPP
#define GSOPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gsopt {

// Malformed files, bad parameters, unknown ids. CLI exit code 4.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No feasible solution exists (e.g. a satellite with no usable contact
// under the min-max-gap objective). CLI exit code 2.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact enumeration would exceed the configured subset budget. CLI exit code 3.
struct BudgetExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Kepler-equation non-convergence or otherwise degenerate orbital input.
struct PropagationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace gsopt

#endif // GSOPT_ERRORS_HPP
