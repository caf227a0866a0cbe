#ifndef KLEIN_ERRORS_HPP
#define KLEIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace klein {

// Argument outside the mathematical domain of an operation.
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// A requested quantity diverges at the given argument (e.g. K(m) at m = 1,
// periods at p = sqrt(3)/2).
struct divergence_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Adaptive step-size control drove the step below representable resolution.
// Carries the last y that was reached successfully.
struct integration_error : std::runtime_error {
    double last_good_y;
    integration_error(const std::string& msg, double y)
        : std::runtime_error(msg), last_good_y(y) {}
};

// A state that should satisfy an algebraic constraint does not.
struct constraint_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested accuracy could not be certified (non-convergent refinement).
struct accuracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Root-finding target outside the certified range.
struct out_of_range_error : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace klein

#endif
