#pragma once

#include <stdexcept>
#include <string>

namespace halfline {

// Mathematical precondition failures: unstable load, root multiplicity,
// ill-conditioned linear systems, infeasible matching instances.  The CLI
// maps this exception to exit code 2.
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace halfline
