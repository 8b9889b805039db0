#pragma once

#include <stdexcept>
#include <string>

namespace tdgasci {

// Invalid input or scenario configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative solver (SCF, ITP, Newton) did not reach its tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A memory or size budget would be exceeded.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tdgasci
