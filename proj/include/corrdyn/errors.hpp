#pragma once

#include <stdexcept>
#include <string>

namespace corrdyn {

// Error taxonomy mirrors the CLI exit codes: config 2, cap 3, numerical 4.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace corrdyn
