#pragma once

#include <stdexcept>

namespace ranndy {

// Error classes map to CLI exit codes: ConfigError -> 2, IoError -> 3, NumericError -> 4.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ranndy
