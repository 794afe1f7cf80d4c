#pragma once

#include <stdexcept>

namespace knnup {

// Invalid parameters, malformed configuration, shape mismatches.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Unreadable or unwritable files, malformed file contents.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace knnup
