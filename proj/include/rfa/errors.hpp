#pragma once

#include <stdexcept>
#include <string>

namespace rfa {

// Error categories; the CLI maps them to exit codes (config 2, data 3, numeric 4).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rfa
