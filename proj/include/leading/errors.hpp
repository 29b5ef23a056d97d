#pragma once

#include <stdexcept>
#include <string>

namespace leading {

// Bad input data: unparseable files, out-of-range ids, config typos.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values detected where finite math is required.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace leading
