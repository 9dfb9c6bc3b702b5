#pragma once

#include <stdexcept>
#include <string>

namespace papm {

// File/format/data problems: bad JSON, bad magic, out-of-extent points.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failures that abort a computation (e.g. fit divergence).
// Solver non-convergence is *not* an error; it is reported via flags.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace papm
