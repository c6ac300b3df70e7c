#pragma once

#include <stdexcept>
#include <string>

namespace fwci {

// Error categories map one-to-one onto the command-line exit codes.
enum class ExitCode : int {
    success = 0,
    usage = 1,
    data = 2,
    numerical = 3,
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable input, missing required columns, malformed side files.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computation that cannot produce a result (every fit failed, sample too small).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fwci
