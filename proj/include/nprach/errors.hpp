#pragma once

#include <stdexcept>
#include <string>

namespace nprach {

// Bad configuration, scenario or argument. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File system or stream failure, message carries the offending path. Exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nprach
