#pragma once

#include <stdexcept>
#include <string>

namespace polsar {

// Bad caller input: wrong window, non-finite matrix, out-of-range value.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed PFR payload or sidecar.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inputs are individually fine but violate a cross-object rule
// (platform mixing, schema mismatch, bad config).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace polsar
