#pragma once

#include <stdexcept>
#include <string>

namespace tunnelion {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid physical parameters (kappa >= c in relativistic mode, negative fields, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Special-function argument outside the supported range or result overflow.
class RangeError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Energy above the barrier top: no classical turning points.
class NoBarrierError : public Error {
public:
    using Error::Error;
};

}  // namespace tunnelion
