#pragma once

#include <stdexcept>
#include <string>

namespace netautocorr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or inputs that violate a documented precondition
/// (node id out of range, k >= n, negative decay, dimension mismatch, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Data for which the requested statistic is undefined: constant outcome,
/// fewer than two categories, zero null variance, no positive weight.
class DegenerateData : public Error {
public:
    using Error::Error;
};

/// File could not be read or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace netautocorr
