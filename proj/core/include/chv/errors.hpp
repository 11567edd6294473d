#ifndef CHV_ERRORS_HPP
#define CHV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chv {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user-supplied parameter (non-finite physical constant, divisibility
// violation, out-of-range index, ...).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Operands disagree on grid size, frame count or hologram kind.
class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

// File-level failure: missing file, bad magic, truncated payload.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Non-finite values appeared inside an iterative solve. The caller can
// recover the partial trace from the solver that threw.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

} // namespace chv

#endif
