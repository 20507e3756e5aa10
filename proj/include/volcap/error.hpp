#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace volcap {

/// Base class for all toolkit errors. exit_code() gives the stable process
/// exit code the CLI maps this error class to (documented in the README).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual int exit_code() const noexcept { return 2; }
};

/// File could not be opened, read or written. Message carries the path.
class IoError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// Too few inputs for an operation (e.g. under 3 correspondences).
class ArityError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// Malformed data: bad magic, unsupported version, unparsable JSON/CSV.
class FormatError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Stream ended mid-record; byte_offset() is where the read stopped.
class TruncationError : public FormatError {
public:
    TruncationError(const std::string& msg, std::size_t byte_offset)
        : FormatError(msg), offset_(byte_offset) {}
    std::size_t byte_offset() const noexcept { return offset_; }

private:
    std::size_t offset_ = 0;
};

/// Depth/color records do not pair up (mismatched frame numbers).
class PairingError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Sequence not in the required order (frame numbers, packet arrival times).
class OrderingError : public FormatError {
public:
    using FormatError::FormatError;
};

/// A stated invariant does not hold. Message names the failed invariant.
class ValidationError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

/// Degenerate geometry (e.g. collinear points) makes a fit underdetermined.
class RankError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A denominator vanished where the math requires it nonzero.
class SingularityError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// No path between the requested coordinate frames.
class PathError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Dimensions of two inputs that must agree do not.
class ShapeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace volcap
