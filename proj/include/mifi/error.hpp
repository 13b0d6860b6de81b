#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mifi {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values: out-of-range targets, negative std, inconsistent counts.
struct InvalidInputError : Error {
    using Error::Error;
};

// Tensor rank or extent mismatches.
struct ShapeError : Error {
    using Error::Error;
};

// Problems in config files or flag combinations.
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem-level failures (missing paths, unwritable output).
struct IoError : Error {
    using Error::Error;
};

// Non-finite values where finite ones are required.
struct NumericError : Error {
    using Error::Error;
};

// Malformed feature container; carries the byte offset of the defect.
class FormatError : public Error {
public:
    FormatError(const std::string& msg, std::size_t offset)
        : Error(msg + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

} // namespace mifi
