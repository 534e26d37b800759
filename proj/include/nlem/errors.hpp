#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlem {

// A parameter outside its documented domain (even patch size, sigma <= 0, ...).
class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Structurally broken input data (dimension mismatch, non-finite values).
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A weight vector that cannot define an average (empty, or all weights zero).
class degenerate_weights : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed image file. byte_offset() points at the offending byte.
class format_error : public std::runtime_error {
public:
    format_error(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " (byte " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// OS-level read/write failure.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nlem
