#pragma once

#include <stdexcept>
#include <string>

namespace walkscope {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read, or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input file parsed but its content is malformed (bad sidecar, bad GeoJSON, bad image header).
class FormatError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class CrsMismatch : public Error {
public:
    using Error::Error;
};

/// A tile pixel holds a value outside the class set.
class InvalidLabelError : public Error {
public:
    InvalidLabelError(int row, int col, int value)
        : Error("invalid label " + std::to_string(value) + " at pixel (row " + std::to_string(row) +
                ", col " + std::to_string(col) + ")"),
          row_(row), col_(col), value_(value) {}

    int row() const noexcept { return row_; }
    int col() const noexcept { return col_; }
    int value() const noexcept { return value_; }

private:
    int row_;
    int col_;
    int value_;
};

/// Precondition violated by a caller (e.g. non-foreground point handed to width_at).
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace walkscope
