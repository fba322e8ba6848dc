#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace antclust {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument or configuration: out-of-range similarity, empty feature list,
/// unknown rule set, malformed parameter value.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input data failed to parse or validate. Carries an optional cell location.
class DataError : public Error {
public:
    enum class Kind { Parse, Shape, Symmetry, Range, Diagonal, Width, Truncated, Empty, Format };

    DataError(Kind kind, std::string message) : Error(std::move(message)), kind_(kind) {}
    DataError(Kind kind, std::string message, std::size_t row, std::size_t col)
        : Error(message + " at row " + std::to_string(row) + ", column " + std::to_string(col)),
          kind_(kind), row_(row), col_(col), located_(true) {}

    Kind kind() const noexcept { return kind_; }
    bool located() const noexcept { return located_; }
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    Kind kind_;
    std::size_t row_ = 0;
    std::size_t col_ = 0;
    bool located_ = false;
};

} // namespace antclust
