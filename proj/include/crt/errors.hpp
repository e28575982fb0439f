#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crt {

// Raised when a feature value or denominator overflows to a non-finite
// number. Carries the row index of the offending input.
class NumericOverflowError : public std::runtime_error {
public:
    NumericOverflowError(const std::string& what, std::ptrdiff_t row)
        : std::runtime_error(what + " (row " + std::to_string(row) + ")"),
          row_(row) {}

    std::ptrdiff_t row() const noexcept { return row_; }

private:
    std::ptrdiff_t row_;
};

// Raised when an attention denominator entry is non-positive or non-finite.
class DegenerateDenominatorError : public std::runtime_error {
public:
    DegenerateDenominatorError(const std::string& what, std::ptrdiff_t row)
        : std::runtime_error(what + " (row " + std::to_string(row) + ")"),
          row_(row) {}

    std::ptrdiff_t row() const noexcept { return row_; }

private:
    std::ptrdiff_t row_;
};

}  // namespace crt
