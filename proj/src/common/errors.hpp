#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rbsing {

/// Bad caller input (violated precondition, malformed parameter).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation would exceed its configured memory/time budget.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, std::size_t projected, std::size_t cap)
        : std::runtime_error(what + " (projected " + std::to_string(projected) + ", cap " +
                             std::to_string(cap) + ")"),
          projected_(projected), cap_(cap) {}

    std::size_t projected() const noexcept { return projected_; }
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t projected_;
    std::size_t cap_;
};

/// The input columns do not determine a unique normal direction.
class DegenerateNullspace : public std::runtime_error {
public:
    explicit DegenerateNullspace(std::size_t dim)
        : std::runtime_error("degenerate nullspace of dimension " + std::to_string(dim)),
          dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }

private:
    std::size_t dim_;
};

/// An internal consistency assertion failed (a property the math guarantees).
class PropertyViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void require(bool cond, const char* message) {
    if (!cond) throw InvalidArgument(message);
}

}  // namespace rbsing
