#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace starsketch {

using ItemId = std::uint64_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Exhaustive partition search would exceed the caller's evaluation budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two sketches were built with different hash families.
class FamilyMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A divergence generator met a zero it has no limit convention for.
class DomainError : public std::domain_error {
public:
    DomainError(const std::string& what, std::size_t index)
        : std::domain_error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

// Malformed on-disk artifact (sketch, stream, histogram, plan).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace starsketch
