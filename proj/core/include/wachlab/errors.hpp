#pragma once

#include <stdexcept>
#include <string>

namespace wachlab {

// Operands live in different rings (different p, E or precision).
class RingMismatch : public std::invalid_argument {
public:
    explicit RingMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// An operation cannot deliver the precision it is contracted to deliver.
class PrecisionError : public std::runtime_error {
public:
    explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

// A named runtime check failed. `check()` is a stable identifier used by
// the verification reports and fault-injection fixtures.
class CheckFailure : public std::runtime_error {
public:
    CheckFailure(std::string check, const std::string& detail)
        : std::runtime_error(check + ": " + detail), check_(std::move(check)) {}
    const std::string& check() const noexcept { return check_; }

private:
    std::string check_;
};

// Inputs outside the range covered by the classification theorem.
class OutOfScope : public std::domain_error {
public:
    explicit OutOfScope(const std::string& what) : std::domain_error(what) {}
};

} // namespace wachlab
