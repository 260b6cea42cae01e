#pragma once

#include <stdexcept>
#include <string>

namespace ordprob {

// Argument outside the domain of the requested operation (bad input data,
// parameters no evaluation strategy can handle).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A series or iterative solver ran out of budget before meeting tolerance.
class NonConvergence : public std::runtime_error {
public:
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ordprob
