#pragma once

#include <stdexcept>
#include <string>

namespace oscihom {

// Invalid input: zero vectors, non-coprime loops, points outside domains, ...
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed expression or config text; carries a character position.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

// Runtime failure while evaluating an expression (division by zero, ...).
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A quadrature refused to certify its result within the allowed refinement.
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Node budget exceeded.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dense linear solve failed or is too ill-conditioned to trust.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace oscihom
