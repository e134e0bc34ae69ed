#pragma once

#include <stdexcept>
#include <string>

namespace symspace {

/// Input outside an operation's domain (bad breakpoints, t out of range, negative values).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numeric procedure could not produce a finite answer (non-integrable weight, divergent modular).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of a constructive procedure does not hold.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed JSON descriptor or function file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace symspace
