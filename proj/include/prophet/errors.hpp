#pragma once

#include <stdexcept>
#include <string>

namespace prophet {

/// Argument outside an operation's mathematical domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The operation is not defined for this distribution kind.
class NotImplementedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Misuse of a stateful object (e.g. stepping a rule that already stopped).
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A numerical procedure failed to reach its accuracy target.
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace prophet
