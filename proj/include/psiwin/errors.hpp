#pragma once

#include <stdexcept>
#include <string>

namespace psiwin {

// Bad user-supplied parameters (limits, thresholds, flag values).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function (k = 0, p outside (0,1), s <= 1 ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A caller broke an operation's precondition (insufficient base primes, non-adjacent merge).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Request exceeds a configured memory or work budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Truncation too coarse for a requested accuracy.
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Data for which a statistic is undefined (zero variance, empty histogram).
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or mismatched checkpoint file.
class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace psiwin
