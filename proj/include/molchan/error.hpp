#pragma once

#include <stdexcept>
#include <string>

namespace molchan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments: wrong dimensions, malformed sequences, bad offsets.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A quantity is evaluated outside its mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A design (sub)matrix or information matrix is not invertible.
class SingularDesignError : public Error {
public:
    using Error::Error;
};

/// Newton iteration for the ML stationary point hit its iteration cap.
class NoConvergenceError : public Error {
public:
    using Error::Error;
};

/// Subset enumeration produced no feasible candidate.
class EstimationFailure : public Error {
public:
    using Error::Error;
};

/// An estimator index set is empty.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// No admissible training sequence exists for the requested search.
class SearchFailure : public Error {
public:
    using Error::Error;
};

/// Invalid or unsatisfiable configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace molchan
