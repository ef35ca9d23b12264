#ifndef RSKC_ERRORS_HPP
#define RSKC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rskc {

/// Invalid argument or precondition violated by the caller.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data that parses but violates a DataMatrix invariant (all-missing row, zero scale, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine could not produce a meaningful result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every between-cluster term is non-positive, so no weight vector improves the objective.
class DegenerateObjective : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}

#endif
