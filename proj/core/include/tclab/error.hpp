#pragma once

#include <stdexcept>
#include <string>

namespace tclab {

/// Shapes, modes or indices that do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Arguments outside an operation's mathematical domain (ranks, weights, probabilities).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Non-finite values, failed factorizations, divergent optimisation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or incompatible files on disk.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tclab
