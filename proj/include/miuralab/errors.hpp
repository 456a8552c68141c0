#pragma once

#include <stdexcept>
#include <string>

namespace miuralab {

// Bad input: maps to exit status 2 in the CLI.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to produce an answer: exit status 3.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace miuralab
