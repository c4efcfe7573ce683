#pragma once
#include <stdexcept>
#include <string>

namespace chs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config file syntax or schema problems (message carries line/key context).
struct ConfigError : Error {
    using Error::Error;
};

// Physically invalid parameter combinations, reported distinctly from syntax.
struct ValidationError : Error {
    using Error::Error;
};

// Linear algebra failures: singular factorization, excessive residual.
struct SolverError : Error {
    using Error::Error;
};

}  // namespace chs
