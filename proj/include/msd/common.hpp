#pragma once

#include <stdexcept>
#include <string>

namespace msd {

// Input/validation failures (bad parameters, malformed files). CLI maps these
// to exit code 1.
struct domain_error : std::invalid_argument {
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failures (quadrature non-convergence, indefinite embeddings with
// no fallback, eigensolver breakdown). CLI maps these to exit code 2.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace msd
