#pragma once

#include <stdexcept>
#include <string>

namespace raodpd {

// Malformed or unusable input data (file parsing, empty samples, non-finite
// observations). CLI maps this to exit code 3.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown: solver non-convergence, singular or ill-conditioned
// matrices, series truncation cap, missing root bracket. CLI exit code 4.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace raodpd
