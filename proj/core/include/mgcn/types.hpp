#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace mgcn {

using Index = Eigen::Index;

// Row-major so that node rows are contiguous; CSR products walk rows.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or shape violation in a call.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed, truncated or inconsistent input file.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Solver failure or non-finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace mgcn
