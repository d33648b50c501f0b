#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vqc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

// Bad shapes: non power-of-two sizes, arity mismatch, mismatched registers.
class DimensionError : public Error {
 public:
    using Error::Error;
};

// Inputs that violate a documented precondition.
class ValidationError : public Error {
 public:
    using Error::Error;
};

class NotCliffordError : public Error {
 public:
    using Error::Error;
};

class NumericalError : public Error {
 public:
    using Error::Error;
};

// Number of qubits for a 2^n dimension; throws for anything else.
int qubits_for_dim(Eigen::Index dim);

inline std::size_t dim_for_qubits(int n) { return std::size_t{1} << n; }

bool is_unitary(const Matrix& u, double tol = 1e-10);

}  // namespace vqc
