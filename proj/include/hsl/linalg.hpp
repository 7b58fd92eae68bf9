#pragma once

#include <cstddef>
#include <vector>

namespace hsl {

// Dense row-major square matrix of doubles; just enough linear algebra for
// the desk-scale fidelity and walk oracles.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

Matrix matmul(const Matrix& x, const Matrix& y);

struct SymEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // columns are eigenvectors
};

// Cyclic Jacobi rotations; fine for the n <= ~1000 matrices used here.
SymEigen sym_eigen(const Matrix& m);

// Principal square root of a symmetric PSD matrix (negative eigenvalues from
// roundoff are clamped to zero).
Matrix sym_sqrt(const Matrix& m);

// Singular values by one-sided Jacobi orthogonalization (no normal-matrix
// squaring, so small singular values keep full precision).
std::vector<double> singular_values(Matrix m);

double nuclear_norm(const Matrix& m);

}  // namespace hsl
