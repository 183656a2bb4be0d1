// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "gbo/fourier.hpp"
#include "gbo/grid.hpp"

namespace gbo::dense {

/// Dense physical-space matrix of a Fourier multiplier (a circulant).
Eigen::MatrixXd multiplier_matrix(const Grid1D& grid, const Symbol& m);

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, unit Euclidean norm
};

/// Lowest `count` eigenpairs of a symmetric matrix (LAPACK dsyevr).
SymmetricEigen lowest_eigenpairs(const Eigen::MatrixXd& a, int count);

/// All eigenvalues of a general real matrix (LAPACK dgeev, no vectors).
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a);

/// LU factorization with partial pivoting (LAPACK dgetrf/dgetrs).
class LuFactorization {
 public:
  explicit LuFactorization(Eigen::MatrixXd a);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  /// Smallest |U_ii| / largest |U_ii|, a cheap singularity indicator.
  double pivot_ratio() const;

 private:
  Eigen::MatrixXd lu_;
  std::vector<int> pivots_;
};

/// Eigenvector of `a` for a real eigenvalue near `shift` by shifted inverse
/// iteration. Returned with unit Euclidean norm.
Eigen::VectorXd inverse_iteration(const Eigen::MatrixXd& a, double shift, int iterations = 3);

}  // namespace gbo::dense
