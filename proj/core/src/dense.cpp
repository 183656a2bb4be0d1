// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gbo/dense.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gbo/error.hpp"

namespace gbo::dense {

Eigen::MatrixXd multiplier_matrix(const Grid1D& grid, const Symbol& m) {
  const std::size_t n = grid.n_points();
  RealField delta(grid);
  delta[0] = 1.0;
  const RealField column = apply_multiplier(delta, m);
  Eigen::MatrixXd out(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) out(i, j) = column[(i + n - j) % n];
  }
  return out;
}

SymmetricEigen lowest_eigenpairs(const Eigen::MatrixXd& a, int count) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  require(a.rows() == a.cols(), ErrorCode::kInvalidArgument, "matrix must be square");
  count = std::clamp(count, 1, static_cast<int>(n));
  Eigen::MatrixXd work = a;
  lapack_int found = 0;
  Eigen::VectorXd values(n);
  Eigen::MatrixXd vectors(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0, 0.0, 1, count, 0.0, &found,
                     values.data(), vectors.data(), n, support.data());
  require(info == 0 && found == count, ErrorCode::kSolveFailure, "dsyevr failed");
  return {values.head(count), vectors};
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  require(a.rows() == a.cols(), ErrorCode::kInvalidArgument, "matrix must be square");
  Eigen::MatrixXd work = a;
  std::vector<double> wr(n), wi(n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(), wi.data(),
                                        nullptr, 1, nullptr, 1);
  require(info == 0, ErrorCode::kSolveFailure, "dgeev failed");
  std::vector<std::complex<double>> out(n);
  for (lapack_int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  return out;
}

LuFactorization::LuFactorization(Eigen::MatrixXd a) : lu_(std::move(a)), pivots_(lu_.rows()) {
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  require(lu_.rows() == lu_.cols(), ErrorCode::kInvalidArgument, "matrix must be square");
  const lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(), n, pivots_.data());
  require(info >= 0, ErrorCode::kSolveFailure, "dgetrf failed");
  require(info == 0, ErrorCode::kSolveFailure, "matrix is exactly singular");
}

Eigen::VectorXd LuFactorization::solve(const Eigen::VectorXd& b) const {
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  Eigen::VectorXd x = b;
  const lapack_int info =
      LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', n, 1, lu_.data(), n, pivots_.data(), x.data(), n);
  require(info == 0, ErrorCode::kSolveFailure, "dgetrs failed");
  return x;
}

double LuFactorization::pivot_ratio() const {
  const Eigen::VectorXd d = lu_.diagonal().cwiseAbs();
  return d.minCoeff() / d.maxCoeff();
}

Eigen::VectorXd inverse_iteration(const Eigen::MatrixXd& a, double shift, int iterations) {
  const Eigen::Index n = a.rows();
  // Nudge off the eigenvalue so the factorization stays nonsingular.
  const double nudge = 1e-10 * std::max(1.0, std::abs(shift));
  Eigen::MatrixXd shifted = a;
  shifted.diagonal().array() -= shift + nudge;
  const LuFactorization lu(std::move(shifted));
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng);
  v.normalize();
  for (int it = 0; it < iterations; ++it) {
    v = lu.solve(v);
    v.normalize();
  }
  return v;
}

}  // namespace gbo::dense
