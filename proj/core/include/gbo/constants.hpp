// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gbo/ground_state.hpp"

namespace gbo {

/// Soliton signs: alternating for 2 < p < 3, all +1 for p > 3.
/// Throws CriticalExponent at p == 3 and OutOfRange for p <= 2.
std::vector<int> sign_pattern(double p, int n);

/// Pairwise interaction constants of an n-soliton train.
struct InteractionConstants {
  double p = 0.0;
  int n = 0;
  std::vector<int> signs;
  Eigen::MatrixXd a;  ///< symmetric, zero diagonal
  double kappa0 = 0.0;
  double int_Qp = 0.0;
  double mass = 0.0;
};

/// a_ij = 4 s_i s_j kappa0 (p-1) int Q^p / ((p-3) int Q^2) from scalar data.
InteractionConstants interaction_constants(double p, int n, double kappa0, double int_Qp,
                                           double mass);

/// Same, with the integrals taken from a converged ground state.
InteractionConstants compute_a(const GroundState& gs, int n);

/// Wraps an arbitrary symmetric, zero-diagonal matrix (p and signs unset).
/// Throws InvalidArgument otherwise.
InteractionConstants constants_from_matrix(const Eigen::MatrixXd& a);

struct CriticalPoint {
  Eigen::VectorXd alpha;
  double objective = 0.0;
  double residual = 0.0;
  double hessian_max = 0.0;  ///< largest eigenvalue of the reduced Hessian
};

struct AlphaOptions {
  int starts = 8;
  int max_iterations = 400;
  unsigned seed = 20260411;
};

struct MSpectrum {
  Eigen::MatrixXd M;
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

struct AlphaSolution {
  Eigen::VectorXd alpha;  ///< strictly decreasing, alpha_i = -alpha_{n+1-i}
  double residual = 0.0;  ///< max_i |alpha_i/4 - sum_j a_ij/(alpha_i-alpha_j)^3|
  double objective = 0.0;
  double hessian_max = 0.0;
  Eigen::MatrixXd M;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  double alpha_eig_residual = 0.0;  ///< |M alpha - 3/4 alpha|
  std::vector<CriticalPoint> critical_points;
};

/// F(alpha) = -sum_{i != j} a_ij/(alpha_i-alpha_j)^2 - |alpha|^2/2.
double alpha_objective(const Eigen::MatrixXd& a, const Eigen::VectorXd& alpha);

/// max_i |alpha_i/4 - sum_{j != i} a_ij/(alpha_i-alpha_j)^3|.
double alpha_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& alpha);

/// Maximizes F over the reflection-antisymmetric, ordered configurations
/// (parametrized by positive gaps), then polishes with Newton. All distinct
/// critical points found from the seeded starts are reported; the best local
/// maximum is returned. Throws NoCriticalPoint if no start converges.
AlphaSolution solve_alpha(const InteractionConstants& c, const AlphaOptions& options = {});

/// m_ij = -3a_ij/(alpha_i-alpha_j)^4, m_ii = -sum_{j != i} m_ij.
MSpectrum build_M(const Eigen::MatrixXd& a, const Eigen::VectorXd& alpha);

}  // namespace gbo
