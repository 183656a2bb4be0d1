// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "gbo/ground_state.hpp"
#include "gbo/grid.hpp"

namespace gbo {

/// Largest grid for which a dense representation is built.
inline constexpr std::size_t kDenseLimit = 4096;

/// Grid with n points sized for dense spectral work on the p ground state:
/// the spacing resolves the profile to 1e-10 and the half length is capped
/// at 400.
Grid1D spectral_grid(double p, std::size_t n = 2048);

/// L f = |D| f + f - p Q^{p-1} f around a ground state.
///
/// Holds its own copy of the ground state. The dense matrix and its bordered
/// LU factorization are built on first use; a LinearizedOperator may be
/// shared across threads once those are built, or used from one thread.
class LinearizedOperator {
 public:
  explicit LinearizedOperator(GroundState ground);

  double p() const noexcept { return ground_.p; }
  const GroundState& ground() const noexcept { return ground_; }
  const Grid1D& grid() const noexcept { return ground_.grid(); }

  /// p Q^{p-1}, the (negated) potential.
  const RealField& potential() const noexcept { return potential_; }
  /// Q', the kernel direction.
  const RealField& kernel_direction() const noexcept { return q_prime_; }

  /// Multiplier + pointwise route.
  RealField apply(const RealField& f) const;

  bool dense_available() const noexcept { return grid().n_points() <= kDenseLimit; }
  /// Dense n x n matrix. Throws InvalidArgument when the grid exceeds
  /// kDenseLimit.
  const Eigen::MatrixXd& matrix() const;
  RealField apply_dense(const RealField& f) const;
  /// Largest |m_ij - m_ji|.
  double asymmetry() const;

 private:
  friend RealField invert_on_complement_dense(const LinearizedOperator& op, const RealField& g);

  struct DenseCache;

  GroundState ground_;
  RealField potential_;
  RealField q_prime_;
  std::shared_ptr<DenseCache> dense_;
};

LinearizedOperator build_operator(const GroundState& q);

struct NegativeEigen {
  double kappa = 0.0;          ///< the negative eigenvalue is -kappa
  RealField chi0{Grid1D(16, 1.0)};  ///< positive maximum, unit L^2
  std::vector<double> lowest;  ///< ascending, as computed
};

/// Lowest `count` eigenpairs of the dense matrix. Throws SpectrumAnomaly
/// unless exactly one eigenvalue is below -1e-6.
NegativeEigen negative_eigenpair(const LinearizedOperator& op, int count = 10);

/// Fraction of the L^2 mass of f inside |y| <= half_length / 4.
double localization_score(const RealField& f);

struct EdgeEigen {
  double e0 = 0.0;
  RealField y_plus{Grid1D(16, 1.0)};   ///< d_y L Y+ = e0 Y+
  RealField y_minus{Grid1D(16, 1.0)};  ///< d_y L Y- = -e0 Y-
  double localization_plus = 0.0;
  double localization_minus = 0.0;
  /// Largest distance from -z to the spectrum over the computed eigenvalues z.
  double pairing_defect = 0.0;
  std::vector<std::complex<double>> real_eigenvalues;  ///< the real ones, |z| > 1e-3
};

/// Unstable/stable pair of d_y L for p > 3. Y is normalized to unit L^2 with
/// its largest-magnitude sample positive. Throws BadExponent for p <= 3 and
/// NoRealPair when no localized real pair exists.
EdgeEigen edge_eigenpairs(const LinearizedOperator& op, double localization_threshold = 0.95);

struct DualEigen {
  RealField z_plus{Grid1D(16, 1.0)};
  RealField z_minus{Grid1D(16, 1.0)};
};

/// Biorthogonal duals: (Z+-, Y+-) = 1 and (Z+-, Y-+) = 0. They are the left
/// eigenvectors of d_y L, so L d_y Z+- = -+e0 Z+-; concretely Z+ is L Y-
/// scaled and Z- is L Y+ scaled. Throws DegenerateNormalization when
/// (L Y-+, Y+-) vanishes.
DualEigen dual_eigenpairs(const LinearizedOperator& op, const EdgeEigen& edge);

enum class InvertMethod { kAuto, kDense, kIterative };

struct InvertOptions {
  InvertMethod method = InvertMethod::kAuto;
  double tol = 1e-12;  ///< relative residual for the iterative route
  int max_iterations = 5000;
};

/// Solves L f = g with (f, Q') = 0 for g orthogonal to Q'. Throws
/// NotOrthogonal if |(g, Q')| > 1e-8 |g| |Q'| and SolveFailure if the solve
/// does not reach its tolerance. kAuto uses the bordered dense system up to
/// 2048 points and preconditioned MINRES beyond.
RealField invert_on_complement(const LinearizedOperator& op, const RealField& g, const InvertOptions& options = {});

/// L A = p kappa0 sigma_j Q^{p-1}.
RealField solve_A0(const LinearizedOperator& op, int sigma_j, const InvertOptions& options = {});

struct B0Profile {
  RealField profile{Grid1D(16, 1.0)};
  RealField source{Grid1D(16, 1.0)};      ///< g in (L B)' = g
  RealField tail_integral{Grid1D(16, 1.0)};  ///< G(y) = -int_y^inf g
  double compatibility = 0.0;  ///< |(g, Q)| / (|g| |Q|)
  double left_plateau = 0.0;   ///< mean over -[0.95, 0.85] half_length
  double right_plateau = 0.0;  ///< mean over [0.85, 0.95] half_length
  double expected_left = 0.0;  ///< -a sigma_i (p-2)/(p-1) int Q
};

/// B with (L B)' = -a sigma_i Lambda Q - 2 p kappa0 sigma_j (y Q^{p-1})',
/// B -> 0 at +infinity and (B, Q') = 0. Throws CompatibilityFailure if the
/// source is not orthogonal to Q within `compatibility_tol`.
B0Profile solve_B0(const LinearizedOperator& op, double a_ij, int sigma_i, int sigma_j,
                   double compatibility_tol = 1e-6, const InvertOptions& options = {});

}  // namespace gbo
