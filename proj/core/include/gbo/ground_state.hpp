// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "gbo/grid.hpp"

namespace gbo {

struct GroundStateOptions {
  double tol = 1e-10;
  int max_iterations = 500;
};

/// Converged solution of -|D|Q - Q + Q^p = 0 together with the integrals the
/// interaction constants are built from.
struct GroundState {
  double p = 0.0;
  RealField field{Grid1D(16, 1.0)};
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;

  double kappa0 = 0.0;  ///< Q(y) ~ kappa0 / y^2
  double kappa1 = 0.0;  ///< next tail coefficient, of 1 / y^4
  // Whole-line values: periodic images are removed and the tail beyond the
  // box is added analytically.
  double mass = 0.0;    ///< integral of Q^2
  double int_Qp = 0.0;  ///< integral of Q^p
  double int_Q = 0.0;   ///< integral of Q
  double h_value = 0.0;
  double q_lambda_q = 0.0;  ///< (Q, Lambda Q)

  const Grid1D& grid() const noexcept { return field.grid(); }
};

/// |u|^{p-1} u, pointwise.
RealField power_nonlinearity(const RealField& u, double p);

/// -|D|Q - Q + |Q|^{p-1}Q.
RealField ground_state_residual(const RealField& q, double p);

/// Stabilized fixed-point (Petviashvili) solve. Throws BadExponent for
/// p <= 1 and NoConvergence when the iteration cap is hit.
GroundState petviashvili_solve(double p, const Grid1D& grid, const GroundStateOptions& options = {});

/// c^{1/(p-1)} Q(c y) sampled on Q's grid.
///
/// Uses the whole-line profile: the periodic images are removed from the
/// trigonometric interpolant with the fitted tail, and arguments outside the
/// domain use the tail expansion. c == 1 returns Q unchanged. Throws
/// ScaleOutOfRange if c <= 0 or the dilated spectrum is not resolved.
RealField rescale(const GroundState& q, double c);

/// Q with the periodic images of its 1/y^2 tail subtracted, i.e. the
/// whole-line profile sampled on the grid.
RealField whole_line_profile(const GroundState& q);

/// Largest |xi| whose coefficient exceeds rel_tol times the largest one.
double spectral_bandwidth(const RealField& f, double rel_tol);

/// Lambda f = f/(p-1) + y f'. The y weight is cut off smoothly between 80%
/// and 90% of the half length and vanishes beyond.
RealField scaling_generator(const RealField& f, double p);

/// Smooth cutoff used by scaling_generator.
double boundary_window(double y, double half_length);

struct TailFit {
  double kappa0 = 0.0;
  double kappa1 = 0.0;
  double kappa0_left = 0.0;
  double kappa0_right = 0.0;
  double kappa1_left = 0.0;
  double kappa1_right = 0.0;
  std::pair<double, double> window;
};

/// Default fit window [0.25, 0.6] * half_length.
std::pair<double, double> default_tail_window(const Grid1D& grid);

/// Least-squares fit of y^2 Q(y) on {1, y^-2} over the window on both sides,
/// averaged. The basis functions are summed over the periodic images of the
/// domain, so the fit recovers the whole-line coefficients.
TailFit fit_tail_kappa(const RealField& q, std::pair<double, double> window);
TailFit fit_tail_kappa(const GroundState& q, std::pair<double, double> window);
TailFit fit_tail_kappa(const GroundState& q);

/// (int ||D|^{1/2}u|^2)^{(p-1)/2} * int u^2 / int |u|^{p+1}. ZeroField for u == 0.
double gn_quotient(const RealField& u, double p);

/// H(u) = 1/2 int u^2 + 1/2 int ||D|^{1/2}u|^2 - 1/(p+1) int |u|^{p+1}.
double h_functional(const RealField& u, double p);

/// Grid with `n` points whose Nyquist wavenumber covers the spectrum of the
/// p ground state down to rel_tol, taking the largest half length that does.
Grid1D resolved_grid(double p, std::size_t n, double rel_tol = 1e-12);

}  // namespace gbo
