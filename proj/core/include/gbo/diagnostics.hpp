// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "gbo/ground_state.hpp"
#include "gbo/pde.hpp"
#include "gbo/reduced_dynamics.hpp"

namespace gbo {

/// Power-law fit y ~ coefficient * x^exponent.
struct FitReport {
  double exponent = 0.0;
  double coefficient = 0.0;
  double r_squared = 0.0;  ///< of the log-log regression, clamped to [0, 1]
  std::pair<double, double> window;
  int samples_used = 0;
  double offset = 0.0;  ///< constant removed before the log-log fit (0 if none)
};

/// H(u) = (1/2) int u^2 + (1/2) int u |D| u - int |u|^{p+1} / (p+1).
double action(const RealField& u, double p);

/// The pair-interaction constant kappa0 * int Q^p, i.e. the coefficient of
/// -sigma / dx^2 in the two-soliton action (not the tail coefficient itself).
double pair_action_constant(const GroundState& gs);

/// H(Q(. - x1) + sigma Q(. - x2)) - 2 H(Q) at x1 - x2 = d, with both copies
/// centred on the box. Throws InvalidArgument for d < 20 and DomainTooSmall
/// when d exceeds 1/8 of the half-length (beyond that the periodic images
/// bias the excess by more than about 1%).
double pair_action_excess(const GroundState& gs, int sigma, double separation);

/// Power-law fit of |pair_action_excess| over `separations` (at least 5).
/// The coefficient carries the sign of the excess; the expected values are
/// exponent -2 and coefficient -sigma * pair_action_constant(gs).
FitReport energy_expansion_check(const GroundState& gs, int sigma, const std::vector<double>& separations);

/// Fits d(t) - C = A t^b with d = x_1 - x_n over the valid samples with
/// t >= t_from. C is chosen to minimise the log-log residual (the fit has no
/// way to know the position offsets). Throws InsufficientSpan for fewer than
/// 5 samples, less than a decade of t or a separation that does not grow.
FitReport separation_law_fit(const SolitonTrack& track, double t_from = 0.0);

/// Same with C fixed (e.g. 0 for an exactly self-similar orbit).
FitReport separation_law_fit_fixed(const SolitonTrack& track, double offset, double t_from = 0.0);

/// A SolitonTrack view of an ODE trajectory (every accepted step).
SolitonTrack track_from_log(const TrajectoryLog& log);

struct CompareRow {
  double t = 0.0;
  std::vector<double> pde;
  std::vector<double> ode;
  double gap = 0.0;         ///< smallest ODE gap at t
  double normalized = 0.0;  ///< max_i |pde_i - ode_i| / gap
};

struct CompareReport {
  double sup_err = 0.0;  ///< max over rows of `normalized`
  double rms_err = 0.0;
  std::vector<CompareRow> rows;
};

/// Compares tracked positions (comoving frame) with the ODE trajectory,
/// interpolated to the track times by cubic Hermite interpolation using
/// dx/dt = mu. Invalid track points are skipped. Throws WindowMismatch when
/// the soliton counts differ or no valid track time lies inside the log.
CompareReport ode_pde_compare(const SolitonTrack& track, const TrajectoryLog& log);

/// Header t,pde_1..pde_n,ode_1..ode_n,gap,normalized; 17 significant digits.
void write_compare_csv(std::ostream& os, const CompareReport& report);

}  // namespace gbo
