// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gbo/constants.hpp"

namespace gbo {

/// Positions (strictly decreasing) and velocity offsets at time t.
struct ParamState {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd mu;
};

struct ParamRate {
  Eigen::VectorXd dx;
  Eigen::VectorXd dmu;
};

/// dx = mu, dmu_i = -sum_{j != i} a_ij / (x_i - x_j)^3.
/// Throws CollisionImminent if x is not decreasing or a gap is below `floor`.
ParamRate ode_rhs(const ParamState& s, const Eigen::MatrixXd& a, double floor = 0.0);

struct StepStats {
  long accepted = 0;
  long rejected = 0;
};

struct TrajectoryLog {
  std::vector<double> times;
  std::vector<ParamState> states;
  StepStats stats;
};

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double floor_fraction = 1e-3;  ///< collision floor, relative to the initial minimum gap
  double initial_step = 0.0;     ///< 0 picks one from the rhs scale
  long max_steps = 5'000'000;
};

/// Dormand-Prince 5(4) with a PI step controller, in either time direction.
/// Every accepted step is logged. Throws StepFloor if the step size
/// underflows and CollisionImminent if a gap drops below the floor.
TrajectoryLog integrate(const ParamState& s0, const Eigen::MatrixXd& a, double t_end,
                        const IntegrateOptions& options = {});

/// x = alpha sqrt(t_in), mu = alpha / (2 sqrt(t_in)). Throws TooEarly unless
/// the smallest gap exceeds `min_gap`.
ParamState asymptotic_seed(const Eigen::VectorXd& alpha, double t_in, double min_gap = 1.0);

struct AsymptoticFit {
  Eigen::VectorXd alpha;  ///< coefficient of sqrt(t)
  Eigen::VectorXd beta;   ///< coefficient of log t
  Eigen::VectorXd gamma;  ///< constant
  Eigen::VectorXd alpha_stderr;
  Eigen::VectorXd rms_residual;
  double t_min = 0.0;
  double t_max = 0.0;
  int samples = 0;
};

/// Least-squares fit of each x_i(t) on {sqrt t, log t, 1} over the log entries
/// with t >= t_from. Throws InsufficientSpan if the fitted times cover less
/// than two decades.
AsymptoticFit asymptotic_fit(const TrajectoryLog& log, double t_from = 0.0);

/// exp of [[0, -t], [lambda/t, 0]]; its square is -lambda I.
Eigen::Matrix2d propagator(double lambda, double t);

}  // namespace gbo
