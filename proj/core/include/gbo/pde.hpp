// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gbo/ground_state.hpp"
#include "gbo/grid.hpp"

namespace gbo {

/// kLab: u_t + (-|D|u + |u|^{p-1}u)_x = 0.
/// kComoving: the same in y = x - t, w_t - (|D|w + w - |w|^{p-1}w)_y = 0.
enum class Frame { kLab, kComoving };

struct SimConfig {
  Grid1D grid{Grid1D(16, 1.0)};
  double p = 2.0;
  Frame frame = Frame::kLab;
  double dt = 0.0;  ///< 0 picks the phase-resolution step phase_budget / xi_max^2
  double t0 = 0.0;
  double t_end = 1.0;
  bool dealias = true;  ///< 2/3 rule on the nonlinear term
  int snapshot_stride = 100;
  bool keep_snapshots = true;
  bool nonlinear = true;
  double phase_budget = 0.5;   ///< bound on dt * xi_max^2
  double blowup_factor = 1e3;  ///< sup|u| growth that counts as blowup
  /// Largest coefficient of the initial nonlinear term that the dealiasing
  /// cut may discard, relative to its peak; 0 disables the check.
  double resolution_tol = 1e-6;
  bool stop_on_track_loss = false;  ///< end the run at the first invalid track point
};

struct SimState {
  double t = 0.0;
  RealField u{Grid1D(16, 1.0)};
};

/// Largest retained |xi| (2/3 of Nyquist with dealiasing).
double effective_max_wavenumber(const SimConfig& cfg);

/// The step used for cfg (resolves dt == 0).
double resolved_dt(const SimConfig& cfg);

struct StepperImpl;

/// Integrating-factor RK4 stepper. The linear flow is applied exactly in
/// Fourier space; the nonlinear flux is pseudo-spectral.
class Stepper {
 public:
  /// Throws InvalidArgument if dt breaks the phase budget or the RK4
  /// stability bound for the nonlinear flux of `initial`, or if the
  /// dealiasing cut would remove more than resolution_tol of that flux.
  Stepper(const SimConfig& cfg, const RealField& initial);

  /// Advances by one step of size dt (negative dt steps backwards). Throws
  /// BlowupDetected when sup|u| exceeds blowup_factor times the initial sup
  /// or the field is no longer finite.
  SimState step(const SimState& s);
  SimState step(const SimState& s, double dt);

  double dt() const noexcept { return dt_; }
  const SimConfig& config() const noexcept { return cfg_; }

 private:
  std::shared_ptr<StepperImpl> impl_;
  SimConfig cfg_;
  double dt_;
  double sup0_;
};

/// Convenience single step.
SimState step(const SimState& s, const SimConfig& cfg);

struct Conserved {
  double mass = 0.0;    ///< (1/2) int u^2
  double energy = 0.0;  ///< (1/2) int u |D| u - int |u|^{p+1} / (p+1)
};

Conserved conserved_quantities(const RealField& u, double p);

/// sum_i s_i Q_{1+mu_i}(y - x_i), optionally plus sum_{i != j} A0_j(y - x_i)/x_ij^2
/// where L A0_j = p kappa0 s_j Q^{p-1}. gs must live on the target grid.
/// Profiles with mu_i != 0 are re-solved on the dilated grid, so each term is
/// the discrete periodic traveling wave of speed 1 + mu_i. Throws Overlap if
/// x is not decreasing with gaps of at least 20 spacings, and InvalidArgument
/// for |mu_i| > 0.5 or size mismatches.
RealField make_multisoliton(const GroundState& gs, const std::vector<double>& x,
                            const std::vector<double>& mu, const std::vector<int>& signs,
                            bool include_A0);

/// As above with a precomputed A0 for s_j = +1 (the s_j = -1 profile is its
/// negative).
RealField make_multisoliton(const GroundState& gs, const std::vector<double>& x,
                            const std::vector<double>& mu, const std::vector<int>& signs,
                            const RealField* a0);

struct TrackPoint {
  std::vector<double> positions;   ///< decreasing
  std::vector<double> amplitudes;  ///< signed peak values
  bool valid = false;
};

/// Finds the n_expected largest local extrema of |u| and refines each by a
/// 3-point parabola. With a prior, identities are kept by nearest-neighbour
/// matching (periodic distance); a jump larger than max_jump or too few
/// extrema marks the point invalid instead of throwing.
TrackPoint track_solitons(const RealField& u, int n_expected,
                          const std::optional<std::vector<double>>& prior = std::nullopt,
                          double max_jump = 5.0);

struct SolitonTrack {
  std::vector<double> times;
  std::vector<std::vector<double>> positions;   ///< [soliton][time]
  std::vector<std::vector<double>> amplitudes;  ///< [soliton][time]
  std::vector<bool> valid;

  int solitons() const noexcept { return static_cast<int>(positions.size()); }
};

struct ConservationSample {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
};

struct ExperimentResult {
  SolitonTrack track;
  std::vector<ConservationSample> conservation;
  std::vector<SimState> snapshots;
  SimState final_state;
  long steps = 0;
  bool completed = false;
  std::string stop_reason;  ///< empty when completed
};

/// Runs cfg from `initial` (at cfg.t0), logging conserved quantities every
/// step and tracking at every snapshot. With rethrow = false a BlowupDetected
/// (or, with stop_on_track_loss, TrackLost) stop is returned in stop_reason
/// together with the partial record.
ExperimentResult run_experiment(const SimConfig& cfg, const RealField& initial, int n_expected,
                                bool rethrow = true);

}  // namespace gbo
