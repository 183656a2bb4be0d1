// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "gbo/error.hpp"
#include "gbo/fourier.hpp"
#include "gbo/linearized.hpp"
#include "gbo/pde.hpp"

namespace gbo {
namespace {

constexpr double kPi = std::numbers::pi;

const GroundState& bo_small() {
  static const GroundState gs = petviashvili_solve(2.0, Grid1D(2048, 100.0));
  return gs;
}

const GroundState& bo_large() {
  static const GroundState gs = petviashvili_solve(2.0, Grid1D(16384, 400.0));
  return gs;
}

SimConfig config_for(const GroundState& gs, double t_end) {
  SimConfig cfg;
  cfg.grid = gs.grid();
  cfg.p = gs.p;
  cfg.t_end = t_end;
  cfg.snapshot_stride = 200;
  cfg.keep_snapshots = false;
  return cfg;
}

double slope(const std::vector<double>& t, const std::vector<double>& x) {
  double mt = 0, mx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    mx += x[i];
  }
  mt /= static_cast<double>(t.size());
  mx /= static_cast<double>(t.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += (t[i] - mt) * (x[i] - mx);
    den += (t[i] - mt) * (t[i] - mt);
  }
  return num / den;
}

TEST(Step, ZeroStaysZero) {
  SimConfig cfg;
  cfg.grid = Grid1D(256, 20.0);
  cfg.p = 3.0;
  const SimState s{0.0, RealField(cfg.grid)};
  const SimState out = step(s, cfg);
  EXPECT_EQ(out.u.max_abs(), 0.0);
}

TEST(Step, LinearModeHasExactPhase) {
  SimConfig cfg;
  cfg.grid = Grid1D(256, 20.0);
  cfg.nonlinear = false;
  const double xi = 7.0 * cfg.grid.fundamental();
  SimState s{0.0, RealField::from_function(cfg.grid, [&](double y) { return std::cos(xi * y); })};
  Stepper st(cfg, s.u);
  for (int k = 0; k < 500; ++k) s = st.step(s);
  const RealField exact = RealField::from_function(cfg.grid, [&](double y) { return std::cos(xi * y + xi * xi * s.t); });
  EXPECT_LE((s.u - exact).max_abs(), 1e-12);
}

TEST(Step, FourthOrderInTime) {
  SimConfig cfg;
  cfg.grid = Grid1D(256, 20.0);
  cfg.p = 2.0;
  cfg.phase_budget = 20.0;  // the integrating factor is exact; this only probes the RK error
  const RealField u0 = RealField::from_function(cfg.grid, [](double y) { return 1.5 * std::exp(-y * y / 4.0); });
  const auto solve = [&](double dt, int steps) {
    cfg.dt = dt;
    Stepper st(cfg, u0);
    SimState s{0.0, u0};
    for (int k = 0; k < steps; ++k) s = st.step(s);
    return s.u;
  };
  const double t = 1.0;
  const RealField ref = solve(t / 1024, 1024);
  const double e1 = (solve(t / 32, 32) - ref).max_abs();
  const double e2 = (solve(t / 64, 64) - ref).max_abs();
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Step, RejectsUnstableStep) {
  SimConfig cfg = config_for(bo_small(), 1.0);
  cfg.dt = 10.0 * resolved_dt(cfg);
  EXPECT_THROW(Stepper(cfg, bo_small().field), Error);
  cfg.phase_budget = 1e9;
  cfg.dt = 1.0;
  EXPECT_THROW(Stepper(cfg, bo_small().field), Error);
}

TEST(Step, RejectsUnderResolvedData) {
  // The p = 4 profile is much wider in Fourier space than the p = 2 one.
  const GroundState gs = petviashvili_solve(4.0, Grid1D(2048, 50.0));
  SimConfig cfg = config_for(gs, 1.0);
  EXPECT_THROW(Stepper(cfg, gs.field), Error);
  cfg.resolution_tol = 0.0;
  EXPECT_NO_THROW(Stepper(cfg, gs.field));
}

TEST(Step, StopsOnTrackLoss) {
  SimConfig cfg = config_for(bo_small(), 1.0);
  cfg.snapshot_stride = 1;
  cfg.stop_on_track_loss = true;
  // Asking for two solitons where there is one.
  const ExperimentResult r = run_experiment(cfg, bo_small().field, 2, false);
  EXPECT_FALSE(r.completed);
  EXPECT_NE(r.stop_reason.find("TrackLost"), std::string::npos);
  EXPECT_EQ(r.steps, 0);
}

TEST(Step, BlowupGuard) {
  SimConfig cfg = config_for(bo_small(), 1.0);
  cfg.blowup_factor = 0.5;
  try {
    run_experiment(cfg, bo_small().field, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBlowupDetected);
  }
  const ExperimentResult r = run_experiment(cfg, bo_small().field, 1, false);
  EXPECT_FALSE(r.completed);
  EXPECT_FALSE(r.stop_reason.empty());
}

TEST(Step, ReflectionWithTimeReversal) {
  // u(t, y) -> u(-t, -y) maps solutions to solutions; so does u -> -u.
  const GroundState& gs = bo_small();
  SimConfig cfg = config_for(gs, 2.0);
  cfg.p = 2.5;
  const RealField u0 = RealField::from_function(cfg.grid, [](double y) {
    return 1.2 * std::exp(-(y - 10.0) * (y - 10.0) / 3.0) - 0.8 * std::exp(-(y + 12.0) * (y + 12.0) / 2.0);
  });
  const double dt = resolved_dt(cfg);
  const int steps = 400;
  Stepper fwd(cfg, u0);
  SimState a{0.0, u0}, b{0.0, u0.reflected()}, c{0.0, -1.0 * u0};
  for (int k = 0; k < steps; ++k) {
    a = fwd.step(a, dt);
    b = fwd.step(b, -dt);
    c = fwd.step(c, dt);
  }
  const double scale = a.u.max_abs();
  EXPECT_LE((b.u.reflected() - a.u).max_abs(), 1e-10 * scale);
  EXPECT_LE((c.u + a.u).max_abs(), 1e-13 * scale);
}

TEST(Multisoliton, SingleIsGroundState) {
  const GroundState& gs = bo_small();
  const RealField u = make_multisoliton(gs, {0.0}, {0.0}, {1}, false);
  EXPECT_EQ((u - gs.field).max_abs(), 0.0);
  const RealField v = make_multisoliton(gs, {3.7}, {0.0}, {-1}, false);
  EXPECT_LE((v + spectral_shift(gs.field, 3.7)).max_abs(), 1e-14);
}

TEST(Multisoliton, SpeedProfileIsTravellingWave) {
  // Q_c solves -|D|Q - cQ + Q^p = 0.
  const GroundState& gs = bo_small();
  const double c = 1.2;
  const RealField u = make_multisoliton(gs, {0.0}, {c - 1.0}, {1}, false);
  const RealField r = -1.0 * frac_dispersion(u) - c * u + power_nonlinearity(u, gs.p);
  EXPECT_LE(r.max_abs(), 1e-9);
  EXPECT_NEAR(u.max_abs(), 2.0 * c, 1e-3);
}

TEST(Multisoliton, MassCrossTerm) {
  const GroundState& gs = bo_large();
  const RealField line = whole_line_profile(gs);
  for (double d : {40.0, 80.0}) {
    const RealField u = make_multisoliton(gs, {d / 2, -d / 2}, {0.0, 0.0}, {1, 1}, false);
    const double cross = conserved_quantities(u, 2.0).mass - 2.0 * conserved_quantities(gs.field, 2.0).mass;
    const RealField q1 = spectral_shift(gs.field, d / 2), q2 = spectral_shift(gs.field, -d / 2);
    EXPECT_NEAR(cross, inner_product(q1, q2), 1e-10);
    // Tail overlap bound; the periodic images add O(1/L^2) on top.
    EXPECT_LE(std::abs(cross), 2.0 * gs.kappa0 * gs.int_Q / (d * d) * 1.05);
    // For p = 2, int Q(y) Q(y - d) = 8 pi / (d^2 + 4) on the line.
    const double on_line = inner_product(spectral_shift(line, d / 2), spectral_shift(line, -d / 2));
    EXPECT_NEAR(on_line / (8.0 * kPi / (d * d + 4.0)), 1.0, 1e-3) << d;
  }
}

TEST(Multisoliton, A0Term) {
  const GroundState& gs = bo_large();
  const LinearizedOperator op(gs);
  const RealField a0 = solve_A0(op, 1);
  const std::vector<double> x{60.0, 0.0, -70.0};
  const std::vector<int> s{1, 1, 1};
  const std::vector<double> mu(3, 0.0);
  const RealField diff = make_multisoliton(gs, x, mu, s, &a0) - make_multisoliton(gs, x, mu, s, nullptr);
  RealField expect(gs.grid());
  double bound = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double w = s[j] / ((x[i] - x[j]) * (x[i] - x[j]));
      expect.axpy(w, spectral_shift(a0, x[i]));
      bound += std::abs(w);
    }
  }
  EXPECT_LE((diff - expect).max_abs(), 1e-10 * a0.max_abs());
  EXPECT_LE(l2_norm(diff), l2_norm(a0) * bound * (1.0 + 1e-12));
  EXPECT_GE(l2_norm(diff), 0.5 * l2_norm(a0) * bound);
}

TEST(Multisoliton, Preconditions) {
  const GroundState& gs = bo_small();
  try {
    make_multisoliton(gs, {1.0, 0.0}, {0.0, 0.0}, {1, 1}, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOverlap);
  }
  EXPECT_THROW(make_multisoliton(gs, {0.0}, {0.7}, {1}, false), Error);
  EXPECT_THROW(make_multisoliton(gs, {0.0}, {0.0}, {2}, false), Error);
}

TEST(Conserved, Values) {
  const Conserved z = conserved_quantities(RealField(Grid1D(64, 5.0)), 3.0);
  EXPECT_EQ(z.mass, 0.0);
  EXPECT_EQ(z.energy, 0.0);
  const GroundState& gs = bo_large();
  const Conserved q = conserved_quantities(gs.field, 2.0);
  EXPECT_NEAR(q.mass, kPi, 1e-3);
  const Conserved shifted = conserved_quantities(spectral_shift(gs.field, 13.3), 2.0);
  EXPECT_NEAR(shifted.mass, q.mass, 1e-12);
  EXPECT_NEAR(shifted.energy, q.energy, 1e-12);
}

TEST(Track, HalfSpacingOffset) {
  const GroundState& gs = bo_large();
  const double h = gs.grid().spacing();
  for (double x0 : {0.5 * h, 10.5 * h, -7.25 * h}) {
    const TrackPoint tp = track_solitons(spectral_shift(gs.field, x0), 1);
    ASSERT_TRUE(tp.valid);
    EXPECT_LE(std::abs(tp.positions[0] - x0), 0.05 * h);
    EXPECT_NEAR(tp.amplitudes[0], 2.0, 1e-3);
  }
}

TEST(Track, PairsAndSigns) {
  const GroundState& gs = bo_large();
  const RealField same = make_multisoliton(gs, {30.0, -25.0}, {0.0, 0.0}, {1, 1}, false);
  const TrackPoint a = track_solitons(same, 2);
  ASSERT_TRUE(a.valid);
  EXPECT_NEAR(a.positions[0], 30.0, 0.05);
  EXPECT_NEAR(a.positions[1], -25.0, 0.05);
  const RealField alt = make_multisoliton(gs, {30.0, -25.0}, {0.0, 0.0}, {1, -1}, false);
  const TrackPoint b = track_solitons(alt, 2);
  ASSERT_TRUE(b.valid);
  EXPECT_GT(b.amplitudes[0], 0.0);
  EXPECT_LT(b.amplitudes[1], 0.0);
  // Identity kept through a prior, jumps rejected.
  const TrackPoint c = track_solitons(same, 2, std::vector<double>{29.0, -24.0});
  EXPECT_TRUE(c.valid);
  EXPECT_FALSE(track_solitons(same, 2, std::vector<double>{10.0, -24.0}).valid);
  EXPECT_FALSE(track_solitons(RealField(gs.grid()), 1).valid);
}

class SingleSolitonRun : public ::testing::Test {
 protected:
  static const ExperimentResult& lab() {
    static const ExperimentResult r = run_experiment(config_for(bo_small(), 50.0), bo_small().field, 1);
    return r;
  }
};

TEST_F(SingleSolitonRun, SpeedAndShape) {
  const ExperimentResult& r = lab();
  ASSERT_TRUE(r.completed);
  for (bool v : r.track.valid) EXPECT_TRUE(v);
  EXPECT_NEAR(slope(r.track.times, r.track.positions[0]), 1.0, 1e-3);
  const RealField exact = spectral_shift(bo_small().field, r.final_state.t);
  EXPECT_LE(l2_norm(r.final_state.u - exact) / l2_norm(exact), 1e-3);
}

TEST_F(SingleSolitonRun, Conservation) {
  const ExperimentResult& r = lab();
  const ConservationSample& a = r.conservation.front();
  for (const ConservationSample& c : r.conservation) {
    EXPECT_LE(std::abs(c.mass - a.mass) / a.mass, 1e-6);
    EXPECT_LE(std::abs(c.energy - a.energy) / std::abs(a.energy), 1e-6);
  }
  EXPECT_EQ(r.conservation.size(), static_cast<std::size_t>(r.steps) + 1);
  const Conserved direct = conserved_quantities(r.final_state.u, 2.0);
  EXPECT_NEAR(direct.mass, r.conservation.back().mass, 1e-12);
  EXPECT_NEAR(direct.energy, r.conservation.back().energy, 1e-10);
}

TEST_F(SingleSolitonRun, ComovingFrameAgrees) {
  SimConfig cfg = config_for(bo_small(), 50.0);
  cfg.frame = Frame::kComoving;
  const ExperimentResult co = run_experiment(cfg, bo_small().field, 1);
  const ExperimentResult& la = lab();
  ASSERT_EQ(co.track.times.size(), la.track.times.size());
  const double h = cfg.grid.spacing();
  for (std::size_t k = 0; k < co.track.times.size(); ++k) {
    EXPECT_LE(std::abs(co.track.positions[0][k] - (la.track.positions[0][k] - la.track.times[k])), 0.1 * h);
  }
}

TEST_F(SingleSolitonRun, DealiasingImmaterialWhenResolved) {
  // Same step as the dealiased run, which needs a wider phase budget here.
  SimConfig cfg = config_for(bo_small(), 50.0);
  cfg.dealias = false;
  cfg.dt = resolved_dt(config_for(bo_small(), 50.0));
  cfg.phase_budget = 1.2;
  const ExperimentResult raw = run_experiment(cfg, bo_small().field, 1);
  const ExperimentResult& la = lab();
  const double h = cfg.grid.spacing();
  for (std::size_t k = 0; k < raw.track.times.size(); ++k) {
    EXPECT_LE(std::abs(raw.track.positions[0][k] - la.track.positions[0][k]), 0.1 * h);
  }
}

TEST(Experiment, SnapshotsAtStride) {
  SimConfig cfg = config_for(bo_small(), 1.0);
  cfg.keep_snapshots = true;
  cfg.snapshot_stride = 100;
  const ExperimentResult r = run_experiment(cfg, bo_small().field, 1);
  const long expected = 1 + (r.steps + cfg.snapshot_stride - 1) / cfg.snapshot_stride;
  EXPECT_EQ(static_cast<long>(r.snapshots.size()), expected);
  EXPECT_EQ(r.snapshots.back().t, 1.0);
  EXPECT_EQ(r.track.times.size(), r.snapshots.size());
}

}  // namespace
}  // namespace gbo
