// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "gbo/constants.hpp"
#include "gbo/diagnostics.hpp"
#include "gbo/error.hpp"

namespace gbo {
namespace {

constexpr double kPi = std::numbers::pi;

const GroundState& bo_large() {
  static const GroundState gs = petviashvili_solve(2.0, Grid1D(65536, 1600.0));
  return gs;
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no gbo::Error thrown";
  return ErrorCode::kInvalidArgument;
}

SolitonTrack synthetic(const std::vector<double>& t, auto&& gap) {
  SolitonTrack tr;
  tr.times = t;
  tr.positions.assign(2, {});
  tr.amplitudes.assign(2, {});
  for (double s : t) {
    tr.positions[0].push_back(0.5 * gap(s));
    tr.positions[1].push_back(-0.5 * gap(s));
    tr.amplitudes[0].push_back(1.0);
    tr.amplitudes[1].push_back(1.0);
    tr.valid.push_back(true);
  }
  return tr;
}

std::vector<double> geometric(double a, double b, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) t[static_cast<std::size_t>(k)] = a * std::pow(b / a, k / (n - 1.0));
  return t;
}

// n = 2 with a_12 = 1; alpha = +-(1/2)^{1/4}.
struct PairOrbit {
  Eigen::MatrixXd a{{0.0, 1.0}, {1.0, 0.0}};
  AlphaSolution sol = solve_alpha(constants_from_matrix(a));
};

TEST(Action, Basics) {
  EXPECT_EQ(action(RealField(Grid1D(64, 4.0)), 3.0), 0.0);
  const GroundState& gs = bo_large();
  const Conserved c = conserved_quantities(gs.field, 2.0);
  EXPECT_DOUBLE_EQ(action(gs.field, 2.0), c.mass + c.energy);
  // For p = 2: int Q^2 = 2 pi, int Q^3 = 3 pi and int Q|D|Q = int Q^3 - int Q^2.
  EXPECT_NEAR(action(gs.field, 2.0), kPi + kPi / 2.0 - kPi, 2e-3);
}

TEST(EnergyExpansion, PairConstantIsFourPiForBO) {
  // kappa0 = 2, int Q^2 = 2 pi.
  EXPECT_NEAR(pair_action_constant(bo_large()), 4.0 * kPi, 4.0 * kPi * 1e-3);
}

TEST(EnergyExpansion, BOFit) {
  const GroundState& gs = bo_large();
  const std::vector<double> seps = geometric(30.0, 120.0, 9);
  for (int sigma : {1, -1}) {
    const FitReport f = energy_expansion_check(gs, sigma, seps);
    EXPECT_NEAR(f.exponent, -2.0, 0.1) << sigma;
    EXPECT_NEAR(f.coefficient / (-sigma * 4.0 * kPi), 1.0, 0.1) << sigma;
    EXPECT_GT(f.r_squared, 0.999);
    EXPECT_EQ(f.samples_used, 9);
    EXPECT_EQ(f.window.first, 30.0);
    EXPECT_EQ(f.window.second, 120.0);
  }
}

TEST(EnergyExpansion, SignFlipIsExactAtLeadingOrder) {
  const GroundState& gs = bo_large();
  for (double d : {40.0, 90.0}) {
    const double plus = pair_action_excess(gs, 1, d), minus = pair_action_excess(gs, -1, d);
    EXPECT_LT(plus, 0.0);
    EXPECT_GT(minus, 0.0);
    // The even-in-sigma part is O(1/d^3) at most.
    EXPECT_LT(std::abs(plus + minus), 0.2 * std::abs(plus - minus)) << d;
  }
}

TEST(EnergyExpansion, SupercriticalSigns) {
  const GroundState gs = petviashvili_solve(4.0, Grid1D(65536, 600.0));
  for (double d : {20.0, 30.0, 45.0, 60.0, 75.0}) {
    EXPECT_LT(pair_action_excess(gs, 1, d), 0.0) << d;
    EXPECT_GT(pair_action_excess(gs, -1, d), 0.0) << d;
  }
  const FitReport f = energy_expansion_check(gs, 1, {20.0, 30.0, 45.0, 60.0, 75.0});
  EXPECT_NEAR(f.exponent, -2.0, 0.2);
  EXPECT_NEAR(f.coefficient / -pair_action_constant(gs), 1.0, 0.2);
}

TEST(EnergyExpansion, Preconditions) {
  const GroundState& gs = bo_large();
  EXPECT_EQ(code_of([&] { pair_action_excess(gs, 1, 10.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { pair_action_excess(gs, 1, 250.0); }), ErrorCode::kDomainTooSmall);
  EXPECT_NO_THROW(pair_action_excess(gs, 1, 200.0));
  EXPECT_EQ(code_of([&] { pair_action_excess(gs, 0, 50.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { energy_expansion_check(gs, 1, {30, 40, 50, 60}); }), ErrorCode::kInvalidArgument);
}

TEST(SeparationFit, ExactSquareRoot) {
  const SolitonTrack tr = synthetic(geometric(1.0, 100.0, 40), [](double t) { return 3.0 * std::sqrt(t); });
  const FitReport f = separation_law_fit(tr);
  EXPECT_NEAR(f.exponent, 0.5, 1e-6);
  EXPECT_NEAR(f.coefficient, 3.0, 1e-5);
  EXPECT_NEAR(f.offset, 0.0, 1e-4);
  const FitReport g = separation_law_fit_fixed(tr, 0.0);
  EXPECT_NEAR(g.exponent, 0.5, 1e-12);
  EXPECT_NEAR(g.coefficient, 3.0, 1e-11);
  EXPECT_NEAR(g.r_squared, 1.0, 1e-12);
}

TEST(SeparationFit, RecoversOffset) {
  const SolitonTrack tr = synthetic(geometric(5.0, 500.0, 60), [](double t) { return 2.0 * std::sqrt(t) + 7.0; });
  const FitReport f = separation_law_fit(tr);
  EXPECT_NEAR(f.exponent, 0.5, 1e-4);
  EXPECT_NEAR(f.offset, 7.0, 1e-2);
  EXPECT_NEAR(f.coefficient, 2.0, 1e-3);
  EXPECT_EQ(f.samples_used, 60);
  // Ignoring the offset biases the exponent.
  EXPECT_LT(separation_law_fit_fixed(tr, 0.0).exponent, 0.45);
}

TEST(SeparationFit, OtherExponents) {
  for (double b : {0.3, 0.5, 1.0}) {
    const SolitonTrack tr = synthetic(geometric(2.0, 400.0, 50), [b](double t) { return 1.5 * std::pow(t, b) - 0.5; });
    EXPECT_NEAR(separation_law_fit(tr).exponent, b, 1e-4) << b;
  }
}

TEST(SeparationFit, SkipsInvalidAndEarlySamples) {
  SolitonTrack tr = synthetic(geometric(1.0, 1000.0, 40), [](double t) { return 3.0 * std::sqrt(t); });
  tr.valid[5] = false;
  tr.positions[0][5] = 1e6;
  const FitReport f = separation_law_fit_fixed(tr, 0.0, 10.0);
  EXPECT_NEAR(f.exponent, 0.5, 1e-12);
  EXPECT_GE(f.window.first, 10.0);
  EXPECT_LT(f.samples_used, 40);
}

TEST(SeparationFit, InsufficientSpan) {
  const auto sq = [](double t) { return std::sqrt(t); };
  EXPECT_EQ(code_of([&] { separation_law_fit(synthetic(geometric(1.0, 9.0, 30), sq)); }), ErrorCode::kInsufficientSpan);
  EXPECT_EQ(code_of([&] { separation_law_fit(synthetic(geometric(1.0, 100.0, 4), sq)); }), ErrorCode::kInsufficientSpan);
  const SolitonTrack shrinking = synthetic(geometric(1.0, 100.0, 30), [](double t) { return 10.0 / t; });
  EXPECT_EQ(code_of([&] { separation_law_fit(shrinking); }), ErrorCode::kInsufficientSpan);
}

TEST(SeparationFit, ReducedOrbit) {
  const PairOrbit o;
  const TrajectoryLog log = integrate(asymptotic_seed(o.sol.alpha, 10.0), o.a, 1e4);
  const FitReport f = separation_law_fit(track_from_log(log));
  EXPECT_NEAR(f.exponent, 0.5, 0.02);
  EXPECT_NEAR(f.coefficient / (o.sol.alpha(0) - o.sol.alpha(1)), 1.0, 0.02);
  // Same input, same report.
  const FitReport g = separation_law_fit(track_from_log(log));
  EXPECT_EQ(f.exponent, g.exponent);
  EXPECT_EQ(f.coefficient, g.coefficient);
}

TEST(Compare, IdenticalIsZero) {
  const PairOrbit o;
  const TrajectoryLog log = integrate(asymptotic_seed(o.sol.alpha, 10.0), o.a, 100.0);
  const CompareReport r = ode_pde_compare(track_from_log(log), log);
  EXPECT_EQ(r.sup_err, 0.0);
  EXPECT_EQ(r.rms_err, 0.0);
  EXPECT_EQ(r.rows.size(), log.times.size());
}

TEST(Compare, HermiteInterpolationOfExactOrbit) {
  // Coarse log of the exact orbit x = alpha sqrt(t); the track sits between
  // the logged times.
  const PairOrbit o;
  TrajectoryLog log;
  for (double t : geometric(10.0, 100.0, 12)) {
    log.times.push_back(t);
    log.states.push_back(asymptotic_seed(o.sol.alpha, t));
  }
  const SolitonTrack tr = synthetic(geometric(11.0, 95.0, 25), [&](double t) {
    return (o.sol.alpha(0) - o.sol.alpha(1)) * std::sqrt(t);
  });
  const CompareReport r = ode_pde_compare(tr, log);
  EXPECT_EQ(r.rows.size(), 25u);
  EXPECT_LT(r.sup_err, 1e-5);
  EXPECT_LE(r.rms_err, r.sup_err);
}

TEST(Compare, ErrorGrowsWithSeedPerturbation) {
  const PairOrbit o;
  const ParamState seed = asymptotic_seed(o.sol.alpha, 10.0);
  const TrajectoryLog ref = integrate(seed, o.a, 100.0);
  double prev = 0.0;
  for (double eps : {0.01, 0.02, 0.05, 0.1, 0.2}) {
    ParamState s = seed;
    s.mu *= 1.0 + eps;
    const CompareReport r = ode_pde_compare(track_from_log(integrate(s, o.a, 100.0)), ref);
    EXPECT_GT(r.sup_err, prev) << eps;
    prev = r.sup_err;
  }
}

TEST(Compare, WindowMismatch) {
  const PairOrbit o;
  const TrajectoryLog log = integrate(asymptotic_seed(o.sol.alpha, 10.0), o.a, 100.0);
  const SolitonTrack late = synthetic({200.0, 300.0}, [](double t) { return t; });
  EXPECT_EQ(code_of([&] { ode_pde_compare(late, log); }), ErrorCode::kWindowMismatch);
  SolitonTrack three = synthetic({20.0}, [](double t) { return t; });
  three.positions.push_back({-100.0});
  three.amplitudes.push_back({1.0});
  EXPECT_EQ(code_of([&] { ode_pde_compare(three, log); }), ErrorCode::kWindowMismatch);
}

TEST(Compare, Csv) {
  const PairOrbit o;
  TrajectoryLog log;
  log.times = {10.0, 20.0};
  log.states = {asymptotic_seed(o.sol.alpha, 10.0), asymptotic_seed(o.sol.alpha, 20.0)};
  const CompareReport r = ode_pde_compare(track_from_log(log), log);
  std::ostringstream os;
  write_compare_csv(os, r);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,pde_1,pde_2,ode_1,ode_2,gap,normalized");
  std::getline(is, line);
  EXPECT_EQ(line.rfind("10,", 0), 0u);
  EXPECT_EQ(os.str().back(), '\n');
  EXPECT_EQ(os.str().find('\r'), std::string::npos);
}

}  // namespace
}  // namespace gbo
