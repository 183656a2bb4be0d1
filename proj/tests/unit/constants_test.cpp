// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gbo/constants.hpp"
#include "gbo/error.hpp"

namespace gbo {
namespace {

// Constants with the structure of a real train but cheap scalar inputs.
InteractionConstants synthetic(double p, int n) { return interaction_constants(p, n, 2.0, 2.3, 1.4); }

const GroundState& quartic() {
  static const GroundState gs = petviashvili_solve(4.0, Grid1D(32768, 200.0));
  return gs;
}

TEST(SignPattern, Regimes) {
  EXPECT_EQ(sign_pattern(4.0, 3), (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(sign_pattern(2.5, 4), (std::vector<int>{1, -1, 1, -1}));
  try {
    sign_pattern(3.0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCriticalExponent);
  }
  try {
    sign_pattern(2.0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
}

TEST(ComputeA, SignsFollowRegime) {
  const InteractionConstants sup = synthetic(4.0, 5);
  const InteractionConstants sub = synthetic(2.5, 5);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(sup.a(i, i), 0.0);
    for (int j = 0; j < 5; ++j) {
      EXPECT_EQ(sup.a(i, j), sup.a(j, i));
      EXPECT_EQ(sub.a(i, j), sub.a(j, i));
      if (i == j) continue;
      EXPECT_GT(sup.a(i, j), 0.0);
      if ((i - j) % 2 != 0) {
        EXPECT_GT(sub.a(i, j), 0.0);
      } else {
        EXPECT_LT(sub.a(i, j), 0.0);
      }
    }
  }
}

TEST(ComputeA, HandValue) {
  // 4 * 2 * 3 * 2.3 / (1 * 1.4)
  const InteractionConstants c = synthetic(4.0, 2);
  EXPECT_NEAR(c.a(0, 1), 4.0 * 2.0 * 3.0 * 2.3 / 1.4, 1e-13);
}

TEST(ComputeA, RejectsCritical) {
  try {
    interaction_constants(3.0, 2, 1.0, 1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCriticalExponent);
  }
}

TEST(ComputeA, QuarticStableUnderRefinement) {
  const InteractionConstants coarse = compute_a(quartic(), 2);
  const InteractionConstants fine = compute_a(petviashvili_solve(4.0, Grid1D(65536, 200.0)), 2);
  EXPECT_GT(coarse.a(0, 1), 0.0);
  EXPECT_NEAR(coarse.a(0, 1) / fine.a(0, 1), 1.0, 1e-2);
}

TEST(ConstantsFromMatrix, Validates) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 2, 0;
  EXPECT_THROW(constants_from_matrix(a), Error);
  a << 1, 1, 1, 0;
  EXPECT_THROW(constants_from_matrix(a), Error);
}

TEST(SolveAlpha, TwoBodyClosedForm) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 8, 8, 0;
  const AlphaSolution s = solve_alpha(constants_from_matrix(a));
  EXPECT_NEAR(s.alpha(0), std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(s.alpha(1), -std::sqrt(2.0), 1e-10);
  EXPECT_LE(s.residual, 1e-10);
}

TEST(SolveAlpha, ResidualAndStructure) {
  for (double p : {2.5, 4.0}) {
    for (int n = 2; n <= 5; ++n) {
      SCOPED_TRACE(testing::Message() << "p=" << p << " n=" << n);
      const AlphaSolution s = solve_alpha(synthetic(p, n));
      EXPECT_LE(s.residual, 1e-10);
      EXPECT_LE(alpha_residual(synthetic(p, n).a, s.alpha), 1e-10);
      for (int i = 0; i + 1 < n; ++i) EXPECT_GT(s.alpha(i), s.alpha(i + 1));
      for (int i = 0; i < n; ++i) EXPECT_LE(std::abs(s.alpha(i) + s.alpha(n - 1 - i)), 1e-12);
      if (n % 2 == 1) EXPECT_EQ(s.alpha(n / 2), 0.0);
      EXPECT_LE(s.hessian_max, 1e-8);
      EXPECT_GE(s.critical_points.size(), 1u);
    }
  }
}

TEST(SolveAlpha, ScalingCovariance) {
  for (int n = 2; n <= 5; ++n) {
    const InteractionConstants c = synthetic(4.0, n);
    InteractionConstants scaled = c;
    const double s = 7.3;
    scaled.a *= s;
    const AlphaSolution a1 = solve_alpha(c);
    const AlphaSolution a2 = solve_alpha(scaled);
    const double f = std::pow(s, 0.25);
    EXPECT_LE((a2.alpha - f * a1.alpha).cwiseAbs().maxCoeff(), 1e-10 * a2.alpha.norm()) << n;
  }
}

TEST(SolveAlpha, ObjectiveIsLocalMaximum) {
  // Symmetric perturbations along the admissible family lower F.
  const InteractionConstants c = synthetic(4.0, 4);
  const AlphaSolution s = solve_alpha(c);
  for (double d : {1e-3, -1e-3}) {
    Eigen::VectorXd b = s.alpha;
    b(0) += d;
    b(3) -= d;
    EXPECT_LT(alpha_objective(c.a, b), s.objective);
    b = s.alpha;
    b(1) += d;
    b(2) -= d;
    EXPECT_LT(alpha_objective(c.a, b), s.objective);
  }
}

TEST(SolveAlpha, QuarticPairMatchesDirectFormula) {
  // For two like-signed solitons the velocity is
  // (-kappa0 int Q^p / (Q, Lambda Q))^{1/4}, with (Q, Lambda Q) by quadrature.
  const GroundState& gs = quartic();
  const AlphaSolution s = solve_alpha(compute_a(gs, 2));
  EXPECT_LE(s.residual, 1e-10);
  const double direct = std::pow(-gs.kappa0 * gs.int_Qp / gs.q_lambda_q, 0.25);
  EXPECT_NEAR(s.alpha(0) / direct, 1.0, 1e-4);
}

TEST(BuildM, EigenvectorAndRowSums) {
  for (double p : {2.5, 4.0}) {
    for (int n = 2; n <= 5; ++n) {
      const InteractionConstants c = synthetic(p, n);
      const AlphaSolution s = solve_alpha(c);
      const MSpectrum m = build_M(c.a, s.alpha);
      EXPECT_LE((m.M - m.M.transpose()).cwiseAbs().maxCoeff(), 0.0);
      EXPECT_LE((m.M * s.alpha - 0.75 * s.alpha).norm(), 1e-8 * s.alpha.norm());
      EXPECT_LE(s.alpha_eig_residual, 1e-8 * s.alpha.norm());
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
      EXPECT_EQ((m.M * ones).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(BuildM, TwoBodySpectrum) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 8, 8, 0;
  const AlphaSolution s = solve_alpha(constants_from_matrix(a));
  EXPECT_NEAR(s.eigenvalues(0), 0.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues(1), 0.75, 1e-10);
  const double w = 3.0 * 8.0 / std::pow(2.0 * s.alpha(0), 4);
  EXPECT_NEAR(s.M(0, 0), w, 1e-12);
  EXPECT_NEAR(s.M(0, 1), -w, 1e-12);
}

TEST(BuildM, EqualCouplingLadder) {
  // With all a_ij equal the spectrum of M is (m^2 - 1)/4, m = 1..n.
  for (int n = 2; n <= 7; ++n) {
    const AlphaSolution s = solve_alpha(synthetic(4.0, n));
    for (int m = 1; m <= n; ++m) {
      EXPECT_NEAR(s.eigenvalues(m - 1), (m * m - 1) / 4.0, 1e-9 * n * n) << n;
    }
  }
}

}  // namespace
}  // namespace gbo
