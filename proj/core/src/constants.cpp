// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gbo/constants.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gbo/error.hpp"

namespace gbo {
namespace {

void check_exponent(double p) {
  require(p != 3.0, ErrorCode::kCriticalExponent, "p = 3 is the critical exponent");
  require(p > 2.0, ErrorCode::kOutOfRange, "sign pattern needs p > 2");
}

// alpha = J theta: the first k entries are tail sums of theta, the last k are
// their negatives in reverse order and the middle entry (odd n) is zero.
Eigen::MatrixXd gap_jacobian(int n) {
  const int k = n / 2;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, k);
  for (int i = 0; i < k; ++i) {
    for (int l = i; l < k; ++l) {
      j(i, l) = 1.0;
      j(n - 1 - i, l) = -1.0;
    }
  }
  return j;
}

Eigen::VectorXd gradient(const Eigen::MatrixXd& a, const Eigen::VectorXd& alpha) {
  const int n = static_cast<int>(alpha.size());
  Eigen::VectorXd g = -alpha;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = alpha(i) - alpha(j);
      g(i) += 4.0 * a(i, j) / (d * d * d);
    }
  }
  return g;
}

Eigen::MatrixXd m_matrix(const Eigen::MatrixXd& a, const Eigen::VectorXd& alpha) {
  const int n = static_cast<int>(alpha.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = alpha(i) - alpha(j);
      const double d2 = d * d;
      m(i, j) = m(j, i) = -3.0 * a(i, j) / (d2 * d2);
    }
  }
  // Snap the off-diagonal entries to one binary grid (2^-45 of the largest)
  // so every partial row sum is exact and M 1 = 0 holds in any summation
  // order, not just the one used below.
  const double top = m.cwiseAbs().maxCoeff();
  if (top > 0.0) {
    const double quantum = std::ldexp(1.0, std::ilogb(top) + 1 - 45);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = std::nearbyint(m(i, j) / quantum) * quantum;
    }
  }
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) s += m(i, j);
    }
    m(i, i) = -s;
  }
  return m;
}

// Hessian of F in alpha is -4M - I.
Eigen::MatrixXd hessian(const Eigen::MatrixXd& a, const Eigen::VectorXd& alpha) {
  const int n = static_cast<int>(alpha.size());
  return -4.0 * m_matrix(a, alpha) - Eigen::MatrixXd::Identity(n, n);
}

struct Ascent {
  Eigen::VectorXd theta;
  bool converged = false;
};

Ascent maximize(const Eigen::MatrixXd& a, const Eigen::MatrixXd& jac, Eigen::VectorXd theta,
                int max_iterations) {
  const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
  double f = alpha_objective(a, jac * theta);
  Ascent out;
  // Stage 1: modified Newton ascent (Hessian eigenvalues flipped to be
  // negative), backtracking to stay inside theta > 0.
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd alpha = jac * theta;
    const Eigen::VectorXd g = jac.transpose() * gradient(a, alpha);
    if (g.cwiseAbs().maxCoeff() <= 1e-9 * scale) break;
    const Eigen::MatrixXd h = jac.transpose() * hessian(a, alpha) * jac;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const double floor = 1e-8 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Eigen::VectorXd lam = es.eigenvalues().cwiseAbs().cwiseMax(floor);
    const Eigen::MatrixXd& v = es.eigenvectors();
    const Eigen::VectorXd step = v * ((v.transpose() * g).cwiseQuotient(lam));
    double t = 1.0;
    bool moved = false;
    for (int b = 0; b < 60; ++b, t *= 0.5) {
      const Eigen::VectorXd trial = theta + t * step;
      if (trial.minCoeff() <= 0.0) continue;
      const double ft = alpha_objective(a, jac * trial);
      if (std::isfinite(ft) && ft >= f + 1e-4 * t * g.dot(step)) {
        theta = trial;
        f = ft;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  // Stage 2: plain Newton on the stationarity system.
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd alpha = jac * theta;
    const Eigen::VectorXd g = jac.transpose() * gradient(a, alpha);
    const Eigen::MatrixXd h = jac.transpose() * hessian(a, alpha) * jac;
    const Eigen::VectorXd step = -h.fullPivLu().solve(g);
    if (!step.allFinite()) return out;
    const Eigen::VectorXd next = theta + step;
    if (next.minCoeff() <= 0.0) return out;
    theta = next;
    if (step.cwiseAbs().maxCoeff() <= 1e-15 * theta.cwiseAbs().maxCoeff()) break;
  }
  const Eigen::VectorXd g = jac.transpose() * gradient(a, jac * theta);
  out.theta = theta;
  out.converged = g.allFinite() && g.cwiseAbs().maxCoeff() <= 1e-10 * scale;
  return out;
}

}  // namespace

std::vector<int> sign_pattern(double p, int n) {
  check_exponent(p);
  require(n >= 1, ErrorCode::kInvalidArgument, "n must be positive");
  std::vector<int> s(static_cast<std::size_t>(n), 1);
  if (p < 3.0) {
    for (int i = 1; i < n; i += 2) s[static_cast<std::size_t>(i)] = -1;
  }
  return s;
}

InteractionConstants interaction_constants(double p, int n, double kappa0, double int_Qp,
                                           double mass) {
  require(n >= 2, ErrorCode::kInvalidArgument, "need at least two solitons");
  require(mass > 0.0, ErrorCode::kInvalidArgument, "mass must be positive");
  InteractionConstants c;
  c.p = p;
  c.n = n;
  c.signs = sign_pattern(p, n);
  c.kappa0 = kappa0;
  c.int_Qp = int_Qp;
  c.mass = mass;
  const double base = 4.0 * kappa0 * (p - 1.0) * int_Qp / ((p - 3.0) * mass);
  c.a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) c.a(i, j) = c.signs[static_cast<std::size_t>(i)] * c.signs[static_cast<std::size_t>(j)] * base;
    }
  }
  return c;
}

InteractionConstants compute_a(const GroundState& gs, int n) {
  return interaction_constants(gs.p, n, gs.kappa0, gs.int_Qp, gs.mass);
}

InteractionConstants constants_from_matrix(const Eigen::MatrixXd& a) {
  require(a.rows() == a.cols() && a.rows() >= 2, ErrorCode::kInvalidArgument,
          "interaction matrix must be square, n >= 2");
  require(a.allFinite(), ErrorCode::kInvalidArgument, "interaction matrix must be finite");
  require(a.diagonal().cwiseAbs().maxCoeff() == 0.0, ErrorCode::kInvalidArgument,
          "interaction matrix must have zero diagonal");
  require((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0, ErrorCode::kInvalidArgument,
          "interaction matrix must be symmetric");
  InteractionConstants c;
  c.n = static_cast<int>(a.rows());
  c.a = a;
  return c;
}

double alpha_objective(const Eigen::MatrixXd& a, const Eigen::VectorXd& alpha) {
  const int n = static_cast<int>(alpha.size());
  double f = -0.5 * alpha.squaredNorm();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = alpha(i) - alpha(j);
      f -= a(i, j) / (d * d);
    }
  }
  return f;
}

double alpha_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& alpha) {
  const int n = static_cast<int>(alpha.size());
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = alpha(i) / 4.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = alpha(i) - alpha(j);
      s -= a(i, j) / (d * d * d);
    }
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

MSpectrum build_M(const Eigen::MatrixXd& a, const Eigen::VectorXd& alpha) {
  MSpectrum out;
  out.M = m_matrix(a, alpha);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.M);
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

AlphaSolution solve_alpha(const InteractionConstants& c, const AlphaOptions& options) {
  const InteractionConstants checked = constants_from_matrix(c.a);
  const Eigen::MatrixXd& a = checked.a;
  const int n = checked.n;
  const int k = n / 2;
  const Eigen::MatrixXd jac = gap_jacobian(n);

  const double theta0 = std::pow(4.0 * a.cwiseAbs().maxCoeff(), 0.25);
  require(theta0 > 0.0, ErrorCode::kNoCriticalPoint, "interaction matrix is zero");

  std::mt19937 rng(options.seed);
  std::uniform_real_distribution<double> jitter(0.3, 3.0);
  AlphaSolution sol;
  for (int s = 0; s < std::max(1, options.starts); ++s) {
    Eigen::VectorXd theta = Eigen::VectorXd::Constant(k, theta0);
    if (s > 0) {
      for (int i = 0; i < k; ++i) theta(i) *= jitter(rng);
    }
    const Ascent r = maximize(a, jac, theta, options.max_iterations);
    if (!r.converged) continue;
    CriticalPoint cp;
    cp.alpha = jac * r.theta;
    if (n % 2 == 1) cp.alpha(k) = 0.0;
    const bool seen = std::any_of(sol.critical_points.begin(), sol.critical_points.end(),
                                  [&](const CriticalPoint& q) {
                                    return (q.alpha - cp.alpha).norm() <= 1e-8 * cp.alpha.norm();
                                  });
    if (seen) continue;
    cp.objective = alpha_objective(a, cp.alpha);
    cp.residual = alpha_residual(a, cp.alpha);
    const Eigen::MatrixXd h = jac.transpose() * hessian(a, cp.alpha) * jac;
    cp.hessian_max = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().maxCoeff();
    sol.critical_points.push_back(cp);
  }
  require(!sol.critical_points.empty(), ErrorCode::kNoCriticalPoint,
          "no interior critical point found");

  // Prefer local maxima, then the largest objective.
  const auto better = [](const CriticalPoint& x, const CriticalPoint& y) {
    const bool xm = x.hessian_max <= 1e-8, ym = y.hessian_max <= 1e-8;
    if (xm != ym) return xm;
    return x.objective > y.objective;
  };
  std::sort(sol.critical_points.begin(), sol.critical_points.end(), better);
  const CriticalPoint& best = sol.critical_points.front();
  sol.alpha = best.alpha;
  sol.residual = best.residual;
  sol.objective = best.objective;
  sol.hessian_max = best.hessian_max;

  MSpectrum m = build_M(a, sol.alpha);
  sol.M = std::move(m.M);
  sol.eigenvalues = std::move(m.values);
  sol.eigenvectors = std::move(m.vectors);
  sol.alpha_eig_residual = (sol.M * sol.alpha - 0.75 * sol.alpha).norm();
  return sol;
}

}  // namespace gbo
