// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gbo/reduced_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>

#include "gbo/error.hpp"

namespace gbo {
namespace {

using Vec = std::vector<double>;

double min_gap(const Eigen::VectorXd& x) {
  double g = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) g = std::min(g, x(i) - x(i + 1));
  return g;
}

// Packed state y = (x, mu).
void forces(const Vec& y, Vec& dy, const Eigen::MatrixXd& a) {
  const std::size_t n = y.size() / 2;
  for (std::size_t i = 0; i < n; ++i) {
    dy[i] = y[n + i];
    double f = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = y[i] - y[j];
      f -= a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / (d * d * d);
    }
    dy[n + i] = f;
  }
}

Vec pack(const ParamState& s) {
  const auto n = static_cast<std::size_t>(s.x.size());
  Vec y(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = s.x(static_cast<Eigen::Index>(i));
    y[n + i] = s.mu(static_cast<Eigen::Index>(i));
  }
  return y;
}

ParamState unpack(const Vec& y, double t) {
  const auto n = static_cast<Eigen::Index>(y.size() / 2);
  ParamState s;
  s.t = t;
  s.x = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  s.mu = Eigen::Map<const Eigen::VectorXd>(y.data() + n, n);
  return s;
}

bool finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double z) { return std::isfinite(z); });
}

}  // namespace

ParamRate ode_rhs(const ParamState& s, const Eigen::MatrixXd& a, double floor) {
  const Eigen::Index n = s.x.size();
  require(s.mu.size() == n && a.rows() == n && a.cols() == n, ErrorCode::kInvalidArgument,
          "state and interaction matrix sizes differ");
  const double g = min_gap(s.x);
  if (!(g > floor)) {
    std::ostringstream msg;
    msg << "minimum gap " << g << " at or below floor " << floor;
    throw Error(ErrorCode::kCollisionImminent, msg.str());
  }
  Vec y = pack(s), dy(y.size());
  forces(y, dy, a);
  const ParamState r = unpack(dy, s.t);
  return {r.x, r.mu};
}

TrajectoryLog integrate(const ParamState& s0, const Eigen::MatrixXd& a, double t_end,
                        const IntegrateOptions& options) {
  require(t_end != s0.t, ErrorCode::kInvalidArgument, "t_end equals the start time");
  require(options.rtol > 0.0 && options.atol >= 0.0, ErrorCode::kInvalidArgument,
          "tolerances must be positive");
  const double floor = options.floor_fraction * min_gap(s0.x);
  ode_rhs(s0, a, floor);  // validates sizes and ordering

  namespace odeint = boost::numeric::odeint;
  odeint::runge_kutta_dopri5<Vec> stepper;
  const auto system = [&a](const Vec& y, Vec& dy, double) { forces(y, dy, a); };

  const double dir = t_end > s0.t ? 1.0 : -1.0;
  double t = s0.t;
  Vec y = pack(s0), dydt(y.size()), out(y.size()), dout(y.size()), err(y.size());
  system(y, dydt, t);

  const auto scaled_norm = [&](const Vec& v, const Vec& ref1, const Vec& ref2) {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double sc = options.atol + options.rtol * std::max(std::abs(ref1[i]), std::abs(ref2[i]));
      m = std::max(m, std::abs(v[i]) / sc);
    }
    return m;
  };

  double h = std::abs(options.initial_step);
  if (h == 0.0) {
    const double d0 = scaled_norm(y, y, y), d1 = scaled_norm(dydt, y, y);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  }
  h = std::min(h, std::abs(t_end - t));

  TrajectoryLog log;
  log.times.push_back(t);
  log.states.push_back(s0);

  // PI controller (Gustafsson), order 5.
  constexpr double kSafety = 0.9, kBeta = 0.04, kAlpha = 0.2 - 0.75 * kBeta;
  constexpr double kMinFac = 0.2, kMaxFac = 10.0;
  double err_prev = 1e-4;
  bool last_rejected = false;

  while (dir * (t_end - t) > 0.0) {
    if (log.stats.accepted + log.stats.rejected >= options.max_steps) {
      throw Error(ErrorCode::kStepFloor, "step budget exhausted");
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t;
      throw Error(ErrorCode::kStepFloor, msg.str());
    }
    const bool final_step = h >= std::abs(t_end - t);
    const double step = final_step ? t_end - t : dir * h;
    stepper.do_step(system, y, dydt, t, out, dout, step, err);
    const double e = finite(out) ? scaled_norm(err, y, out) : std::numeric_limits<double>::infinity();
    if (e <= 1.0) {
      t = final_step ? t_end : t + step;
      y.swap(out);
      dydt.swap(dout);
      ++log.stats.accepted;
      ParamState s = unpack(y, t);
      if (!(min_gap(s.x) > floor)) {
        std::ostringstream msg;
        msg << "gap fell below " << floor << " at t = " << t;
        throw Error(ErrorCode::kCollisionImminent, msg.str());
      }
      log.times.push_back(t);
      log.states.push_back(std::move(s));
      const double ee = std::max(e, 1e-10);
      double fac = kSafety * std::pow(ee, -kAlpha) * std::pow(err_prev, kBeta);
      fac = std::clamp(fac, kMinFac, last_rejected ? 1.0 : kMaxFac);
      err_prev = ee;
      last_rejected = false;
      h = std::abs(step) * fac;
    } else {
      ++log.stats.rejected;
      const double fac = std::isfinite(e) ? std::max(kMinFac, kSafety * std::pow(e, -0.2)) : kMinFac;
      h = std::abs(step) * fac;
      last_rejected = true;
    }
  }
  return log;
}

ParamState asymptotic_seed(const Eigen::VectorXd& alpha, double t_in, double min_gap_required) {
  require(t_in > 0.0, ErrorCode::kTooEarly, "t_in must be positive");
  const double r = std::sqrt(t_in);
  ParamState s;
  s.t = t_in;
  s.x = alpha * r;
  s.mu = alpha / (2.0 * r);
  if (!(min_gap(s.x) > min_gap_required)) {
    std::ostringstream msg;
    msg << "smallest gap " << min_gap(s.x) << " at t_in = " << t_in << " is below " << min_gap_required;
    throw Error(ErrorCode::kTooEarly, msg.str());
  }
  return s;
}

AsymptoticFit asymptotic_fit(const TrajectoryLog& log, double t_from) {
  std::vector<std::size_t> rows;
  for (std::size_t k = 0; k < log.times.size(); ++k) {
    if (log.times[k] >= t_from && log.times[k] > 0.0) rows.push_back(k);
  }
  require(rows.size() >= 4, ErrorCode::kInsufficientSpan, "too few samples to fit");
  double t_min = std::numeric_limits<double>::infinity(), t_max = 0.0;
  for (std::size_t k : rows) {
    t_min = std::min(t_min, log.times[k]);
    t_max = std::max(t_max, log.times[k]);
  }
  if (t_max < 100.0 * t_min) {
    std::ostringstream msg;
    msg << "fit window [" << t_min << ", " << t_max << "] spans less than two decades";
    throw Error(ErrorCode::kInsufficientSpan, msg.str());
  }

  const auto m = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index n = log.states[rows.front()].x.size();
  Eigen::MatrixXd basis(m, 3), y(m, n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const std::size_t k = rows[static_cast<std::size_t>(r)];
    const double t = log.times[k];
    basis(r, 0) = std::sqrt(t);
    basis(r, 1) = std::log(t);
    basis(r, 2) = 1.0;
    y.row(r) = log.states[k].x.transpose();
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::MatrixXd coef = qr.solve(y);
  const Eigen::MatrixXd resid = y - basis * coef;
  const Eigen::MatrixXd cov = (basis.transpose() * basis).inverse();

  AsymptoticFit f;
  f.alpha = coef.row(0).transpose();
  f.beta = coef.row(1).transpose();
  f.gamma = coef.row(2).transpose();
  f.alpha_stderr.resize(n);
  f.rms_residual.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rss = resid.col(i).squaredNorm();
    f.rms_residual(i) = std::sqrt(rss / static_cast<double>(m));
    const double s2 = m > 3 ? rss / static_cast<double>(m - 3) : 0.0;
    f.alpha_stderr(i) = std::sqrt(s2 * cov(0, 0));
  }
  f.t_min = t_min;
  f.t_max = t_max;
  f.samples = static_cast<int>(m);
  return f;
}

Eigen::Matrix2d propagator(double lambda, double t) {
  require(t > 0.0, ErrorCode::kInvalidArgument, "propagator needs t > 0");
  // exp(G) = c I + s G with G^2 = -lambda I.
  double c = 1.0, s = 1.0;
  if (lambda > 0.0) {
    const double r = std::sqrt(lambda);
    c = std::cos(r);
    s = std::sin(r) / r;
  } else if (lambda < 0.0) {
    const double r = std::sqrt(-lambda);
    c = std::cosh(r);
    s = std::sinh(r) / r;
  }
  Eigen::Matrix2d e;
  e << c, -t * s, lambda / t * s, c;
  return e;
}

}  // namespace gbo
