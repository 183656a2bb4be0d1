// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gbo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "gbo/error.hpp"
#include "gbo/fourier.hpp"

namespace gbo {
namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rss = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.rss += r * r;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - f.rss / syy, 0.0, 1.0) : 1.0;
  return f;
}

struct Separations {
  std::vector<double> t, d;
};

Separations collect(const SolitonTrack& track, double t_from) {
  require(track.solitons() >= 2, ErrorCode::kInsufficientSpan, "need at least two solitons");
  const auto last = static_cast<std::size_t>(track.solitons() - 1);
  Separations s;
  for (std::size_t k = 0; k < track.times.size(); ++k) {
    if (!track.valid[k] || track.times[k] < t_from || !(track.times[k] > 0.0)) continue;
    s.t.push_back(track.times[k]);
    s.d.push_back(track.positions[0][k] - track.positions[last][k]);
  }
  if (s.t.size() < 5) throw Error(ErrorCode::kInsufficientSpan, "fewer than 5 valid samples");
  const auto [tmin, tmax] = std::minmax_element(s.t.begin(), s.t.end());
  if (*tmax < 10.0 * *tmin) {
    std::ostringstream msg;
    msg << "samples span [" << *tmin << ", " << *tmax << "], less than a decade";
    throw Error(ErrorCode::kInsufficientSpan, msg.str());
  }
  const std::size_t first = static_cast<std::size_t>(tmin - s.t.begin());
  const std::size_t final = static_cast<std::size_t>(tmax - s.t.begin());
  require(s.d[final] > s.d[first], ErrorCode::kInsufficientSpan, "separation does not grow over the window");
  return s;
}

FitReport log_log(const Separations& s, double offset) {
  std::vector<double> lx(s.t.size()), ly(s.t.size());
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    require(s.d[i] > offset, ErrorCode::kInvalidArgument, "offset reaches the separation");
    lx[i] = std::log(s.t[i]);
    ly[i] = std::log(s.d[i] - offset);
  }
  const LineFit f = fit_line(lx, ly);
  FitReport r;
  r.exponent = f.slope;
  r.coefficient = std::exp(f.intercept);
  r.r_squared = f.r_squared;
  r.window = {*std::min_element(s.t.begin(), s.t.end()), *std::max_element(s.t.begin(), s.t.end())};
  r.samples_used = static_cast<int>(s.t.size());
  r.offset = offset;
  return r;
}

// 1 - r^2 rather than the residual itself: the latter shrinks as the offset
// runs off to -infinity.
double log_log_misfit(const Separations& s, double offset) {
  std::vector<double> lx(s.t.size()), ly(s.t.size());
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    lx[i] = std::log(s.t[i]);
    ly[i] = std::log(s.d[i] - offset);
  }
  const LineFit f = fit_line(lx, ly);
  return 1.0 - f.r_squared;
}

}  // namespace

double action(const RealField& u, double p) {
  const Conserved c = conserved_quantities(u, p);
  return c.mass + c.energy;
}

double pair_action_constant(const GroundState& gs) { return gs.kappa0 * gs.int_Qp; }

double pair_action_excess(const GroundState& gs, int sigma, double separation) {
  require(sigma == 1 || sigma == -1, ErrorCode::kInvalidArgument, "sigma must be +1 or -1");
  require(separation >= 20.0, ErrorCode::kInvalidArgument, "separations below 20 are not in the tail regime");
  // Periodic images shift d^2 * excess by roughly 2 (d / 2L)^2 relative.
  if (separation > gs.grid().half_length() / 8.0) {
    std::ostringstream msg;
    msg << "separation " << separation << " needs a half-length of at least " << 8.0 * separation;
    throw Error(ErrorCode::kDomainTooSmall, msg.str());
  }
  RealField u = spectral_shift(gs.field, 0.5 * separation);
  u.axpy(static_cast<double>(sigma), spectral_shift(gs.field, -0.5 * separation));
  return action(u, gs.p) - 2.0 * action(gs.field, gs.p);
}

FitReport energy_expansion_check(const GroundState& gs, int sigma, const std::vector<double>& separations) {
  require(separations.size() >= 5, ErrorCode::kInvalidArgument, "need at least 5 separations");
  std::vector<double> lx, ly;
  double sign = 0.0;
  for (double d : separations) {
    const double h = pair_action_excess(gs, sigma, d);
    const double sg = h < 0.0 ? -1.0 : 1.0;
    require(h != 0.0 && (sign == 0.0 || sg == sign), ErrorCode::kOutOfRange,
            "the action excess changes sign over the separations");
    sign = sg;
    lx.push_back(std::log(d));
    ly.push_back(std::log(std::abs(h)));
  }
  const LineFit f = fit_line(lx, ly);
  FitReport r;
  r.exponent = f.slope;
  r.coefficient = sign * std::exp(f.intercept);
  r.r_squared = f.r_squared;
  r.window = {*std::min_element(separations.begin(), separations.end()),
              *std::max_element(separations.begin(), separations.end())};
  r.samples_used = static_cast<int>(separations.size());
  return r;
}

FitReport separation_law_fit(const SolitonTrack& track, double t_from) {
  const Separations s = collect(track, t_from);
  const auto [dmin, dmax] = std::minmax_element(s.d.begin(), s.d.end());
  const double span = *dmax - *dmin;
  const double hi = *dmin - 1e-9 * std::max(span, std::abs(*dmin));
  const double lo = *dmin - 20.0 * std::max(*dmax, span);
  const auto best = boost::math::tools::brent_find_minima(
      [&s](double c) { return log_log_misfit(s, c); }, lo, hi, std::numeric_limits<double>::digits / 2);
  return log_log(s, best.first);
}

FitReport separation_law_fit_fixed(const SolitonTrack& track, double offset, double t_from) {
  return log_log(collect(track, t_from), offset);
}

SolitonTrack track_from_log(const TrajectoryLog& log) {
  SolitonTrack tr;
  require(!log.states.empty(), ErrorCode::kInvalidArgument, "empty trajectory");
  const auto n = static_cast<std::size_t>(log.states.front().x.size());
  tr.positions.assign(n, {});
  tr.amplitudes.assign(n, {});
  for (std::size_t k = 0; k < log.states.size(); ++k) {
    tr.times.push_back(log.times[k]);
    tr.valid.push_back(true);
    for (std::size_t i = 0; i < n; ++i) {
      tr.positions[i].push_back(log.states[k].x(static_cast<Eigen::Index>(i)));
      tr.amplitudes[i].push_back(NAN);
    }
  }
  return tr;
}

CompareReport ode_pde_compare(const SolitonTrack& track, const TrajectoryLog& log) {
  require(!log.states.empty(), ErrorCode::kWindowMismatch, "empty trajectory");
  const auto n = static_cast<std::size_t>(log.states.front().x.size());
  if (static_cast<std::size_t>(track.solitons()) != n) {
    std::ostringstream msg;
    msg << "track has " << track.solitons() << " solitons, trajectory has " << n;
    throw Error(ErrorCode::kWindowMismatch, msg.str());
  }
  // Work on an ascending copy of the time axis.
  std::vector<std::size_t> order(log.times.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  if (log.times.size() > 1 && log.times.back() < log.times.front()) std::reverse(order.begin(), order.end());
  std::vector<double> times(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) times[k] = log.times[order[k]];

  CompareReport rep;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < track.times.size(); ++k) {
    const double t = track.times[k];
    if (!track.valid[k] || t < times.front() || t > times.back()) continue;
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t j = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    if (j + 1 >= times.size()) j = times.size() >= 2 ? times.size() - 2 : 0;
    const ParamState& a = log.states[order[j]];
    CompareRow row;
    row.t = t;
    row.pde.resize(n);
    row.ode.resize(n);
    if (times.size() == 1) {
      for (std::size_t i = 0; i < n; ++i) row.ode[i] = a.x(static_cast<Eigen::Index>(i));
    } else {
      const ParamState& b = log.states[order[j + 1]];
      const double h = times[j + 1] - times[j];
      const double s = (t - times[j]) / h;
      const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
      const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
      for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        row.ode[i] = h00 * a.x(ii) + h10 * h * a.mu(ii) + h01 * b.x(ii) + h11 * h * b.mu(ii);
      }
    }
    row.gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i) row.gap = std::min(row.gap, row.ode[i] - row.ode[i + 1]);
    if (n == 1) row.gap = 1.0;
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      row.pde[i] = track.positions[i][k];
      err = std::max(err, std::abs(row.pde[i] - row.ode[i]));
    }
    row.normalized = err / row.gap;
    rep.sup_err = std::max(rep.sup_err, row.normalized);
    sum_sq += row.normalized * row.normalized;
    rep.rows.push_back(std::move(row));
  }
  if (rep.rows.empty()) throw Error(ErrorCode::kWindowMismatch, "no valid track time inside the trajectory window");
  rep.rms_err = std::sqrt(sum_sq / static_cast<double>(rep.rows.size()));
  return rep;
}

void write_compare_csv(std::ostream& os, const CompareReport& report) {
  const std::size_t n = report.rows.empty() ? 0 : report.rows.front().pde.size();
  os << "t";
  for (std::size_t i = 1; i <= n; ++i) os << ",pde_" << i;
  for (std::size_t i = 1; i <= n; ++i) os << ",ode_" << i;
  os << ",gap,normalized\n";
  const auto old = os.precision(17);
  for (const CompareRow& r : report.rows) {
    os << r.t;
    for (double v : r.pde) os << ',' << v;
    for (double v : r.ode) os << ',' << v;
    os << ',' << r.gap << ',' << r.normalized << '\n';
  }
  os.precision(old);
}

}  // namespace gbo
