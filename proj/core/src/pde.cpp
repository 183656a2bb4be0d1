// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gbo/pde.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>

#include "gbo/error.hpp"
#include "gbo/fourier.hpp"
#include "gbo/linearized.hpp"

namespace gbo {

namespace {

// Largest |v|, or infinity if any sample is not finite.
double checked_sup(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    s = std::max(s, std::abs(x));
  }
  return s;
}

// sum_j |v_j|^q, with the common integer exponents unrolled.
double abs_power_sum(std::span<const double> v, double q) {
  double s = 0.0;
  if (q == 3.0) {
    for (double x : v) s += std::abs(x) * x * x;
  } else if (q == 4.0) {
    for (double x : v) s += (x * x) * (x * x);
  } else if (q == 5.0) {
    for (double x : v) s += std::abs(x) * (x * x) * (x * x);
  } else {
    for (double x : v) s += std::pow(std::abs(x), q);
  }
  return s;
}

}  // namespace

// Spectral work space. The state is kept as unnormalized r2c coefficients.
struct StepperImpl {
  Grid1D grid;
  double p;
  bool nonlinear;
  int int_power = 0;  // p when it is a small integer, else 0
  const RealFft& fft;
  std::size_t n, half;
  std::vector<Complex> lin;   // linear symbol L(xi)
  std::vector<Complex> nfac;  // -i xi * dealias mask
  std::vector<double> xi;
  double cached_dt = std::numeric_limits<double>::quiet_NaN();
  std::vector<Complex> e1, e2;
  std::vector<Complex> uh, a, b, c, d, tmp, scratch;
  std::vector<double> phys;
  double last_sup = 0.0;  // sup|u| seen by the latest first stage

  StepperImpl(const SimConfig& cfg)
      : grid(cfg.grid),
        p(cfg.p),
        nonlinear(cfg.nonlinear),
        fft(RealFft::for_size(cfg.grid.n_points())),
        n(cfg.grid.n_points()),
        half(n / 2 + 1),
        lin(half),
        nfac(half),
        xi(half),
        e1(half),
        e2(half),
        uh(half),
        a(half),
        b(half),
        c(half),
        d(half),
        tmp(half),
        scratch(half),
        phys(n) {
    if (p == std::round(p) && p >= 2.0 && p <= 5.0) int_power = static_cast<int>(p);
    const double xi1 = grid.fundamental();
    const std::size_t keep = cfg.dealias ? n / 3 : n / 2;
    for (std::size_t k = 0; k < half; ++k) {
      const double x = xi1 * static_cast<double>(k);
      xi[k] = x;
      const bool nyquist = k == n / 2;
      double w = x * x;
      if (cfg.frame == Frame::kComoving) w += x;
      lin[k] = nyquist ? Complex(0.0) : Complex(0.0, w);
      const bool kept = !nyquist && k <= keep;
      nfac[k] = kept ? Complex(0.0, -x) : Complex(0.0);
    }
  }

  void set_dt(double dt) {
    if (dt == cached_dt) return;
    for (std::size_t k = 0; k < half; ++k) {
      e1[k] = std::exp(lin[k] * dt);
      e2[k] = std::exp(lin[k] * (0.5 * dt));
    }
    cached_dt = dt;
  }

  void load(const RealField& u) { fft.r2c(u.samples(), uh); }

  void store(RealField& u) {
    fft.c2r(uh, u.samples(), scratch);
    const double inv = 1.0 / static_cast<double>(n);
    for (double& v : u.samples()) v *= inv;
  }

  // phys <- u(in); returns nothing, fills phys with the physical samples.
  void to_physical(const std::vector<Complex>& in) {
    fft.c2r(in, phys, scratch);
    const double inv = 1.0 / static_cast<double>(n);
    for (double& v : phys) v *= inv;
  }

  void flux(const std::vector<Complex>& in, std::vector<Complex>& out, bool track_sup) {
    if (nonlinear || track_sup) to_physical(in);
    if (track_sup) last_sup = checked_sup(phys);
    if (!nonlinear) {
      std::fill(out.begin(), out.end(), Complex(0.0));
      return;
    }
    power_in_place();
    fft.r2c(phys, out);
    for (std::size_t k = 0; k < half; ++k) out[k] *= nfac[k];
  }

  void power_in_place() {
    switch (int_power) {
      case 2:
        for (double& v : phys) v *= std::abs(v);
        break;
      case 3:
        for (double& v : phys) v = v * v * v;
        break;
      case 4:
        for (double& v : phys) v = v * v * v * std::abs(v);
        break;
      case 5:
        for (double& v : phys) {
          const double v2 = v * v;
          v = v2 * v2 * v;
        }
        break;
      default:
        for (double& v : phys) v = std::pow(std::abs(v), p - 1.0) * v;
    }
  }

  // One IF-RK4 step on uh.
  void advance(double dt) {
    set_dt(dt);
    flux(uh, a, true);
    for (std::size_t k = 0; k < half; ++k) tmp[k] = e2[k] * (uh[k] + 0.5 * dt * a[k]);
    flux(tmp, b, false);
    for (std::size_t k = 0; k < half; ++k) tmp[k] = e2[k] * uh[k] + 0.5 * dt * b[k];
    flux(tmp, c, false);
    for (std::size_t k = 0; k < half; ++k) tmp[k] = e1[k] * uh[k] + dt * e2[k] * c[k];
    flux(tmp, d, false);
    for (std::size_t k = 0; k < half; ++k) {
      uh[k] = e1[k] * uh[k] + (dt / 6.0) * (e1[k] * a[k] + 2.0 * e2[k] * (b[k] + c[k]) + d[k]);
    }
  }

  // Conserved quantities of the current state; phys must hold it already
  // when `phys_current` is set.
  Conserved conserved(bool phys_current) {
    if (!phys_current) to_physical(uh);
    const double h = grid.spacing();
    double m = 0.0;
    for (double v : phys) m += v * v;
    const double pot = abs_power_sum(phys, p + 1.0);
    double disp = 0.0;
    for (std::size_t k = 1; k < half; ++k) {
      const double w = (k == n / 2) ? 1.0 : 2.0;
      disp += w * xi[k] * std::norm(uh[k]);
    }
    // Parseval: h * sum_j u_j (|D|u)_j = h / n * sum_k |xi||uh|^2.
    disp *= h / static_cast<double>(n);
    Conserved out;
    out.mass = 0.5 * h * m;
    out.energy = 0.5 * disp - h * pot / (p + 1.0);
    return out;
  }
};

namespace {

void require_finite_sup(double sup, double limit, double t) {
  if (!std::isfinite(sup) || sup > limit) {
    std::ostringstream msg;
    msg << "sup|u| = " << sup << " exceeds " << limit << " at t = " << t;
    throw Error(ErrorCode::kBlowupDetected, msg.str());
  }
}

double sup_abs(const RealField& u) { return checked_sup(u.samples()); }

}  // namespace

double effective_max_wavenumber(const SimConfig& cfg) {
  const double nyq = cfg.grid.max_wavenumber();
  return cfg.dealias ? nyq * (static_cast<double>(cfg.grid.n_points() / 3) / static_cast<double>(cfg.grid.n_points() / 2)) : nyq;
}

double resolved_dt(const SimConfig& cfg) {
  if (cfg.dt != 0.0) return cfg.dt;
  const double x = effective_max_wavenumber(cfg);
  return cfg.phase_budget / (x * x);
}

Stepper::Stepper(const SimConfig& cfg, const RealField& initial)
    : impl_(std::make_shared<StepperImpl>(cfg)), cfg_(cfg), dt_(resolved_dt(cfg)) {
  require(initial.grid() == cfg.grid, ErrorCode::kGridMismatch, "initial field is not on the configured grid");
  require(cfg.p > 1.0, ErrorCode::kInvalidArgument, "p must exceed 1");
  require(std::isfinite(dt_) && dt_ != 0.0, ErrorCode::kInvalidArgument, "time step must be finite and nonzero");
  const double x = effective_max_wavenumber(cfg);
  if (std::abs(dt_) * x * x > cfg.phase_budget * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt * xi_max^2 = " << std::abs(dt_) * x * x << " exceeds the phase budget " << cfg.phase_budget;
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  sup0_ = sup_abs(initial);
  if (cfg.nonlinear && cfg.dealias && cfg.resolution_tol > 0.0 && sup0_ > 0.0) {
    const SpectralField nl = forward_transform(power_nonlinearity(initial, cfg.p));
    const auto c = nl.coefficients();
    const std::size_t n = c.size(), keep = n / 3;
    double peak = 0.0, cut = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double& slot = std::min(k, n - k) <= keep ? peak : cut;
      slot = std::max(slot, std::abs(c[k]));
    }
    if (cut > cfg.resolution_tol * peak) {
      std::ostringstream msg;
      msg << "initial data is under-resolved: the dealiasing cut drops " << cut / peak
          << " of the nonlinear term's spectrum (tolerance " << cfg.resolution_tol << ")";
      throw Error(ErrorCode::kInvalidArgument, msg.str());
    }
  }
  if (cfg.nonlinear) {
    // RK4 covers the imaginary axis up to 2 sqrt 2.
    const double rate = x * cfg.p * std::pow(sup0_, cfg.p - 1.0);
    if (std::abs(dt_) * rate > 2.5) {
      std::ostringstream msg;
      msg << "dt = " << dt_ << " is outside the RK4 stability region of the nonlinear flux (limit "
          << 2.5 / rate << ")";
      throw Error(ErrorCode::kInvalidArgument, msg.str());
    }
  }
}

SimState Stepper::step(const SimState& s) { return step(s, dt_); }

SimState Stepper::step(const SimState& s, double dt) {
  require(s.u.grid() == cfg_.grid, ErrorCode::kGridMismatch, "state is not on the configured grid");
  impl_->load(s.u);
  impl_->advance(dt);
  SimState out{s.t + dt, RealField(cfg_.grid)};
  impl_->store(out.u);
  require_finite_sup(sup_abs(out.u), cfg_.blowup_factor * std::max(sup0_, 1e-300), out.t);
  return out;
}

SimState step(const SimState& s, const SimConfig& cfg) {
  Stepper st(cfg, s.u);
  return st.step(s);
}

Conserved conserved_quantities(const RealField& u, double p) {
  const double h = u.grid().spacing();
  double m = 0.0;
  for (double v : u.samples()) m += v * v;
  const double pot = abs_power_sum(u.samples(), p + 1.0);
  Conserved out;
  out.mass = 0.5 * h * m;
  out.energy = 0.5 * dispersion_energy(u) - h * pot / (p + 1.0);
  return out;
}

RealField make_multisoliton(const GroundState& gs, const std::vector<double>& x,
                            const std::vector<double>& mu, const std::vector<int>& signs,
                            bool include_A0) {
  if (!include_A0 || x.size() < 2) return make_multisoliton(gs, x, mu, signs, nullptr);
  const LinearizedOperator op(gs);
  const RealField a0 = solve_A0(op, 1);
  return make_multisoliton(gs, x, mu, signs, &a0);
}

RealField make_multisoliton(const GroundState& gs, const std::vector<double>& x,
                            const std::vector<double>& mu, const std::vector<int>& signs,
                            const RealField* a0) {
  const std::size_t n = x.size();
  require(n >= 1 && mu.size() == n && signs.size() == n, ErrorCode::kInvalidArgument,
          "positions, speeds and signs must have the same nonzero length");
  const Grid1D& g = gs.grid();
  for (std::size_t i = 0; i < n; ++i) {
    require(signs[i] == 1 || signs[i] == -1, ErrorCode::kInvalidArgument, "signs must be +1 or -1");
    require(std::abs(mu[i]) <= 0.5, ErrorCode::kInvalidArgument, "|mu_i| must not exceed 0.5");
  }
  const double min_gap = 20.0 * g.spacing();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(x[i] - x[i + 1] >= min_gap)) {
      std::ostringstream msg;
      msg << "gap x_" << i + 1 << " - x_" << i + 2 << " = " << x[i] - x[i + 1] << " is below " << min_gap;
      throw Error(ErrorCode::kOverlap, msg.str());
    }
  }
  // Periodic wrap: the outermost pair must be separated across the boundary too.
  if (n > 1 && !(x.back() + g.length() - x.front() >= min_gap)) {
    throw Error(ErrorCode::kOverlap, "solitons overlap across the periodic boundary");
  }

  std::map<double, RealField> profiles;
  const auto profile = [&](double m) -> const RealField& {
    auto it = profiles.find(m);
    if (it != profiles.end()) return it->second;
    if (m == 0.0) return profiles.emplace(m, gs.field).first->second;
    // Q_c(y_j) = c^{1/(p-1)} Q(c y_j), and c y_j are the nodes of the dilated grid.
    const double cc = 1.0 + m;
    const GroundState dil = petviashvili_solve(gs.p, Grid1D(g.n_points(), cc * g.half_length()));
    RealField f(g, dil.field.values());
    f *= std::pow(cc, 1.0 / (gs.p - 1.0));
    return profiles.emplace(m, std::move(f)).first->second;
  };

  RealField u(g);
  for (std::size_t i = 0; i < n; ++i) {
    u.axpy(static_cast<double>(signs[i]), spectral_shift(profile(mu[i]), x[i]));
  }
  if (a0 != nullptr) {
    require(a0->grid() == g, ErrorCode::kGridMismatch, "A0 profile is on another grid");
    for (std::size_t i = 0; i < n; ++i) {
      double w = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double dx = x[i] - x[j];
        w += static_cast<double>(signs[j]) / (dx * dx);
      }
      if (w != 0.0) u.axpy(w, spectral_shift(*a0, x[i]));
    }
  }
  return u;
}

TrackPoint track_solitons(const RealField& u, int n_expected, const std::optional<std::vector<double>>& prior,
                          double max_jump) {
  require(n_expected >= 1, ErrorCode::kInvalidArgument, "need at least one soliton to track");
  const Grid1D& g = u.grid();
  const std::size_t n = g.n_points();
  const auto s = u.samples();
  const double peak = u.max_abs();
  TrackPoint out;
  if (!(peak > 0.0)) return out;

  struct Candidate {
    std::size_t j;
    double value;
  };
  std::vector<Candidate> cands;
  for (std::size_t j = 0; j < n; ++j) {
    const double f0 = std::abs(s[j]);
    const double fm = std::abs(s[(j + n - 1) % n]), fp = std::abs(s[(j + 1) % n]);
    if (f0 >= fm && f0 > fp && f0 >= 0.05 * peak) cands.push_back({j, f0});
  }
  if (cands.size() < static_cast<std::size_t>(n_expected)) return out;
  std::partial_sort(cands.begin(), cands.begin() + n_expected, cands.end(),
                    [](const Candidate& l, const Candidate& r) { return l.value > r.value; });
  cands.resize(static_cast<std::size_t>(n_expected));

  const double len = g.length();
  const auto wrap = [&](double y) {
    y = std::fmod(y + g.half_length(), len);
    if (y < 0.0) y += len;
    return y - g.half_length();
  };
  std::vector<double> pos, amp;
  for (const Candidate& cd : cands) {
    const std::size_t j = cd.j;
    const double fm = std::abs(s[(j + n - 1) % n]), f0 = std::abs(s[j]), fp = std::abs(s[(j + 1) % n]);
    const double den = fm - 2.0 * f0 + fp;
    const double delta = den != 0.0 ? 0.5 * (fm - fp) / den : 0.0;
    pos.push_back(wrap(g.point(j) + delta * g.spacing()));
    amp.push_back(std::copysign(f0 - 0.25 * (fm - fp) * delta, s[j]));
  }

  std::vector<std::size_t> order(pos.size());
  std::iota(order.begin(), order.end(), 0);
  if (prior) {
    require(prior->size() == pos.size(), ErrorCode::kInvalidArgument, "prior has the wrong length");
    // Greedy nearest-neighbour assignment on periodic distance.
    std::vector<bool> used(pos.size(), false);
    for (std::size_t i = 0; i < prior->size(); ++i) {
      double best = INFINITY;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < pos.size(); ++k) {
        if (used[k]) continue;
        const double dist = std::abs(wrap(pos[k] - (*prior)[i]));
        if (dist < best) {
          best = dist;
          arg = k;
        }
      }
      if (best > max_jump) return out;
      used[arg] = true;
      order[i] = arg;
    }
  } else {
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return pos[l] > pos[r]; });
  }
  for (std::size_t k : order) {
    out.positions.push_back(pos[k]);
    out.amplitudes.push_back(amp[k]);
  }
  if (prior) {
    // Follow the prior through the periodic seam instead of wrapping.
    for (std::size_t i = 0; i < out.positions.size(); ++i) {
      out.positions[i] = (*prior)[i] + wrap(out.positions[i] - (*prior)[i]);
    }
  }
  out.valid = true;
  for (std::size_t i = 0; i + 1 < out.positions.size(); ++i) {
    if (!(out.positions[i] > out.positions[i + 1])) out.valid = false;
  }
  return out;
}

ExperimentResult run_experiment(const SimConfig& cfg, const RealField& initial, int n_expected, bool rethrow) {
  Stepper stepper(cfg, initial);
  const double dt = stepper.dt();
  require((cfg.t_end - cfg.t0) * dt > 0.0, ErrorCode::kInvalidArgument, "dt must point from t0 to t_end");
  require(cfg.snapshot_stride >= 1, ErrorCode::kInvalidArgument, "snapshot stride must be positive");
  const double span = cfg.t_end - cfg.t0;
  const long full_steps = static_cast<long>(std::floor(span / dt * (1.0 + 1e-12)));
  const double rest = span - static_cast<double>(full_steps) * dt;
  const bool partial = std::abs(rest) > 1e-9 * std::abs(dt);
  const long total = full_steps + (partial ? 1 : 0);

  StepperImpl impl(cfg);
  impl.load(initial);
  const double limit = cfg.blowup_factor * std::max(initial.max_abs(), 1e-300);

  ExperimentResult res;
  res.track.positions.assign(static_cast<std::size_t>(n_expected), {});
  res.track.amplitudes.assign(static_cast<std::size_t>(n_expected), {});
  std::optional<std::vector<double>> prior;
  RealField u(cfg.grid);

  const auto record = [&](double t) {
    impl.store(u);
    const TrackPoint tp = track_solitons(u, n_expected, prior);
    res.track.times.push_back(t);
    res.track.valid.push_back(tp.valid);
    for (int i = 0; i < n_expected; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      res.track.positions[ii].push_back(tp.valid ? tp.positions[ii] : NAN);
      res.track.amplitudes[ii].push_back(tp.valid ? tp.amplitudes[ii] : NAN);
    }
    if (tp.valid) prior = tp.positions;
    if (cfg.keep_snapshots) res.snapshots.push_back({t, u});
    if (!tp.valid && cfg.stop_on_track_loss) {
      std::ostringstream msg;
      msg << "lost track of " << n_expected << " solitons at t = " << t;
      throw Error(ErrorCode::kTrackLost, msg.str());
    }
  };

  double t = cfg.t0;
  {
    const Conserved q0 = impl.conserved(false);
    res.conservation.push_back({t, q0.mass, q0.energy});
  }
  try {
    record(t);
    for (long k = 0; k < total; ++k) {
      const double h = (partial && k == total - 1) ? rest : dt;
      impl.advance(h);
      require_finite_sup(impl.last_sup, limit, t);  // sup at the start of the step
      t = (k == total - 1) ? cfg.t_end : t + h;
      const Conserved q = impl.conserved(false);
      res.conservation.push_back({t, q.mass, q.energy});
      ++res.steps;
      if ((k + 1) % cfg.snapshot_stride == 0 || k == total - 1) record(t);
    }
    impl.store(u);
    require_finite_sup(u.max_abs(), limit, t);
    res.completed = true;
  } catch (const Error& e) {
    const bool expected = e.code() == ErrorCode::kBlowupDetected || e.code() == ErrorCode::kTrackLost;
    if (rethrow || !expected) throw;
    res.stop_reason = e.what();
  }
  res.final_state = {t, RealField(cfg.grid)};
  impl.store(res.final_state.u);
  return res;
}

}  // namespace gbo
