// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gbo/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "gbo/error.hpp"
#include "gbo/fourier.hpp"

namespace gbo {

namespace {

double signed_power(double u, double p) { return std::pow(std::abs(u), p - 1.0) * u; }

// Sum over k of (y + kT)^-2 and (y + kT)^-4 minus the k = 0 term, T = period.
// Series near y = 0 avoid the cancellation between csc^2 and 1/y^2.
double image_sum2(double y, double period) {
  const double w = std::numbers::pi / period;
  const double z = w * y;
  if (std::abs(z) < 0.1) {
    const double z2 = z * z;
    return w * w * (1.0 / 3.0 + z2 / 15.0 + 2.0 * z2 * z2 / 189.0 + z2 * z2 * z2 / 675.0);
  }
  const double s = std::sin(z);
  return w * w / (s * s) - 1.0 / (y * y);
}

double image_sum4(double y, double period) {
  const double w = std::numbers::pi / period;
  const double z = w * y;
  const double w4 = w * w * w * w;
  if (std::abs(z) < 0.1) {
    const double z2 = z * z;
    return w4 * (1.0 / 45.0 + 2.0 * z2 / 189.0 + z2 * z2 / 315.0);
  }
  const double c2 = 1.0 / (std::sin(z) * std::sin(z));
  const double y2 = y * y;
  return w4 * (c2 * c2 - 2.0 / 3.0 * c2) - 1.0 / (y2 * y2);
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

// (Q, (1 + |D|) Q) from the half spectrum.
double resolvent_form(std::span<const Complex> half, const Grid1D& g) {
  const std::size_t n = g.n_points();
  const double xi1 = g.fundamental();
  double s = 0.0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    s += mult * (1.0 + xi1 * static_cast<double>(k)) * std::norm(half[k]);
  }
  return s * g.spacing() / static_cast<double>(n);
}

}  // namespace

RealField power_nonlinearity(const RealField& u, double p) {
  RealField out(u.grid());
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = signed_power(u[j], p);
  return out;
}

RealField ground_state_residual(const RealField& q, double p) {
  RealField r = power_nonlinearity(q, p);
  r -= q;
  r -= frac_dispersion(q);
  return r;
}

GroundState petviashvili_solve(double p, const Grid1D& grid, const GroundStateOptions& options) {
  require(std::isfinite(p) && p > 1.0, ErrorCode::kBadExponent, "ground state needs p > 1");
  const std::size_t n = grid.n_points();
  const RealFft& fft = RealFft::for_size(n);
  const double gamma = p / (p - 1.0);
  const double xi1 = grid.fundamental();
  const double inv_n = 1.0 / static_cast<double>(n);

  RealField q = RealField::from_function(grid, [](double y) { return 2.0 / (1.0 + y * y); });
  std::vector<Complex> q_hat(fft.half_size());
  std::vector<Complex> n_hat(fft.half_size());
  std::vector<Complex> scratch(fft.half_size());
  RealField nonlinear(grid);

  GroundState gs;
  gs.p = p;
  double residual = 0.0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    for (std::size_t j = 0; j < n; ++j) nonlinear[j] = signed_power(q[j], p);
    fft.r2c(q.samples(), q_hat);
    fft.r2c(nonlinear.samples(), n_hat);

    const double numerator = resolvent_form(q_hat, grid);
    const double denominator = inner_product(q, nonlinear);
    require(std::isfinite(numerator) && denominator > 0.0, ErrorCode::kNoConvergence,
            "Petviashvili iteration lost positivity at iteration " + std::to_string(it));
    const double stabilizer = std::pow(numerator / denominator, gamma);

    for (std::size_t k = 0; k < n_hat.size(); ++k) {
      n_hat[k] *= stabilizer * inv_n / (1.0 + xi1 * static_cast<double>(k));
    }
    fft.c2r(n_hat, q.samples(), scratch);
    for (std::size_t j = 1; j < n / 2; ++j) {
      const double even = 0.5 * (q[j] + q[n - j]);
      q[j] = even;
      q[n - j] = even;
    }

    residual = l2_norm(ground_state_residual(q, p));
    require(std::isfinite(residual), ErrorCode::kNoConvergence, "Petviashvili iteration diverged");
    gs.residual_history.push_back(residual);
    if (residual <= options.tol) break;
  }
  if (residual > options.tol) {
    throw Error(ErrorCode::kNoConvergence,
                "Petviashvili: " + std::to_string(it) + " iterations, last residual " + std::to_string(residual));
  }

  gs.field = q;
  gs.residual = residual;
  gs.iterations = it + 1;

  const TailFit tail = fit_tail_kappa(q, default_tail_window(grid));
  require(tail.kappa0 > 0.0, ErrorCode::kNegativeKappa,
          "tail fit gave kappa0 = " + std::to_string(tail.kappa0) + "; the solve is not a ground state");
  gs.kappa0 = tail.kappa0;
  gs.kappa1 = tail.kappa1;

  // Whole-line integrals: images removed inside the box, tail expansion outside.
  const RealField line = whole_line_profile(gs);
  const double half_length = grid.half_length();
  const double k0 = gs.kappa0, k1 = gs.kappa1;
  double sum2 = 0.0, sum_p = 0.0, sum1 = 0.0;
  for (double v : line.samples()) {
    sum2 += v * v;
    sum_p += std::pow(std::abs(v), p);
    sum1 += v;
  }
  const double h = grid.spacing();
  gs.mass = h * sum2 + 2.0 * (k0 * k0 / (3.0 * std::pow(half_length, 3)) +
                              2.0 * k0 * k1 / (5.0 * std::pow(half_length, 5)));
  gs.int_Qp = h * sum_p + 2.0 * std::pow(k0, p) / ((2.0 * p - 1.0) * std::pow(half_length, 2.0 * p - 1.0));
  gs.int_Q = h * sum1 + 2.0 * (k0 / half_length + k1 / (3.0 * std::pow(half_length, 3)));
  gs.h_value = h_functional(q, p);
  gs.q_lambda_q = inner_product(q, scaling_generator(q, p));
  return gs;
}

double spectral_bandwidth(const RealField& f, double rel_tol) {
  const Grid1D& g = f.grid();
  const RealFft& fft = RealFft::for_size(g.n_points());
  std::vector<Complex> half(fft.half_size());
  fft.r2c(f.samples(), half);
  double peak = 0.0;
  for (const auto& c : half) peak = std::max(peak, std::abs(c));
  std::size_t last = 0;
  for (std::size_t k = 0; k < half.size(); ++k) {
    if (std::abs(half[k]) > rel_tol * peak) last = k;
  }
  return g.fundamental() * static_cast<double>(last);
}

RealField whole_line_profile(const GroundState& q) {
  const Grid1D& g = q.grid();
  const double period = g.length();
  RealField out = q.field;
  for (std::size_t j = 0; j < g.n_points(); ++j) {
    const double y = g.point(j);
    out[j] -= q.kappa0 * image_sum2(y, period) + q.kappa1 * image_sum4(y, period);
  }
  return out;
}

RealField rescale(const GroundState& q, double c) {
  require(std::isfinite(c) && c > 0.0, ErrorCode::kScaleOutOfRange, "rescale needs c > 0");
  const Grid1D& g = q.grid();
  if (c == 1.0) return q.field;
  const double bandwidth = spectral_bandwidth(q.field, 1e-6);
  require(c * bandwidth <= g.max_wavenumber(), ErrorCode::kScaleOutOfRange,
          "dilation by c = " + std::to_string(c) + " pushes the spectrum past the Nyquist wavenumber");

  const double half_length = g.half_length();
  const double period = g.length();
  const double amplitude = std::pow(c, 1.0 / (q.p - 1.0));
  const std::size_t n = g.n_points();
  const std::vector<double> values = trig_interpolate_uniform(q.field, c * g.point(0), c * g.spacing(), n);
  RealField out(g);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = c * g.point(j);
    if (std::abs(x) < half_length) {
      out[j] = amplitude * (values[j] - q.kappa0 * image_sum2(x, period) - q.kappa1 * image_sum4(x, period));
    } else {
      const double x2 = x * x;
      out[j] = amplitude * (q.kappa0 / x2 + q.kappa1 / (x2 * x2));
    }
  }
  return out;
}

double boundary_window(double y, double half_length) {
  const double t = (std::abs(y) - 0.8 * half_length) / (0.1 * half_length);
  return 1.0 - smooth_step(t);
}

RealField scaling_generator(const RealField& f, double p) {
  const Grid1D& g = f.grid();
  RealField out = derivative(f);
  for (std::size_t j = 0; j < g.n_points(); ++j) {
    const double y = g.point(j);
    out[j] = f[j] / (p - 1.0) + boundary_window(y, g.half_length()) * y * out[j];
  }
  return out;
}

std::pair<double, double> default_tail_window(const Grid1D& grid) {
  return {0.25 * grid.half_length(), 0.6 * grid.half_length()};
}

TailFit fit_tail_kappa(const RealField& q, std::pair<double, double> window) {
  const Grid1D& g = q.grid();
  const auto [lo, hi] = window;
  require(lo > 0.0 && hi > lo && hi < g.half_length(), ErrorCode::kWindowTooNarrow,
          "tail window must satisfy 0 < lo < hi < half_length");
  const double period = g.length();

  auto fit_side = [&](int side) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < g.n_points(); ++j) {
      const double y = side * g.point(j);
      if (y >= lo && y <= hi) idx.push_back(j);
    }
    require(idx.size() >= 8, ErrorCode::kWindowTooNarrow, "tail window holds fewer than 8 samples");
    Eigen::MatrixXd a(idx.size(), 2);
    Eigen::VectorXd b(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const double y = g.point(idx[r]);
      const double y2 = y * y;
      // Rows are scaled by y^2 so the unknowns multiply 1 and 1/y^2 at leading order.
      a(r, 0) = y2 * (1.0 / y2 + image_sum2(y, period));
      a(r, 1) = y2 * (1.0 / (y2 * y2) + image_sum4(y, period));
      b(r) = y2 * q[idx[r]];
    }
    const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
    return std::pair{coef(0), coef(1)};
  };

  TailFit fit;
  fit.window = window;
  std::tie(fit.kappa0_right, fit.kappa1_right) = fit_side(+1);
  std::tie(fit.kappa0_left, fit.kappa1_left) = fit_side(-1);
  fit.kappa0 = 0.5 * (fit.kappa0_left + fit.kappa0_right);
  fit.kappa1 = 0.5 * (fit.kappa1_left + fit.kappa1_right);
  return fit;
}

TailFit fit_tail_kappa(const GroundState& q, std::pair<double, double> window) {
  return fit_tail_kappa(q.field, window);
}

TailFit fit_tail_kappa(const GroundState& q) { return fit_tail_kappa(q.field, default_tail_window(q.grid())); }

double gn_quotient(const RealField& u, double p) {
  const double dispersion = dispersion_energy(u);
  const double mass = inner_product(u, u);
  double lp = 0.0;
  for (double v : u.samples()) lp += std::pow(std::abs(v), p + 1.0);
  lp *= u.grid().spacing();
  require(mass > 0.0 && lp > 0.0 && dispersion > 0.0, ErrorCode::kZeroField,
          "Gagliardo-Nirenberg quotient of a zero field");
  return std::pow(dispersion, 0.5 * (p - 1.0)) * mass / lp;
}

double h_functional(const RealField& u, double p) {
  double lp = 0.0;
  for (double v : u.samples()) lp += std::pow(std::abs(v), p + 1.0);
  lp *= u.grid().spacing();
  return 0.5 * inner_product(u, u) + 0.5 * inner_product(u, frac_dispersion(u)) - lp / (p + 1.0);
}

Grid1D resolved_grid(double p, std::size_t n, double rel_tol) {
  const Grid1D probe(16384, 50.0);
  const GroundState gs = petviashvili_solve(p, probe, {.tol = 1e-11, .max_iterations = 500});
  const double bandwidth = std::max(spectral_bandwidth(gs.field, rel_tol), probe.fundamental());
  const double half_length = std::numbers::pi * static_cast<double>(n) / (2.0 * bandwidth);
  return Grid1D(n, half_length);
}

}  // namespace gbo
