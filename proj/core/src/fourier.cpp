// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gbo/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "gbo/error.hpp"

namespace gbo {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kSymmetryTolerance = 1e-12;

// Applies a half-spectrum multiplier given as a function of the half index
// k in [0, n/2] and its non-negative wavenumber. The Nyquist entry is the
// caller's responsibility (it must be real for a real result).
template <typename Fn>
RealField apply_half(const RealField& f, Fn&& multiplier) {
  const Grid1D& g = f.grid();
  const RealFft& fft = RealFft::for_size(g.n_points());
  std::vector<Complex> spec(fft.half_size());
  fft.r2c(f.samples(), spec);
  const double inv_n = 1.0 / static_cast<double>(g.n_points());
  const double xi1 = g.fundamental();
  for (std::size_t k = 0; k < spec.size(); ++k) {
    spec[k] *= multiplier(k, xi1 * static_cast<double>(k)) * inv_n;
  }
  RealField out(g);
  fft.c2r(spec, out.samples());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// RealFft

const RealFft& RealFft::for_size(std::size_t n) {
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::unique_ptr<RealFft>(new RealFft(n))).first;
  }
  return *it->second;
}

RealFft::RealFft(std::size_t n) : n_(n) {
  std::lock_guard lock(planner_mutex());
  std::vector<double> real(n);
  std::vector<Complex> spec(n / 2 + 1);
  const int size = static_cast<int>(n);
  // FFTW_ESTIMATE keeps the algorithm choice (and so the rounding) identical
  // from run to run.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_ = fftw_plan_dft_r2c_1d(size, real.data(), reinterpret_cast<fftw_complex*>(spec.data()), flags);
  backward_ = fftw_plan_dft_c2r_1d(size, reinterpret_cast<fftw_complex*>(spec.data()), real.data(),
                                   flags | FFTW_DESTROY_INPUT);
  require(forward_ != nullptr && backward_ != nullptr, ErrorCode::kInvalidArgument,
          "FFTW could not create a plan");
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void RealFft::r2c(std::span<const double> in, std::span<Complex> out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::c2r(std::span<const Complex> in, std::span<double> out, std::span<Complex> scratch) const {
  std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(half_size()), scratch.begin());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_), reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
}

void RealFft::c2r(std::span<const Complex> in, std::span<double> out) const {
  std::vector<Complex> scratch(half_size());
  c2r(in, out, scratch);
}

// ---------------------------------------------------------------------------
// SpectralField

SpectralField::SpectralField(const Grid1D& grid, std::vector<Complex> coefficients)
    : grid_(grid), coeffs_(std::move(coefficients)) {
  require(coeffs_.size() == grid_.n_points(), ErrorCode::kInvalidArgument,
          "spectral field size does not match grid");
}

Complex SpectralField::at_mode(long k) const {
  const long n = static_cast<long>(grid_.n_points());
  require(k >= -n / 2 && k < n / 2, ErrorCode::kOutOfRange, "mode index out of range");
  return coeffs_[static_cast<std::size_t>(k >= 0 ? k : k + n)];
}

double SpectralField::hermitian_defect() const {
  const std::size_t n = coeffs_.size();
  double defect = std::abs(coeffs_[0].imag());
  for (std::size_t j = 1; j < n / 2; ++j) {
    defect = std::max(defect, std::abs(coeffs_[j] - std::conj(coeffs_[n - j])));
  }
  return defect;
}

double SpectralField::parseval_sum() const {
  double s = 0.0;
  for (const Complex& c : coeffs_) s += std::norm(c);
  return s;
}

SpectralField forward_transform(const RealField& f) {
  const Grid1D& g = f.grid();
  const std::size_t n = g.n_points();
  const RealFft& fft = RealFft::for_size(n);
  std::vector<Complex> half(fft.half_size());
  fft.r2c(f.samples(), half);
  const double scale = std::sqrt(g.spacing() / static_cast<double>(n));
  std::vector<Complex> full(n);
  for (std::size_t k = 0; k <= n / 2; ++k) full[k] = half[k] * scale;
  for (std::size_t k = n / 2 + 1; k < n; ++k) full[k] = std::conj(full[n - k]);
  return SpectralField(g, std::move(full));
}

RealField inverse_transform(const SpectralField& s) {
  const Grid1D& g = s.grid();
  const std::size_t n = g.n_points();
  auto c = s.coefficients();
  double scale_ref = 0.0;
  for (const Complex& v : c) scale_ref = std::max(scale_ref, std::abs(v));
  const double tol = kSymmetryTolerance * std::max(1.0, scale_ref);
  require(s.hermitian_defect() <= tol && std::abs(c[n / 2].imag()) <= tol, ErrorCode::kNonRealOutput,
          "coefficients are not Hermitian symmetric");
  const RealFft& fft = RealFft::for_size(n);
  const double scale = 1.0 / (static_cast<double>(n) * std::sqrt(g.spacing() / static_cast<double>(n)));
  std::vector<Complex> half(fft.half_size());
  half[0] = Complex(c[0].real(), 0.0) * scale;
  for (std::size_t k = 1; k < n / 2; ++k) half[k] = 0.5 * (c[k] + std::conj(c[n - k])) * scale;
  half[n / 2] = Complex(c[n / 2].real(), 0.0) * scale;
  RealField out(g);
  fft.c2r(half, out.samples());
  return out;
}

// ---------------------------------------------------------------------------
// Multipliers

RealField apply_multiplier(const RealField& f, const Symbol& m) {
  const Grid1D& g = f.grid();
  const std::size_t n = g.n_points();
  const double xi1 = g.fundamental();
  std::vector<Complex> values(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double xi = xi1 * static_cast<double>(k);
    const Complex plus = m(xi);
    if (k == 0) {
      require(std::abs(plus.imag()) <= kSymmetryTolerance * std::max(1.0, std::abs(plus)),
              ErrorCode::kNonRealOutput, "multiplier is not real at xi = 0");
      values[k] = plus.real();
    } else if (k == n / 2) {
      values[k] = m(-xi).real();
    } else {
      const Complex minus = m(-xi);
      require(std::abs(minus - std::conj(plus)) <= kSymmetryTolerance * std::max(1.0, std::abs(plus)),
              ErrorCode::kNonRealOutput, "multiplier violates m(-xi) = conj(m(xi))");
      values[k] = plus;
    }
  }
  return apply_half(f, [&](std::size_t k, double) { return values[k]; });
}

RealField frac_dispersion(const RealField& f) {
  return apply_half(f, [](std::size_t, double xi) { return Complex(xi, 0.0); });
}

RealField hilbert_transform(const RealField& f) {
  const std::size_t nyq = f.grid().nyquist_index();
  return apply_half(f, [nyq](std::size_t k, double) {
    return (k == 0 || k == nyq) ? Complex(0.0, 0.0) : Complex(0.0, -1.0);
  });
}

RealField derivative(const RealField& f) {
  const std::size_t nyq = f.grid().nyquist_index();
  return apply_half(f, [nyq](std::size_t k, double xi) {
    return k == nyq ? Complex(0.0, 0.0) : Complex(0.0, xi);
  });
}

RealField resolvent(const RealField& f, double shift) {
  require(shift > 0.0, ErrorCode::kInvalidArgument, "resolvent shift must be positive");
  return apply_half(f, [shift](std::size_t, double xi) { return Complex(1.0 / (shift + xi), 0.0); });
}

RealField spectral_shift(const RealField& f, double s) {
  if (s == 0.0) return f;
  const std::size_t nyq = f.grid().nyquist_index();
  return apply_half(f, [nyq, s](std::size_t k, double xi) {
    // The Nyquist mode is a real cosine; shifting it keeps only its real part.
    return k == nyq ? Complex(std::cos(xi * s), 0.0) : std::polar(1.0, -xi * s);
  });
}

// ---------------------------------------------------------------------------
// Quadratures and norms

double inner_product(const RealField& f, const RealField& g) {
  require_same_grid(f, g);
  double s = 0.0;
  auto a = f.samples();
  auto b = g.samples();
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s * f.grid().spacing();
}

double l2_norm(const RealField& f) { return std::sqrt(inner_product(f, f)); }

double integral(const RealField& f) {
  double s = 0.0;
  for (double v : f.samples()) s += v;
  return s * f.grid().spacing();
}

namespace {

double weighted_spectral_sum(const RealField& f, double constant_weight) {
  const Grid1D& g = f.grid();
  const std::size_t n = g.n_points();
  const RealFft& fft = RealFft::for_size(n);
  std::vector<Complex> half(fft.half_size());
  fft.r2c(f.samples(), half);
  const double xi1 = g.fundamental();
  double s = 0.0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double w = constant_weight + xi1 * static_cast<double>(k);
    const double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    s += mult * w * std::norm(half[k]);
  }
  return s * g.spacing() / static_cast<double>(n);
}

}  // namespace

double sobolev_half_norm(const RealField& f) { return std::sqrt(weighted_spectral_sum(f, 1.0)); }

double dispersion_energy(const RealField& f) { return weighted_spectral_sum(f, 0.0); }

// ---------------------------------------------------------------------------
// Interpolation

std::vector<double> trig_interpolate(const RealField& f, std::span<const double> points) {
  const Grid1D& g = f.grid();
  const std::size_t n = g.n_points();
  const RealFft& fft = RealFft::for_size(n);
  std::vector<Complex> half(fft.half_size());
  fft.r2c(f.samples(), half);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double xi1 = g.fundamental();
  const double y0 = g.point(0);
  std::vector<double> out(points.size());
  constexpr std::size_t kResync = 64;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double t = points[i] - y0;
    const Complex step = std::polar(1.0, xi1 * t);
    Complex phase(1.0, 0.0);
    double acc = half[0].real();
    for (std::size_t k = 1; k < n / 2; ++k) {
      if (k % kResync == 0) {
        phase = std::polar(1.0, xi1 * static_cast<double>(k) * t);
      } else {
        phase *= step;
      }
      acc += 2.0 * (half[k].real() * phase.real() - half[k].imag() * phase.imag());
    }
    acc += half[n / 2].real() * std::cos(xi1 * static_cast<double>(n / 2) * t);
    out[i] = acc * inv_n;
  }
  return out;
}

namespace {

// Complex FFT plans for the chirp transform, cached per size.
struct ComplexPlans {
  fftw_plan forward;
  fftw_plan backward;
};

const ComplexPlans& complex_plans(std::size_t m) {
  static std::mutex cache_mutex;
  static std::map<std::size_t, ComplexPlans> cache;
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(m);
  if (it == cache.end()) {
    std::lock_guard plan_lock(planner_mutex());
    std::vector<Complex> a(m), b(m);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const int size = static_cast<int>(m);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    ComplexPlans plans{fftw_plan_dft_1d(size, pa, pb, FFTW_FORWARD, flags),
                       fftw_plan_dft_1d(size, pa, pb, FFTW_BACKWARD, flags)};
    require(plans.forward != nullptr && plans.backward != nullptr, ErrorCode::kInvalidArgument,
            "FFTW could not create a plan");
    it = cache.emplace(m, plans).first;
  }
  return it->second;
}

}  // namespace

std::vector<double> trig_interpolate_uniform(const RealField& f, double x0, double dx, std::size_t count) {
  const Grid1D& g = f.grid();
  const std::size_t n = g.n_points();
  const std::size_t top = n / 2;
  if (count == 0) return {};
  const RealFft& fft = RealFft::for_size(n);
  std::vector<Complex> half(fft.half_size());
  fft.r2c(f.samples(), half);

  // P(x0 + j dx) = (2/n) Re sum_k b_k exp(i w k j), with w = xi1 dx and the
  // start phase folded into b_k. Bluestein: kj = (k^2 + j^2 - (j-k)^2) / 2.
  const double xi1 = g.fundamental();
  const double t0 = x0 - g.point(0);
  const double w = xi1 * dx;
  std::size_t m = 1;
  while (m < top + count) m <<= 1;
  std::vector<Complex> a(m, Complex(0.0)), b(m, Complex(0.0)), fa(m), fb(m);
  auto chirp = [w](double k) { return std::polar(1.0, 0.5 * w * k * k); };
  for (std::size_t k = 0; k <= top; ++k) {
    const double weight = (k == 0 || k == top) ? 0.5 : 1.0;
    const double kk = static_cast<double>(k);
    a[k] = weight * half[k] * std::polar(1.0, xi1 * kk * t0) * chirp(kk);
  }
  for (std::size_t j = 0; j < count; ++j) b[j] = std::conj(chirp(static_cast<double>(j)));
  for (std::size_t k = 1; k <= top; ++k) b[m - k] = std::conj(chirp(static_cast<double>(k)));

  const ComplexPlans& plans = complex_plans(m);
  fftw_execute_dft(plans.forward, reinterpret_cast<fftw_complex*>(a.data()), reinterpret_cast<fftw_complex*>(fa.data()));
  fftw_execute_dft(plans.forward, reinterpret_cast<fftw_complex*>(b.data()), reinterpret_cast<fftw_complex*>(fb.data()));
  for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
  fftw_execute_dft(plans.backward, reinterpret_cast<fftw_complex*>(fa.data()), reinterpret_cast<fftw_complex*>(a.data()));

  std::vector<double> out(count);
  const double scale = 2.0 / (static_cast<double>(n) * static_cast<double>(m));
  for (std::size_t j = 0; j < count; ++j) {
    out[j] = scale * (chirp(static_cast<double>(j)) * a[j]).real();
  }
  return out;
}

RealField spectral_resample(const RealField& f, const Grid1D& target) {
  const Grid1D& g = f.grid();
  require(std::abs(g.half_length() - target.half_length()) <= 1e-12 * g.half_length(),
          ErrorCode::kGridMismatch, "spectral resampling needs equal half_length");
  const std::size_t n_src = g.n_points();
  const std::size_t n_dst = target.n_points();
  const RealFft& src_fft = RealFft::for_size(n_src);
  const RealFft& dst_fft = RealFft::for_size(n_dst);
  std::vector<Complex> src(src_fft.half_size());
  src_fft.r2c(f.samples(), src);
  std::vector<Complex> dst(dst_fft.half_size(), Complex(0.0, 0.0));
  const std::size_t common = std::min(n_src, n_dst) / 2;
  for (std::size_t k = 0; k < common; ++k) dst[k] = src[k];
  // The shared top mode: a source Nyquist cosine splits evenly when padding;
  // when truncating, the target Nyquist takes the real cosine part twice over.
  if (n_dst > n_src) {
    dst[common] = 0.5 * src[common];
  } else if (n_dst < n_src) {
    dst[common] = Complex(2.0 * src[common].real(), 0.0);
  } else {
    dst[common] = src[common];
  }
  const double scale = 1.0 / static_cast<double>(n_src);
  for (auto& c : dst) c *= scale;
  RealField out(target);
  dst_fft.c2r(dst, out.samples());
  return out;
}

}  // namespace gbo
