// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gbo/grid.hpp"

namespace gbo {

using Complex = std::complex<double>;

/// Thin RAII wrapper over a pair of FFTW real-to-complex / complex-to-real
/// plans of one size. Plans are created once per size and shared; executing
/// them on caller-owned buffers is thread safe. Both directions are
/// unnormalized (c2r(r2c(f)) == n * f).
class RealFft {
 public:
  static const RealFft& for_size(std::size_t n);

  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t half_size() const noexcept { return n_ / 2 + 1; }

  void r2c(std::span<const double> in, std::span<Complex> out) const;
  /// `scratch` must hold half_size() values; the input is left untouched.
  void c2r(std::span<const Complex> in, std::span<double> out, std::span<Complex> scratch) const;
  void c2r(std::span<const Complex> in, std::span<double> out) const;

 private:
  explicit RealFft(std::size_t n);

  std::size_t n_;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

/// Full (two-sided) Fourier coefficients of a real field, FFT ordered.
///
/// Normalized so that sum |c_k|^2 equals the spacing-weighted sum of squared
/// samples (discrete Parseval).
class SpectralField {
 public:
  SpectralField(const Grid1D& grid, std::vector<Complex> coefficients);

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }
  std::span<Complex> coefficients() noexcept { return coeffs_; }

  /// Coefficient of signed mode k in [-n/2, n/2).
  Complex at_mode(long k) const;

  /// Largest |c(xi) - conj(c(-xi))| over the non-Nyquist pairs.
  double hermitian_defect() const;
  double parseval_sum() const;

 private:
  Grid1D grid_;
  std::vector<Complex> coeffs_;
};

SpectralField forward_transform(const RealField& f);
/// Throws NonRealOutput if the coefficients are not Hermitian to 1e-12.
RealField inverse_transform(const SpectralField& s);

/// Fourier symbol xi -> m(xi).
using Symbol = std::function<Complex(double)>;

/// Applies the multiplier m. Requires m(-xi) == conj(m(xi)) (NonRealOutput
/// otherwise). The Nyquist mode uses Re m(xi_N).
RealField apply_multiplier(const RealField& f, const Symbol& m);

/// |D|: symbol |xi|.
RealField frac_dispersion(const RealField& f);
/// Hilbert transform, symbol -i sgn(xi); constants map to zero.
RealField hilbert_transform(const RealField& f);
/// d/dy, symbol i xi with the Nyquist mode removed.
RealField derivative(const RealField& f);
/// (shift + |D|)^{-1}; shift must be positive.
RealField resolvent(const RealField& f, double shift);
/// f(y - s) for any real s, exact for the trigonometric interpolant.
RealField spectral_shift(const RealField& f, double s);

/// Spacing-weighted dot product approximating the L2 pairing.
double inner_product(const RealField& f, const RealField& g);
double l2_norm(const RealField& f);
/// Spacing-weighted sum of samples.
double integral(const RealField& f);
/// sqrt(sum (1 + |xi|) |c_k|^2).
double sobolev_half_norm(const RealField& f);
/// (f, |D| f) computed from the coefficients.
double dispersion_energy(const RealField& f);

/// Evaluates the trigonometric interpolant of f at arbitrary points
/// (periodic in the domain length).
std::vector<double> trig_interpolate(const RealField& f, std::span<const double> points);

/// Resamples onto another grid with the same half_length by truncating or
/// zero-padding the spectrum.
/// Trigonometric interpolant at x0 + j dx, j < count, by a chirp transform.
std::vector<double> trig_interpolate_uniform(const RealField& f, double x0, double dx, std::size_t count);

RealField spectral_resample(const RealField& f, const Grid1D& target);

}  // namespace gbo
