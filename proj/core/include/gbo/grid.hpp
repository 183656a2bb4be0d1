// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gbo {

/// Uniform periodic grid on [-half_length, half_length).
///
/// Sample j sits at y_j = -half_length + j * spacing. Fourier index j maps to
/// the signed wavenumber k = j (j < n/2) or k = j - n (j >= n/2), with
/// xi_k = pi * k / half_length. Index n/2 is the Nyquist mode (k = -n/2).
class Grid1D {
 public:
  Grid1D(std::size_t n_points, double half_length);

  std::size_t n_points() const noexcept { return n_; }
  double half_length() const noexcept { return half_length_; }
  double length() const noexcept { return 2.0 * half_length_; }
  double spacing() const noexcept { return spacing_; }

  double point(std::size_t j) const noexcept {
    return -half_length_ + static_cast<double>(j) * spacing_;
  }
  std::vector<double> points() const;

  /// Signed integer wavenumber for FFT-ordered index j.
  long signed_mode(std::size_t j) const noexcept {
    return j < n_ / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n_);
  }
  double wavenumber(std::size_t j) const noexcept {
    return fundamental() * static_cast<double>(signed_mode(j));
  }
  /// xi_1 = pi / half_length.
  double fundamental() const noexcept;
  std::size_t nyquist_index() const noexcept { return n_ / 2; }
  /// |xi| of the Nyquist mode, the largest resolved wavenumber magnitude.
  double max_wavenumber() const noexcept;

  /// Index of the sample at -y_j (the periodic reflection).
  std::size_t reflect_index(std::size_t j) const noexcept { return (n_ - j) % n_; }

  bool operator==(const Grid1D& other) const = default;

 private:
  std::size_t n_;
  double half_length_;
  double spacing_;
};

/// Real samples of a function on a Grid1D. Always finite.
class RealField {
 public:
  explicit RealField(const Grid1D& grid);
  RealField(const Grid1D& grid, std::vector<double> samples);

  static RealField from_function(const Grid1D& grid, const std::function<double(double)>& f);

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return samples_.size(); }

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<double> samples() noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }

  double operator[](std::size_t j) const noexcept { return samples_[j]; }
  double& operator[](std::size_t j) noexcept { return samples_[j]; }

  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  /// f(-y), using the periodic reflection of the sample index.
  RealField reflected() const;

  RealField& operator+=(const RealField& other);
  RealField& operator-=(const RealField& other);
  RealField& operator*=(double s) noexcept;
  RealField& axpy(double a, const RealField& x);

 private:
  Grid1D grid_;
  std::vector<double> samples_;
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double s, RealField a);
RealField operator*(RealField a, double s);

/// Throws GridMismatch unless both fields live on the same grid.
void require_same_grid(const RealField& a, const RealField& b);

}  // namespace gbo
