// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gbo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gbo/error.hpp"

namespace gbo {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid1D::Grid1D(std::size_t n_points, double half_length)
    : n_(n_points), half_length_(half_length), spacing_(2.0 * half_length / static_cast<double>(n_points)) {
  require(is_power_of_two(n_points) && n_points >= 16, ErrorCode::kInvalidArgument,
          "grid size must be a power of two >= 16, got " + std::to_string(n_points));
  require(std::isfinite(half_length) && half_length > 0.0, ErrorCode::kInvalidArgument,
          "grid half_length must be positive");
}

std::vector<double> Grid1D::points() const {
  std::vector<double> y(n_);
  for (std::size_t j = 0; j < n_; ++j) y[j] = point(j);
  return y;
}

double Grid1D::fundamental() const noexcept { return std::numbers::pi / half_length_; }

double Grid1D::max_wavenumber() const noexcept {
  return fundamental() * static_cast<double>(n_ / 2);
}

RealField::RealField(const Grid1D& grid) : grid_(grid), samples_(grid.n_points(), 0.0) {}

RealField::RealField(const Grid1D& grid, std::vector<double> samples)
    : grid_(grid), samples_(std::move(samples)) {
  require(samples_.size() == grid_.n_points(), ErrorCode::kInvalidArgument,
          "field has " + std::to_string(samples_.size()) + " samples, grid expects " +
              std::to_string(grid_.n_points()));
  require(all_finite(), ErrorCode::kInvalidArgument, "field samples must be finite");
}

RealField RealField::from_function(const Grid1D& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.n_points());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.point(j));
  return RealField(grid, std::move(v));
}

double RealField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

bool RealField::all_finite() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); });
}

RealField RealField::reflected() const {
  RealField out(grid_);
  for (std::size_t j = 0; j < samples_.size(); ++j) out.samples_[j] = samples_[grid_.reflect_index(j)];
  return out;
}

RealField& RealField::operator+=(const RealField& other) {
  require_same_grid(*this, other);
  for (std::size_t j = 0; j < samples_.size(); ++j) samples_[j] += other.samples_[j];
  return *this;
}

RealField& RealField::operator-=(const RealField& other) {
  require_same_grid(*this, other);
  for (std::size_t j = 0; j < samples_.size(); ++j) samples_[j] -= other.samples_[j];
  return *this;
}

RealField& RealField::operator*=(double s) noexcept {
  for (double& v : samples_) v *= s;
  return *this;
}

RealField& RealField::axpy(double a, const RealField& x) {
  require_same_grid(*this, x);
  for (std::size_t j = 0; j < samples_.size(); ++j) samples_[j] += a * x.samples_[j];
  return *this;
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double s, RealField a) { return a *= s; }
RealField operator*(RealField a, double s) { return a *= s; }

void require_same_grid(const RealField& a, const RealField& b) {
  require(a.grid() == b.grid(), ErrorCode::kGridMismatch, "fields live on different grids");
}

}  // namespace gbo
