// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "gbo/error.hpp"
#include "gbo/grid.hpp"

namespace gbo {
namespace {

TEST(Grid1D, RejectsNonPowerOfTwo) {
  EXPECT_THROW(Grid1D(100, 1.0), Error);
  EXPECT_THROW(Grid1D(8, 1.0), Error);
  EXPECT_THROW(Grid1D(64, 0.0), Error);
}

TEST(Grid1D, PointsAndModes) {
  const Grid1D g(64, 10.0);
  EXPECT_DOUBLE_EQ(g.point(0), -10.0);
  EXPECT_DOUBLE_EQ(g.point(32), 0.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 20.0 / 64.0);
  EXPECT_EQ(g.signed_mode(33), -31);
  EXPECT_DOUBLE_EQ(g.wavenumber(1), M_PI / 10.0);
  EXPECT_DOUBLE_EQ(g.max_wavenumber(), 32.0 * M_PI / 10.0);
  EXPECT_EQ(g.reflect_index(0), 0u);
  EXPECT_EQ(g.reflect_index(10), 54u);
  EXPECT_DOUBLE_EQ(g.point(g.reflect_index(10)), -g.point(10));
}

TEST(RealField, RejectsNonFinite) {
  const Grid1D g(16, 1.0);
  std::vector<double> v(16, 0.0);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(RealField(g, v), Error);
  EXPECT_THROW(RealField(g, std::vector<double>(15, 0.0)), Error);
}

TEST(RealField, ArithmeticChecksGrid) {
  const Grid1D a(16, 1.0), b(16, 2.0);
  RealField f(a), h(b);
  try {
    f += h;
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGridMismatch);
  }
}

TEST(RealField, Reflection) {
  const Grid1D g(32, 3.0);
  const RealField f = RealField::from_function(g, [](double y) { return y * y * y + y * y; });
  const RealField r = f.reflected();
  for (std::size_t j = 0; j < g.n_points(); ++j) {
    const double y = g.point(j);
    if (j == 0) continue;  // -L maps to itself on the periodic grid
    EXPECT_NEAR(r[j], -y * y * y + y * y, 1e-12);
  }
}

}  // namespace
}  // namespace gbo
