// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "gbo/grid.hpp"

namespace gbo {

/// Field CSV layout:
///
///   n_points,half_length
///   <n>,<L>
///   value
///   <sample 0>
///   ...
///
/// Values are written with 17 significant digits so a round trip is exact.
void write_field_csv(std::ostream& out, const RealField& f);
RealField read_field_csv(std::istream& in);

/// Little-endian binary layout: uint64 n_points, float64 half_length, then
/// n_points float64 samples in grid order.
void write_field_binary(std::ostream& out, const RealField& f);
RealField read_field_binary(std::istream& in);

void save_field(const std::filesystem::path& path, const RealField& f);
/// Dispatches on extension: ".bin" is binary, anything else CSV.
RealField load_field(const std::filesystem::path& path);

/// Two-column profile CSV with header "y,<label>".
void write_profile_csv(const std::filesystem::path& path, const RealField& f, const std::string& label);

/// 17 significant digits, the shortest width that round-trips every double.
std::string format_double(double v);

}  // namespace gbo
