// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gbo/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "gbo/error.hpp"

namespace gbo {

static_assert(std::endian::native == std::endian::little, "binary field format assumes little endian");

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_field_csv(std::ostream& out, const RealField& f) {
  out << "n_points,half_length\n"
      << f.grid().n_points() << ',' << format_double(f.grid().half_length()) << "\nvalue\n";
  for (double v : f.samples()) out << format_double(v) << '\n';
}

RealField read_field_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == "n_points,half_length", ErrorCode::kIo,
          "field CSV: missing header");
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kIo, "field CSV: missing grid line");
  std::size_t n = 0;
  double half_length = 0.0;
  {
    std::istringstream ss(line);
    char comma = 0;
    require(static_cast<bool>(ss >> n >> comma >> half_length) && comma == ',', ErrorCode::kIo,
            "field CSV: malformed grid line");
  }
  require(static_cast<bool>(std::getline(in, line)) && line == "value", ErrorCode::kIo,
          "field CSV: missing value header");
  std::vector<double> samples;
  samples.reserve(n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    samples.push_back(std::stod(line));
  }
  require(samples.size() == n, ErrorCode::kIo, "field CSV: sample count does not match header");
  return RealField(Grid1D(n, half_length), std::move(samples));
}

void write_field_binary(std::ostream& out, const RealField& f) {
  const std::uint64_t n = f.grid().n_points();
  const double half_length = f.grid().half_length();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&half_length), sizeof(half_length));
  out.write(reinterpret_cast<const char*>(f.samples().data()),
            static_cast<std::streamsize>(n * sizeof(double)));
}

RealField read_field_binary(std::istream& in) {
  std::uint64_t n = 0;
  double half_length = 0.0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&half_length), sizeof(half_length));
  require(static_cast<bool>(in), ErrorCode::kIo, "binary field: truncated header");
  std::vector<double> samples(n);
  in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(n * sizeof(double)));
  require(static_cast<bool>(in), ErrorCode::kIo, "binary field: truncated samples");
  return RealField(Grid1D(n, half_length), std::move(samples));
}

void save_field(const std::filesystem::path& path, const RealField& f) {
  const bool binary = path.extension() == ".bin";
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open " + path.string());
  if (binary) {
    write_field_binary(out, f);
  } else {
    write_field_csv(out, f);
  }
}

RealField load_field(const std::filesystem::path& path) {
  const bool binary = path.extension() == ".bin";
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path.string());
  return binary ? read_field_binary(in) : read_field_csv(in);
}

void write_profile_csv(const std::filesystem::path& path, const RealField& f, const std::string& label) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open " + path.string());
  out << "y," << label << '\n';
  for (std::size_t j = 0; j < f.size(); ++j) {
    out << format_double(f.grid().point(j)) << ',' << format_double(f[j]) << '\n';
  }
}

}  // namespace gbo
