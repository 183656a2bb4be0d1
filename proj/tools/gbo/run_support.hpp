// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gbo/pde.hpp"

namespace gbo::cli {

using Params = std::map<std::string, std::string>;
using Json = nlohmann::ordered_json;

/// Bad flag or config value; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);
/// FNV-1a of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);
/// Digest of the canonical "key=value\n" dump of params.
std::string params_digest(const Params& params);

/// Flat "key = value" text; '#' starts a comment, blank lines are skipped.
/// Throws UsageError on a line without '=' or a repeated key.
Params read_key_values(const std::filesystem::path& path);
Params parse_key_values(const std::string& text);

double to_real(const Params& p, const std::string& key);
long to_integer(const Params& p, const std::string& key);
bool to_bool(const Params& p, const std::string& key);

/// SimConfig from config keys (n_points, half_length, p, frame, dt, t0, t_end,
/// dealias, snapshot_stride, keep_snapshots, nonlinear, phase_budget,
/// blowup_factor, resolution_tol, stop_on_track_loss). Missing keys keep
/// the SimConfig defaults except n_points and half_length, which are
/// required. Unknown keys throw UsageError.
SimConfig sim_config_from(const Params& config);
Params sim_config_params(const SimConfig& cfg);

/// Root for relative output paths: $GBO_OUT_DIR if set, else ".".
std::filesystem::path output_root();
std::filesystem::path resolve_output(const std::string& out);

/// Values of a sweep "key=start:step:stop" (inclusive, tolerant to rounding).
std::pair<std::string, std::vector<std::string>> parse_sweep(const std::string& spec);

/// Writes a file and remembers it for the manifest.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);
  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  void add(const std::string& name);  ///< file already written under dir()
  void write_text(const std::string& name, const std::string& text);
  void write_json(const std::string& name, const Json& j);
  Json listing() const;  ///< [{path, checksum}] in creation order

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

std::string utc_timestamp();

struct Manifest {
  std::string command;
  Params parameters;
  std::string started;
  std::string finished;
  int workers = 1;
  Json results = Json::object();  ///< summary values used by `report`
};

/// manifest.json with config digest, artifact version and output checksums.
void write_manifest(OutputSet& out, const Manifest& m);

}  // namespace gbo::cli
