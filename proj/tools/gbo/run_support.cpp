// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_support.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gbo/error.hpp"
#include "gbo/field_io.hpp"

namespace gbo::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(const std::string& msg) { throw UsageError(msg); }

const std::string& lookup(const Params& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) bad("missing parameter '" + key + "'");
  return it->second;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  return hex64(h);
}

std::string params_digest(const Params& params) {
  std::string dump;
  for (const auto& [k, v] : params) dump += k + "=" + v + "\n";
  return hex64(fnv1a(dump));
}

Params parse_key_values(const std::string& text) {
  Params out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) bad("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) bad("line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second) bad("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
  }
  return out;
}

Params read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

double to_real(const Params& p, const std::string& key) {
  const std::string& s = lookup(p, key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad("'" + key + "' is not a number: " + s);
  return v;
}

long to_integer(const Params& p, const std::string& key) {
  const std::string& s = lookup(p, key);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad("'" + key + "' is not an integer: " + s);
  return v;
}

bool to_bool(const Params& p, const std::string& key) {
  const std::string& s = lookup(p, key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad("'" + key + "' is not a boolean: " + s);
}

SimConfig sim_config_from(const Params& config) {
  static const std::vector<std::string> known{
      "n_points", "half_length", "p", "frame", "dt", "t0", "t_end", "dealias", "snapshot_stride",
      "keep_snapshots", "nonlinear", "phase_budget", "blowup_factor", "resolution_tol", "stop_on_track_loss"};
  for (const auto& [k, v] : config) {
    if (std::find(known.begin(), known.end(), k) == known.end()) bad("unknown config key '" + k + "'");
  }
  const long n = to_integer(config, "n_points");
  if (n < 16) bad("n_points must be at least 16");
  SimConfig cfg;
  cfg.grid = Grid1D(static_cast<std::size_t>(n), to_real(config, "half_length"));
  const auto opt = [&](const char* key, auto setter) {
    if (config.count(key)) setter(key);
  };
  opt("p", [&](const char* k) { cfg.p = to_real(config, k); });
  opt("frame", [&](const char* k) {
    const std::string& f = config.at(k);
    if (f == "lab") cfg.frame = Frame::kLab;
    else if (f == "comoving") cfg.frame = Frame::kComoving;
    else bad("frame must be lab or comoving");
  });
  opt("dt", [&](const char* k) { cfg.dt = to_real(config, k); });
  opt("t0", [&](const char* k) { cfg.t0 = to_real(config, k); });
  opt("t_end", [&](const char* k) { cfg.t_end = to_real(config, k); });
  opt("dealias", [&](const char* k) { cfg.dealias = to_bool(config, k); });
  opt("snapshot_stride", [&](const char* k) { cfg.snapshot_stride = static_cast<int>(to_integer(config, k)); });
  opt("keep_snapshots", [&](const char* k) { cfg.keep_snapshots = to_bool(config, k); });
  opt("nonlinear", [&](const char* k) { cfg.nonlinear = to_bool(config, k); });
  opt("phase_budget", [&](const char* k) { cfg.phase_budget = to_real(config, k); });
  opt("blowup_factor", [&](const char* k) { cfg.blowup_factor = to_real(config, k); });
  opt("resolution_tol", [&](const char* k) { cfg.resolution_tol = to_real(config, k); });
  opt("stop_on_track_loss", [&](const char* k) { cfg.stop_on_track_loss = to_bool(config, k); });
  return cfg;
}

Params sim_config_params(const SimConfig& cfg) {
  const auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {{"n_points", std::to_string(cfg.grid.n_points())},
          {"half_length", format_double(cfg.grid.half_length())},
          {"p", format_double(cfg.p)},
          {"frame", cfg.frame == Frame::kLab ? "lab" : "comoving"},
          {"dt", format_double(resolved_dt(cfg))},
          {"t0", format_double(cfg.t0)},
          {"t_end", format_double(cfg.t_end)},
          {"dealias", b(cfg.dealias)},
          {"snapshot_stride", std::to_string(cfg.snapshot_stride)},
          {"keep_snapshots", b(cfg.keep_snapshots)},
          {"nonlinear", b(cfg.nonlinear)},
          {"phase_budget", format_double(cfg.phase_budget)},
          {"blowup_factor", format_double(cfg.blowup_factor)},
          {"resolution_tol", format_double(cfg.resolution_tol)},
          {"stop_on_track_loss", b(cfg.stop_on_track_loss)}};
}

std::filesystem::path output_root() {
  const char* env = std::getenv("GBO_OUT_DIR");
  return (env != nullptr && *env != '\0') ? std::filesystem::path(env) : std::filesystem::path(".");
}

std::filesystem::path resolve_output(const std::string& out) { return output_root() / out; }

std::pair<std::string, std::vector<std::string>> parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) bad("sweep must look like key=start:step:stop");
  const std::string key = spec.substr(0, eq);
  std::vector<double> parts;
  std::istringstream in(spec.substr(eq + 1));
  std::string tok;
  while (std::getline(in, tok, ':')) {
    Params one{{"v", tok}};
    parts.push_back(to_real(one, "v"));
  }
  if (parts.size() != 3) bad("sweep must look like key=start:step:stop");
  const double a = parts[0], h = parts[1], b = parts[2];
  if (!(h > 0.0) || b < a) bad("sweep needs a positive step and stop >= start");
  std::vector<std::string> values;
  const auto count = static_cast<long>(std::floor((b - a) / h + 1e-9));
  if (count > 10000) bad("sweep has too many points");
  for (long k = 0; k <= count; ++k) {
    std::ostringstream os;
    os << std::setprecision(15) << a + static_cast<double>(k) * h;
    values.push_back(os.str());
  }
  return {key, values};
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir_.string() + ": " + ec.message());
}

void OutputSet::add(const std::string& name) { files_.push_back(name); }

void OutputSet::write_text(const std::string& name, const std::string& text) {
  std::ofstream out(path(name), std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path(name).string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path(name).string());
  add(name);
}

void OutputSet::write_json(const std::string& name, const Json& j) { write_text(name, j.dump(2) + "\n"); }

Json OutputSet::listing() const {
  Json list = Json::array();
  for (const std::string& f : files_) list.push_back({{"path", f}, {"checksum", file_checksum(path(f))}});
  return list;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_manifest(OutputSet& out, const Manifest& m) {
  Json j;
  j["command"] = m.command;
  j["config_digest"] = params_digest(m.parameters);
  j["parameters"] = m.parameters;
  j["artifact_version"] = GBO_VERSION_STRING;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["workers"] = m.workers;
  j["results"] = m.results;
  j["outputs"] = out.listing();
  // Written last and not listed: it cannot contain its own checksum.
  std::ofstream f(out.path("manifest.json"), std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write manifest in " + out.dir().string());
  f << j.dump(2) << "\n";
}

}  // namespace gbo::cli
