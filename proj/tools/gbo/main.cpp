// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

// gbo: ground states, spectra, interaction constants, reduced dynamics,
// PDE runs, validation suites and cross-run reports.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gbo/constants.hpp"
#include "gbo/diagnostics.hpp"
#include "gbo/error.hpp"
#include "gbo/field_io.hpp"
#include "gbo/fourier.hpp"
#include "gbo/ground_state.hpp"
#include "gbo/linearized.hpp"
#include "gbo/pde.hpp"
#include "gbo/reduced_dynamics.hpp"
#include "gbo/validation.hpp"
#include "run_support.hpp"

namespace gbo::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

// A subcommand body: reads its parameters, writes files into `out` and
// returns the summary recorded in the manifest.
using Body = std::function<Json(const Params&, OutputSet&)>;

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Grid1D grid_from(const Params& p) {
  const long n = to_integer(p, "n_points");
  if (n < 16) throw UsageError("n_points must be at least 16");
  return Grid1D(static_cast<std::size_t>(n), to_real(p, "half_length"));
}

int soliton_count(const Params& p) {
  const long n = to_integer(p, "solitons");
  if (n < 2 || n > 12) throw UsageError("solitons must be between 2 and 12");
  return static_cast<int>(n);
}

std::string csv_row(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s + "\n";
}

// ---------------------------------------------------------------------------
// Subcommands

Json run_ground_state(const Params& prm, OutputSet& out) {
  GroundStateOptions opt;
  opt.tol = to_real(prm, "tol");
  const GroundState gs = petviashvili_solve(to_real(prm, "p"), grid_from(prm), opt);
  write_profile_csv(out.path("profile.csv"), gs.field, "Q");
  out.add("profile.csv");
  Json j;
  j["p"] = gs.p;
  j["n_points"] = gs.grid().n_points();
  j["half_length"] = gs.grid().half_length();
  j["kappa0"] = gs.kappa0;
  j["kappa1"] = gs.kappa1;
  j["int_Q"] = gs.int_Q;
  j["int_Q2"] = gs.mass;
  j["int_Qp"] = gs.int_Qp;
  j["residual"] = gs.residual;
  j["iterations"] = gs.iterations;
  out.write_json("ground_state.json", j);
  return j;
}

Json run_spectrum(const Params& prm, OutputSet& out) {
  const double p = to_real(prm, "p");
  const long n = to_integer(prm, "n_points");
  if (n < 64) throw UsageError("n_points must be at least 64");
  const LinearizedOperator op(petviashvili_solve(p, spectral_grid(p, static_cast<std::size_t>(n))));
  if (!op.dense_available()) throw UsageError("n_points too large for the dense eigen solver");
  const NegativeEigen neg = negative_eigenpair(op);
  Json j;
  j["p"] = p;
  j["n_points"] = op.grid().n_points();
  j["half_length"] = op.grid().half_length();
  j["kappa0"] = op.ground().kappa0;
  j["negative_eigenvalue"] = -neg.kappa;
  j["lowest_eigenvalues"] = neg.lowest;
  j["kernel_residual"] = l2_norm(op.apply(op.kernel_direction())) / l2_norm(op.kernel_direction());
  write_profile_csv(out.path("chi0.csv"), neg.chi0, "chi0");
  out.add("chi0.csv");
  if (p > 3.0) {
    const EdgeEigen edge = edge_eigenpairs(op);
    j["e0"] = edge.e0;
    j["pairing_defect"] = edge.pairing_defect;
    write_profile_csv(out.path("y_plus.csv"), edge.y_plus, "Y+");
    write_profile_csv(out.path("y_minus.csv"), edge.y_minus, "Y-");
    out.add("y_plus.csv");
    out.add("y_minus.csv");
  }
  out.write_json("spectrum.json", j);
  return j;
}

struct ConstantsBundle {
  GroundState gs;
  InteractionConstants c;
  AlphaSolution alpha;
};

ConstantsBundle constants_for(const Params& prm) {
  GroundState gs = petviashvili_solve(to_real(prm, "p"), grid_from(prm));
  InteractionConstants c = compute_a(gs, soliton_count(prm));
  AlphaSolution alpha = solve_alpha(c);
  return {std::move(gs), std::move(c), std::move(alpha)};
}

Json constants_json(const ConstantsBundle& b) {
  Json j;
  j["p"] = b.c.p;
  j["n_points"] = b.gs.grid().n_points();
  j["solitons"] = b.c.n;
  j["signs"] = b.c.signs;
  j["kappa0"] = b.c.kappa0;
  j["int_Qp"] = b.c.int_Qp;
  Json a = Json::array();
  for (int i = 0; i < b.c.n; ++i) {
    Json row = Json::array();
    for (int k = 0; k < b.c.n; ++k) row.push_back(b.c.a(i, k));
    a.push_back(row);
  }
  j["a"] = a;
  j["alpha"] = to_vector(b.alpha.alpha);
  j["alpha_residual"] = b.alpha.residual;
  j["M_eigenvalues"] = to_vector(b.alpha.eigenvalues);
  j["M_alpha_defect"] = b.alpha.alpha_eig_residual;
  return j;
}

Json run_constants(const Params& prm, OutputSet& out) {
  const Json j = constants_json(constants_for(prm));
  out.write_json("constants.json", j);
  return j;
}

void write_trajectory(OutputSet& out, const TrajectoryLog& log, int n) {
  std::ostringstream os;
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",x_" << i;
  for (int i = 1; i <= n; ++i) os << ",mu_" << i;
  os << "\n";
  for (std::size_t k = 0; k < log.times.size(); ++k) {
    std::vector<double> row{log.times[k]};
    const ParamState& s = log.states[k];
    for (int i = 0; i < n; ++i) row.push_back(s.x(i));
    for (int i = 0; i < n; ++i) row.push_back(s.mu(i));
    os << csv_row(row);
  }
  out.write_text("trajectory.csv", os.str());
}

Json run_ode(const Params& prm, OutputSet& out) {
  const ConstantsBundle b = constants_for(prm);
  const double t_in = to_real(prm, "t_in");
  const double t_end = to_real(prm, "t_end");
  if (!(t_end > t_in)) throw UsageError("t_end must exceed t_in");
  const ParamState seed = asymptotic_seed(b.alpha.alpha, t_in);
  const TrajectoryLog log = integrate(seed, b.c.a, t_end);
  write_trajectory(out, log, b.c.n);

  Json j = constants_json(b);
  j["t_in"] = t_in;
  j["t_end"] = t_end;
  j["accepted_steps"] = log.stats.accepted;
  j["rejected_steps"] = log.stats.rejected;
  const ParamState& last = log.states.back();
  std::vector<double> ratio;
  for (int i = 0; i < b.c.n; ++i) ratio.push_back(last.x(i) / std::sqrt(last.t));
  j["x_over_sqrt_t"] = ratio;
  j["error"] = std::abs((last.x(0) - last.x(b.c.n - 1)) / std::sqrt(last.t) /
                            (b.alpha.alpha(0) - b.alpha.alpha(b.c.n - 1)) - 1.0);
  try {
    j["exponent"] = separation_law_fit(track_from_log(log)).exponent;
  } catch (const Error& e) {
    j["exponent_error"] = e.what();
  }
  out.write_json("ode.json", j);
  return j;
}

// Initial data for `simulate`:
//   ground                      one ground state at the origin
//   file:PATH                   a saved field (binary or CSV)
//   asymptotic:N:T_IN[:a0]      N solitons on the reduced-ODE seed at T_IN
struct Initial {
  RealField u{Grid1D(16, 1.0)};
  int solitons = 1;
  std::optional<ParamState> seed;
  Eigen::MatrixXd a;
};

Initial make_initial(const std::string& spec, SimConfig& cfg) {
  std::vector<std::string> parts;
  std::istringstream in(spec);
  for (std::string tok; std::getline(in, tok, ':');) parts.push_back(tok);
  if (parts.empty()) throw UsageError("empty initial spec");
  Initial init;
  if (parts[0] == "ground" && parts.size() == 1) {
    const GroundState gs = petviashvili_solve(cfg.p, cfg.grid);
    init.u = gs.field;
    return init;
  }
  if (parts[0] == "file" && parts.size() >= 2) {
    init.u = load_field(spec.substr(5));
    if (!(init.u.grid() == cfg.grid)) throw Error(ErrorCode::kGridMismatch, "initial field grid differs from the config grid");
    return init;
  }
  if (parts[0] == "asymptotic" && (parts.size() == 3 || (parts.size() == 4 && parts[3] == "a0"))) {
    const Params sub{{"solitons", parts[1]}, {"t_in", parts[2]}};
    const int n = soliton_count(sub);
    const double t_in = to_real(sub, "t_in");
    const LinearizedOperator op(petviashvili_solve(cfg.p, cfg.grid));
    const InteractionConstants c = compute_a(op.ground(), n);
    const AlphaSolution alpha = solve_alpha(c);
    const ParamState seed = asymptotic_seed(alpha.alpha, t_in);
    const std::vector<double> x = to_vector(seed.x), mu = to_vector(seed.mu);
    if (parts.size() == 4) {
      const RealField a0 = solve_A0(op, 1);
      init.u = make_multisoliton(op.ground(), x, mu, c.signs, &a0);
    } else {
      init.u = make_multisoliton(op.ground(), x, mu, c.signs, false);
    }
    init.solitons = n;
    init.seed = seed;
    init.a = c.a;
    cfg.frame = Frame::kComoving;  // the seed positions live in y = x - t
    cfg.t0 = t_in;
    return init;
  }
  throw UsageError("initial must be ground, file:PATH or asymptotic:N:T_IN[:a0], got '" + spec + "'");
}

void write_track(OutputSet& out, const SolitonTrack& track) {
  std::ostringstream os;
  os << "t,valid";
  for (int i = 1; i <= track.solitons(); ++i) os << ",x_" << i;
  for (int i = 1; i <= track.solitons(); ++i) os << ",amp_" << i;
  os << "\n";
  for (std::size_t k = 0; k < track.times.size(); ++k) {
    os << format_double(track.times[k]) << ',' << (track.valid[k] ? 1 : 0);
    for (const auto& x : track.positions) os << ',' << format_double(x[k]);
    for (const auto& a : track.amplitudes) os << ',' << format_double(a[k]);
    os << "\n";
  }
  out.write_text("track.csv", os.str());
}

Params simulate_params(const Params& prm) {
  Params cfg = prm;
  cfg.erase("initial");
  return cfg;
}

Json run_simulate(const Params& prm, OutputSet& out) {
  SimConfig cfg = sim_config_from(simulate_params(prm));
  const Initial init = make_initial(prm.at("initial"), cfg);
  const ExperimentResult r = run_experiment(cfg, init.u, init.solitons, false);

  write_track(out, r.track);
  std::ostringstream cons;
  cons << "t,mass,energy\n";
  for (const auto& c : r.conservation) cons << csv_row({c.t, c.mass, c.energy});
  out.write_text("conservation.csv", cons.str());
  save_field(out.path("final.bin"), r.final_state.u);
  out.add("final.bin");

  Json j;
  for (const auto& [k, v] : sim_config_params(cfg)) j["config"][k] = v;
  j["p"] = cfg.p;
  j["n_points"] = cfg.grid.n_points();
  j["solitons"] = init.solitons;
  j["steps"] = r.steps;
  j["completed"] = r.completed;
  j["stop_reason"] = r.stop_reason;
  j["final_time"] = r.final_state.t;
  if (!r.conservation.empty()) {
    j["mass_drift"] = r.conservation.back().mass / r.conservation.front().mass - 1.0;
    j["energy_drift"] = r.conservation.back().energy / r.conservation.front().energy - 1.0;
  }
  if (init.solitons >= 2) {
    try {
      j["exponent"] = separation_law_fit(r.track).exponent;
    } catch (const Error& e) {
      j["exponent_error"] = e.what();
    }
  }
  if (init.seed) {
    const TrajectoryLog log = integrate(*init.seed, init.a, cfg.t_end);
    try {
      const CompareReport cmp = ode_pde_compare(r.track, log);
      std::ostringstream os;
      write_compare_csv(os, cmp);
      out.write_text("compare.csv", os.str());
      j["error"] = cmp.sup_err;
      j["rms_error"] = cmp.rms_err;
    } catch (const Error& e) {
      j["compare_error"] = e.what();
    }
  }
  out.write_json("simulate.json", j);
  return j;
}

// ---------------------------------------------------------------------------
// Runs, sweeps, manifests

Json run_once(const std::string& command, const Body& body, const Params& prm, OutputSet& out, int workers) {
  Manifest m;
  m.command = command;
  m.parameters = prm;
  m.workers = workers;
  m.started = utc_timestamp();
  m.results = body(prm, out);
  m.finished = utc_timestamp();
  write_manifest(out, m);
  return m.results;
}

int execute(const std::string& command, const Body& body, const Params& prm, const std::string& out_name,
            const std::string& sweep, int workers) {
  const auto root = resolve_output(out_name);
  if (sweep.empty()) {
    OutputSet out(root);
    run_once(command, body, prm, out, 1);
    std::cout << "wrote " << out.dir().string() << "\n";
    return kExitOk;
  }

  const auto [key, values] = parse_sweep(sweep);
  if (!prm.count(key)) throw UsageError("sweep key '" + key + "' is not a parameter of " + command);
  const int pool = std::max(1, std::min<int>(workers, static_cast<int>(values.size())));

  std::vector<std::string> failures(values.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (int w = 0; w < pool; ++w) {
    threads.emplace_back([&] {
      for (std::size_t k = next++; k < values.size(); k = next++) {
        Params run = prm;
        run[key] = values[k];
        try {
          OutputSet out(root / (key + "=" + values[k]));
          run_once(command, body, run, out, pool);
        } catch (const std::exception& e) {
          failures[k] = e.what();
        }
      }
    });
  }
  for (auto& t : threads) t.join();

  int failed = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (failures[k].empty()) continue;
    ++failed;
    std::cerr << "gbo: " << key << "=" << values[k] << ": " << failures[k] << "\n";
  }
  std::cout << "wrote " << values.size() - failed << " of " << values.size() << " runs under " << root.string() << "\n";
  return failed == 0 ? kExitOk : kExitDomain;
}

int run_validate(const std::string& suite, const std::string& out_name) {
  const auto suites = validation::suites();
  if (std::find(suites.begin(), suites.end(), suite) == suites.end()) {
    throw UsageError("unknown suite '" + suite + "'");
  }
  Manifest m;
  m.command = "validate";
  m.parameters = {{"suite", suite}};
  m.started = utc_timestamp();
  const auto results = validation::run_suite(suite);
  const Json report = validation::to_json(suite, results);
  m.finished = utc_timestamp();

  std::cout << report.dump(2) << "\n";
  OutputSet out(resolve_output(out_name));
  out.write_json("validate.json", report);
  m.results = {{"suite", suite}, {"pass", report["pass"]}};
  write_manifest(out, m);
  return report["pass"].get<bool>() ? kExitOk : kExitDomain;
}

// Cross-run table. Missing manifests are skipped with a warning.
int run_report(const std::vector<std::string>& dirs, const std::string& out_name) {
  static const std::vector<std::string> columns{"p", "n_points", "kappa0", "alpha", "exponent", "error"};
  Json report;
  report["runs"] = Json::array();
  report["warnings"] = Json::array();
  std::string version;
  std::ostringstream csv;
  csv << "run,command";
  for (const auto& c : columns) csv << ',' << c;
  csv << "\n";

  for (const std::string& dir : dirs) {
    const auto manifest = std::filesystem::path(dir) / "manifest.json";
    std::ifstream in(manifest);
    if (!in) {
      const std::string w = "MissingManifest: " + manifest.string();
      std::cerr << "gbo: warning: " << w << "\n";
      report["warnings"].push_back(w);
      continue;
    }
    Json m;
    try {
      m = Json::parse(in);
    } catch (const Json::parse_error& e) {
      const std::string w = "unreadable manifest " + manifest.string() + ": " + e.what();
      std::cerr << "gbo: warning: " << w << "\n";
      report["warnings"].push_back(w);
      continue;
    }
    const std::string v = m.value("artifact_version", "");
    if (version.empty()) {
      version = v;
    } else if (v != version) {
      const std::string w = "conflicting artifact versions: " + version + " vs " + v + " (" + dir + ")";
      std::cerr << "gbo: warning: " << w << "\n";
      report["warnings"].push_back(w);
    }
    const Json results = m.value("results", Json::object());
    Json row;
    row["run"] = dir;
    row["command"] = m.value("command", "");
    row["artifact_version"] = v;
    csv << dir << ',' << row["command"].get<std::string>();
    for (const auto& c : columns) {
      const Json value = results.value(c, Json());
      row[c] = value;
      csv << ',';
      if (value.is_number()) csv << format_double(value.get<double>());
      else if (value.is_array()) csv << join(value.get<std::vector<double>>());
    }
    csv << "\n";
    report["runs"].push_back(row);
  }

  OutputSet out(resolve_output(out_name));
  out.write_json("report.json", report);
  out.write_text("report.csv", csv.str());
  std::cout << "report: " << report["runs"].size() << " run(s), " << report["warnings"].size() << " warning(s)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CommandFlags {
  Params values;
  std::string out;
  std::string sweep;
  int workers = 0;
};

// Registers a string-valued flag whose value lands in flags.values[key].
void flag(CLI::App* app, CommandFlags& flags, const std::string& name, const std::string& key,
          const std::string& help, const std::string& fallback = {}) {
  if (fallback.empty()) {
    app->add_option(name, flags.values[key], help)->required();
  } else {
    flags.values[key] = fallback;
    app->add_option(name, flags.values[key], help)->capture_default_str();
  }
}

void common_flags(CLI::App* app, CommandFlags& flags, const std::string& default_out, bool sweepable) {
  app->add_option("--out", flags.out, "Output directory, relative to $GBO_OUT_DIR")->default_val(default_out);
  if (sweepable) {
    app->add_option("--sweep", flags.sweep, "Fan out over key=start:step:stop");
    app->add_option("--workers", flags.workers, "Worker threads for a sweep (0: hardware)")->default_val(0);
  }
}

int dispatch(int argc, char** argv) {
  CLI::App app{"gbo: generalized Benjamin-Ono soliton lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GBO_VERSION_STRING);

  CommandFlags gs_f, sp_f, co_f, ode_f, sim_f;
  auto* gs_cmd = app.add_subcommand("ground-state", "Solve for the ground state Q");
  flag(gs_cmd, gs_f, "--p", "p", "Nonlinearity exponent");
  flag(gs_cmd, gs_f, "--n-points", "n_points", "Grid points", "8192");
  flag(gs_cmd, gs_f, "--half-length", "half_length", "Domain half-length", "400");
  flag(gs_cmd, gs_f, "--tol", "tol", "Residual tolerance", "1e-10");
  common_flags(gs_cmd, gs_f, "ground-state", true);

  auto* sp_cmd = app.add_subcommand("spectrum", "Dense spectrum of the linearized operator");
  flag(sp_cmd, sp_f, "--p", "p", "Nonlinearity exponent");
  flag(sp_cmd, sp_f, "--n-points", "n_points", "Grid points (dense)", "1024");
  common_flags(sp_cmd, sp_f, "spectrum", true);

  auto* co_cmd = app.add_subcommand("constants", "Interaction constants, alpha and M");
  flag(co_cmd, co_f, "--p", "p", "Nonlinearity exponent");
  flag(co_cmd, co_f, "--solitons", "solitons", "Number of solitons", "2");
  flag(co_cmd, co_f, "--n-points", "n_points", "Grid points", "8192");
  flag(co_cmd, co_f, "--half-length", "half_length", "Domain half-length", "400");
  common_flags(co_cmd, co_f, "constants", true);

  auto* ode_cmd = app.add_subcommand("ode", "Integrate the reduced dynamics from the asymptotic seed");
  flag(ode_cmd, ode_f, "--p", "p", "Nonlinearity exponent");
  flag(ode_cmd, ode_f, "--solitons", "solitons", "Number of solitons", "2");
  flag(ode_cmd, ode_f, "--t-in", "t_in", "Seed time", "10");
  flag(ode_cmd, ode_f, "--t-end", "t_end", "Final time", "1e6");
  flag(ode_cmd, ode_f, "--n-points", "n_points", "Grid points for the constants", "8192");
  flag(ode_cmd, ode_f, "--half-length", "half_length", "Domain half-length", "400");
  common_flags(ode_cmd, ode_f, "ode", true);

  std::string config_path;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the PDE from a key = value config");
  sim_cmd->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  flag(sim_cmd, sim_f, "--initial", "initial", "ground | file:PATH | asymptotic:N:T_IN[:a0]", "ground");
  common_flags(sim_cmd, sim_f, "simulate", true);

  std::string suite, val_out;
  auto* val_cmd = app.add_subcommand("validate", "Run an acceptance suite and print pass/fail JSON");
  val_cmd->add_option("--suite", suite, "spectral | constants | ode | pde | energy | all")->required();
  val_cmd->add_option("--out", val_out, "Output directory, relative to $GBO_OUT_DIR")->default_val("validate");

  std::vector<std::string> run_dirs;
  std::string rep_out;
  auto* rep_cmd = app.add_subcommand("report", "Consolidate run manifests into one table");
  rep_cmd->add_option("runs", run_dirs, "Run directories");
  rep_cmd->add_option("--out", rep_out, "Output directory, relative to $GBO_OUT_DIR")->default_val("report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  const auto hw = [](int w) { return w > 0 ? w : static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); };
  try {
    if (*gs_cmd) return execute("ground-state", run_ground_state, gs_f.values, gs_f.out, gs_f.sweep, hw(gs_f.workers));
    if (*sp_cmd) return execute("spectrum", run_spectrum, sp_f.values, sp_f.out, sp_f.sweep, hw(sp_f.workers));
    if (*co_cmd) return execute("constants", run_constants, co_f.values, co_f.out, co_f.sweep, hw(co_f.workers));
    if (*ode_cmd) return execute("ode", run_ode, ode_f.values, ode_f.out, ode_f.sweep, hw(ode_f.workers));
    if (*sim_cmd) {
      Params prm = read_key_values(config_path);
      if (prm.count("initial")) throw UsageError("'initial' belongs on the command line, not in the config");
      prm["initial"] = sim_f.values["initial"];
      sim_config_from(simulate_params(prm));  // reject bad configs before any run starts
      return execute("simulate", run_simulate, prm, sim_f.out, sim_f.sweep, hw(sim_f.workers));
    }
    if (*val_cmd) return run_validate(suite, val_out);
    if (*rep_cmd) return run_report(run_dirs, rep_out);
  } catch (const UsageError& e) {
    std::cerr << "gbo: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "gbo: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "gbo: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace gbo::cli

int main(int argc, char** argv) { return gbo::cli::dispatch(argc, argv); }
