#include "fsns/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fsns/checks.hpp"
#include "fsns/errors.hpp"
#include "fsns/manifest.hpp"
#include "fsns/operators.hpp"
#include "fsns/random.hpp"
#include "fsns/snapshot.hpp"

namespace fsns {

namespace fs = std::filesystem;

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "sim.K", "sim.alpha", "sim.nu", "sim.T", "sim.dt", "sim.epsilon", "sim.scheme", "sim.linearized",
      "sim.dealias_fraction",
      "covariance.decay_s", "covariance.c0",
      "diffusion.family", "diffusion.c1", "diffusion.c2", "diffusion.c3", "diffusion.gamma", "diffusion.saturation",
      "initial.preset", "initial.snapshot", "initial.amplitude",
      "output.dir", "output.snapshot_every",
      "run.seed",
      "target.kind", "target.center", "target.center_amplitude", "target.center_norm", "target.radius",
      "target.norm", "target.outside", "target.level", "target.description",
      "optimizer.control_intervals", "optimizer.control_modes", "optimizer.rounds", "optimizer.mu0",
      "optimizer.mu_factor", "optimizer.feasibility_tol", "optimizer.max_iterations", "optimizer.gradient_tol",
      "optimizer.fd_step",
      "ldp.epsilons", "ldp.samples", "ldp.tolerance", "ldp.absolute_floor",
      "control.snapshot_dir", "control.intervals",
      "check.suite", "check.estimates", "check.alpha", "check.eta", "check.trials", "check.ladder", "check.K",
      "check.fields", "check.samples", "check.max_growth"};
  return keys;
}

std::string config_hash(const Config& raw) {
  Config c;
  for (const auto& [k, v] : raw.entries()) {
    if (k != "output.dir") c.set(k, v);
  }
  return sha256_hex(c.serialize());
}

namespace {

std::size_t positive_count(const Config& c, const std::string& key, long long def) {
  const long long v = c.get_int(key, def);
  if (v < 0) throw ConfigError("config key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

bool needs_sim(const std::string& command) { return command != "check"; }

}  // namespace

RunConfig load_run_config(const Config& raw, const std::string& command) {
  raw.reject_unknown(known_config_keys());
  RunConfig rc;
  rc.raw = raw;
  rc.hash = config_hash(raw);
  rc.seed = raw.require_u64("run.seed");
  if (raw.has("output.dir")) rc.output_dir = raw.get_string("output.dir", "");
  rc.snapshot_every = positive_count(raw, "output.snapshot_every", 0);
  if (!needs_sim(command)) return rc;

  const long long K = raw.require_int("sim.K");
  if (K < 1 || K > 4096) throw ConfigError("sim.K must lie in [1, 4096]");
  try {
    rc.sim.grid = make_grid(static_cast<int>(K), raw.get_double("sim.dealias_fraction", 2.0 / 3.0));
    rc.sim.alpha = raw.require_double("sim.alpha");
    rc.sim.nu = raw.require_double("sim.nu");
    rc.sim.T = raw.require_double("sim.T");
    rc.sim.epsilon = raw.get_double("sim.epsilon", 0.0);
    rc.sim.scheme = scheme_from_string(raw.get_string("sim.scheme", "exponential"));
    rc.sim.linearized = raw.get_bool("sim.linearized", false);
    if (raw.has("sim.dt")) {
      rc.sim.dt = raw.require_double("sim.dt");
    } else {
      // Largest dt below the guidance that divides T evenly.
      const double hint = suggested_dt(rc.sim.nu, static_cast<int>(K), rc.sim.alpha);
      rc.sim.dt = rc.sim.T / std::max(2.0, std::ceil(rc.sim.T / hint));
      rc.dt_defaulted = true;
    }
    rc.warnings = rc.sim.validate();

    rc.covariance = CovarianceSpec(raw.get_double("covariance.decay_s", 2.0), raw.get_double("covariance.c0", 1.0));
    rc.diffusion.family = diffusion_family_from_string(raw.get_string("diffusion.family", "additive"));
    rc.diffusion.c1 = raw.get_double("diffusion.c1", 1.0);
    rc.diffusion.c2 = raw.get_double("diffusion.c2", 0.0);
    rc.diffusion.c3 = raw.get_double("diffusion.c3", 0.0);
    rc.diffusion.gamma = raw.get_double("diffusion.gamma", 1.0);
    rc.diffusion.saturation = raw.get_double("diffusion.saturation", 1.0);
    rc.diffusion.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  if (raw.has("initial.snapshot")) {
    rc.initial_snapshot = raw.get_string("initial.snapshot", "");
  } else {
    rc.initial_preset = raw.require_string("initial.preset");
  }
  rc.initial_amplitude = raw.get_double("initial.amplitude", 1.0);

  OptimizerConfig& o = rc.optimizer;
  o.control_intervals = positive_count(raw, "optimizer.control_intervals", 20);
  o.control_modes = positive_count(raw, "optimizer.control_modes", 8);
  o.rounds = static_cast<int>(raw.get_int("optimizer.rounds", 5));
  o.mu0 = raw.get_double("optimizer.mu0", 10.0);
  o.mu_factor = raw.get_double("optimizer.mu_factor", 10.0);
  o.feasibility_tol = raw.get_double("optimizer.feasibility_tol", 1e-3);
  o.max_iterations = positive_count(raw, "optimizer.max_iterations", 200);
  o.gradient_tol = raw.get_double("optimizer.gradient_tol", 1e-7);
  o.fd_step = raw.get_double("optimizer.fd_step", 1e-6);
  if (o.control_intervals == 0 || o.control_modes == 0 || o.rounds < 1 || !(o.mu0 > 0) || !(o.mu_factor >= 1) ||
      !(o.feasibility_tol > 0) || !(o.fd_step > 0)) {
    throw ConfigError("optimizer block: counts and tolerances must be positive");
  }

  if (command == "rate" || command == "ldp") raw.require_string("target.kind");
  if (command == "ldp") {
    rc.epsilons = raw.get_double_list("ldp.epsilons", {});
    if (rc.epsilons.empty()) raw.require_string("ldp.epsilons");
    for (std::size_t i = 0; i < rc.epsilons.size(); ++i) {
      if (!(rc.epsilons[i] > 0) || (i > 0 && !(rc.epsilons[i] < rc.epsilons[i - 1]))) {
        throw ConfigError("ldp.epsilons must be positive and strictly decreasing");
      }
    }
    rc.samples = static_cast<std::size_t>(raw.require_u64("ldp.samples"));
    if (rc.samples == 0) throw ConfigError("ldp.samples must be positive");
    rc.sanity.tolerance = raw.get_double("ldp.tolerance", 0.2);
    rc.sanity.absolute_floor = raw.get_double("ldp.absolute_floor", 0.01);
  }
  if (raw.has("control.snapshot_dir")) rc.control_dir = raw.get_string("control.snapshot_dir", "");
  rc.control_intervals = positive_count(raw, "control.intervals", static_cast<long long>(rc.sim.steps()));
  if (rc.control_intervals == 0) throw ConfigError("control.intervals must be positive");
  return rc;
}

SpectralField initial_state(const RunConfig& rc) {
  if (!rc.initial_snapshot.empty()) {
    Snapshot s = [&] {
      try {
        return read_snapshot(rc.initial_snapshot, rc.sim.grid->dealias_fraction());
      } catch (const std::exception& e) {
        throw ConfigError("initial.snapshot: " + std::string(e.what()));
      }
    }();
    if (!s.field.is_vector()) throw ConfigError("initial.snapshot: expected a divergence-free field");
    if (s.field.grid().K() != rc.sim.grid->K()) {
      throw ConfigError("initial.snapshot: K=" + std::to_string(s.field.grid().K()) + " differs from sim.K=" +
                        std::to_string(rc.sim.grid->K()));
    }
    return SpectralField(rc.sim.grid, FieldKind::DivFreeVector,
                         std::vector<Complex>(s.field.coefficients().begin(), s.field.coefficients().end()));
  }
  try {
    return initial_preset(rc.initial_preset, rc.sim.grid, rc.initial_amplitude, rc.seed);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("initial.preset: ") + e.what());
  }
}

TargetSet build_target(const RunConfig& rc, const SpectralField& u0) {
  const Config& c = rc.raw;
  const std::string kind = c.require_string("target.kind");
  const SobolevExponent norm{c.get_double("target.norm", 1.0)};
  TargetSet t;
  if (kind == "endpoint_ball") {
    const std::string center = c.get_string("target.center", "zero");
    SpectralField field(rc.sim.grid, FieldKind::DivFreeVector);
    if (center == "deterministic") {
      SimParams p = rc.sim;
      p.epsilon = 0.0;
      IntegrateOptions io;
      io.record_every = 0;
      io.energy_log = false;
      field = integrate(u0, p, rc.covariance, rc.diffusion, NoDriver{}, io).final_state();
    } else if (center != "zero") {
      try {
        field = initial_preset(center, rc.sim.grid, c.get_double("target.center_amplitude", 1.0), rc.seed);
      } catch (const DomainError& e) {
        throw ConfigError(std::string("target.center: ") + e.what());
      }
    }
    if (c.has("target.center_norm")) {
      const double want = c.require_double("target.center_norm");
      const double have = sobolev_norm(field, norm);
      if (!(have > 0.0)) throw ConfigError("target.center_norm: center field is zero");
      field = (want / have) * field;
    }
    t.kind = EndpointBall{field, c.require_double("target.radius"), norm, c.get_bool("target.outside", false)};
  } else if (kind == "sup_exceed") {
    t.kind = SupExceed{c.require_double("target.level"), norm};
  } else {
    throw ConfigError("target.kind must be endpoint_ball or sup_exceed, got '" + kind + "'");
  }
  t.description = c.get_string("target.description", kind);
  try {
    t.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return t;
}

ControlPath load_control(const RunConfig& rc) {
  if (rc.control_dir.empty()) return ControlPath::zero(rc.sim.grid, rc.sim.T, rc.control_intervals);
  std::vector<fs::path> files;
  if (!fs::is_directory(rc.control_dir)) {
    throw ConfigError("control.snapshot_dir '" + rc.control_dir.string() + "' is not a directory");
  }
  for (const auto& e : fs::directory_iterator(rc.control_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".fsns") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("control.snapshot_dir contains no .fsns files");
  ControlPath path;
  for (const auto& f : files) {
    Snapshot s = read_snapshot(f, rc.sim.grid->dealias_fraction());
    if (s.field.grid().K() != rc.sim.grid->K() || !s.field.is_vector()) {
      throw ConfigError("control snapshot '" + f.string() + "' does not match sim.K or is not a velocity field");
    }
    path.times.push_back(s.time);
    path.values.emplace_back(rc.sim.grid, FieldKind::DivFreeVector,
                             std::vector<Complex>(s.field.coefficients().begin(), s.field.coefficients().end()));
  }
  path.times.push_back(rc.sim.T);
  try {
    path.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("control.snapshot_dir: ") + e.what());
  }
  return path;
}

namespace {

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string step_name(const char* prefix, std::size_t n, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%08zu%s", prefix, n, ext);
  return buf;
}

// Files and directories a previous run of any command may have left.
void clear_artifacts(const fs::path& dir, bool keep_rungs) {
  fs::remove(dir / kManifestName);
  for (const char* f : {"energy.csv", "final.fsns", "summary.json", "rate.json", "ldp_curve.csv", "ldp_curve.json",
                        "sanity.json", "check_report.json"}) {
    fs::remove(dir / f);
  }
  fs::remove_all(dir / "snapshots");
  fs::remove_all(dir / "control");
  if (!keep_rungs) fs::remove_all(dir / "rungs");
}

struct Run {
  fs::path dir;
  RunManifest manifest;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void finish(bool complete, int code, const std::string& note = "") {
    manifest.complete = complete;
    manifest.exit_code = code;
    manifest.note = note;
    manifest.finished_utc = utc_timestamp();
    manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.files = checksum_tree(dir);
    write_manifest(dir, manifest);
  }
};

Run start_run(const std::string& command, const fs::path& dir, const std::string& hash, bool keep_rungs) {
  try {
    fs::create_directories(dir);
    clear_artifacts(dir, keep_rungs);
  } catch (const fs::filesystem_error& e) {
    throw ConfigError("output directory '" + dir.string() + "': " + e.what());
  }
  Run r;
  r.dir = dir;
  r.manifest.command = command;
  r.manifest.config_hash = hash;
  r.manifest.version = FSNS_VERSION;
  r.manifest.started_utc = utc_timestamp();
  return r;
}

void write_energy(const fs::path& dir, const Trajectory& traj) {
  std::ostringstream os;
  write_energy_csv(os, traj);
  write_file_atomic(dir / "energy.csv", os.str());
}

nlohmann::json summary_of(const RunConfig& rc, const Trajectory& traj, const std::string& command) {
  nlohmann::json s{{"command", command},
                   {"K", rc.sim.grid->K()},
                   {"alpha", rc.sim.alpha},
                   {"nu", rc.sim.nu},
                   {"T", rc.sim.T},
                   {"dt", rc.sim.dt},
                   {"dt_defaulted", rc.dt_defaulted},
                   {"epsilon", rc.sim.epsilon},
                   {"scheme", to_string(rc.sim.scheme)},
                   {"steps", traj.energy_log.empty() ? 0 : traj.energy_log.size() - 1},
                   {"final_time", traj.times.back()},
                   {"warnings", rc.warnings}};
  if (!traj.energy_log.empty()) {
    s["initial_h1_norm_sq"] = traj.energy_log.front().h1_sq;
    s["final_h1_norm_sq"] = traj.energy_log.back().h1_sq;
  }
  return s;
}

void report_warnings(const RunConfig& rc, std::ostream& err) {
  if (rc.dt_defaulted) {
    err << "note: sim.dt not set; using dt=" << rc.sim.dt
        << " (guidance dt <= min(0.1, 0.5/(nu K^alpha)) = " << suggested_dt(rc.sim.nu, rc.sim.grid->K(), rc.sim.alpha)
        << ")\n";
  }
  for (const auto& w : rc.warnings) err << "warning: " << w << "\n";
}

// simulate, vorticity and skeleton share the trajectory artifact layout.
int cmd_trajectory(const RunConfig& rc, const std::string& command, std::ostream& out, std::ostream& err) {
  const SpectralField u0 = initial_state(rc);
  std::optional<ControlPath> control;
  if (command == "skeleton") control = load_control(rc);

  Run run = start_run(command, rc.output_dir, rc.hash, false);
  const bool vort = command == "vorticity";
  const fs::path snaps = rc.output_dir / "snapshots";
  if (rc.snapshot_every > 0) fs::create_directories(snaps);

  IntegrateOptions io;
  io.record_every = 0;
  io.observer = [&](std::size_t n, double t, const SpectralField& x) {
    if (rc.snapshot_every > 0 && n % rc.snapshot_every == 0) {
      write_snapshot(snaps / step_name("step_", n, ".fsns"), x, t, rc.sim.alpha, rc.sim.nu);
    }
  };
  const SpectralField x0 = vort ? curl(u0) : u0;
  if (rc.snapshot_every > 0) write_snapshot(snaps / step_name("step_", 0, ".fsns"), x0, 0.0, rc.sim.alpha, rc.sim.nu);

  Driver driver = NoDriver{};
  if (control) {
    driver = *control;
  } else if (rc.sim.epsilon > 0.0) {
    driver = NoiseDriver{rc.seed, stream_id(StreamFamily::Trajectory, 0), 1};
  }

  Trajectory traj;
  try {
    traj = vort ? integrate_vorticity(x0, rc.sim, rc.covariance, rc.diffusion, driver, io)
                : integrate(x0, rc.sim, rc.covariance, rc.diffusion, driver, io);
  } catch (const IntegrationBlowUp& e) {
    write_energy(run.dir, e.partial());
    auto s = summary_of(rc, e.partial(), command);
    s["blow_up"] = {{"step", e.step()}, {"time", e.time()}, {"message", e.what()}};
    write_file_atomic(run.dir / "summary.json", dump(s));
    err << "blow-up: " << e.what() << "\n";
    run.finish(false, kExitBlowUp, std::string("blow-up: ") + e.what());
    return kExitBlowUp;
  }

  write_energy(run.dir, traj);
  write_snapshot(run.dir / "final.fsns", traj.final_state(), traj.times.back(), rc.sim.alpha, rc.sim.nu);
  auto s = summary_of(rc, traj, command);
  if (control) s["control_energy"] = control_energy(*control, rc.covariance);
  write_file_atomic(run.dir / "summary.json", dump(s));
  run.finish(true, kExitOk);
  out << command << ": " << traj.energy_log.size() - 1 << " steps, |u(T)|^2_H1 = " << traj.energy_log.back().h1_sq
      << "\n";
  return kExitOk;
}

void write_control(const fs::path& dir, const ControlPath& c, const SimParams& p) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    write_snapshot(dir / step_name("interval_", i, ".fsns"), c.values[i], c.times[i], p.alpha, p.nu);
  }
}

nlohmann::json rate_json(const RateResult& r, const TargetSet& t) {
  auto j = rate_summary_json(r);
  j["target"] = t.description;
  return j;
}

int cmd_rate(const RunConfig& rc, std::ostream& out, int threads) {
  const SpectralField u0 = initial_state(rc);
  const TargetSet target = build_target(rc, u0);
  Run run = start_run("rate", rc.output_dir, rc.hash, false);
  OptimizerConfig opt = rc.optimizer;
  opt.threads = threads;
  const RateResult r = minimize_rate(target, u0, rc.sim, rc.covariance, rc.diffusion, opt);
  write_file_atomic(run.dir / "rate.json", dump(rate_json(r, target)));
  write_control(run.dir / "control", r.control, rc.sim);
  run.manifest.extra = {{"converged", r.converged}};
  run.finish(true, kExitOk, r.converged ? "" : "optimizer did not reach a feasible control");
  out << "rate: energy = " << r.energy << ", converged = " << (r.converged ? "true" : "false") << "\n";
  return kExitOk;
}

std::optional<nlohmann::json> cached(const fs::path& file, const std::string& hash) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(in);
    if (j.at("config_hash").get<std::string>() == hash) return j;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

int cmd_ldp(const RunConfig& rc, std::ostream& out, int threads) {
  const SpectralField u0 = initial_state(rc);
  const TargetSet target = build_target(rc, u0);
  Run run = start_run("ldp", rc.output_dir, rc.hash, true);
  const fs::path rungs = run.dir / "rungs";
  fs::create_directories(rungs);
  OptimizerConfig opt = rc.optimizer;
  opt.threads = threads;
  std::size_t reused = 0;
  bool reused_rates = false;

  // Rates for the set, its interior (shrunk by the feasibility tolerance)
  // and its closure (enlarged by it).
  nlohmann::json rates;
  if (auto c = cached(rungs / "rates.json", rc.hash)) {
    rates = (*c)["rates"];
    reused_rates = true;
  } else {
    const double tol = rc.optimizer.feasibility_tol;
    const std::pair<const char*, TargetSet> sets[] = {
        {"nominal", target}, {"interior", target.inflated(-tol)}, {"closure", target.inflated(tol)}};
    for (const auto& [name, set] : sets) {
      rates[name] = rate_json(minimize_rate(set, u0, rc.sim, rc.covariance, rc.diffusion, opt), set);
    }
    write_file_atomic(rungs / "rates.json", dump({{"config_hash", rc.hash}, {"rates", rates}}));
  }
  auto rate_of = [&](const char* name) -> std::optional<double> {
    const auto& r = rates[name];
    if (!r["converged"].get<bool>()) return std::nullopt;
    return r["energy"].get<double>();
  };

  std::vector<LdpPoint> curve;
  for (std::size_t i = 0; i < rc.epsilons.size(); ++i) {
    const fs::path f = rungs / step_name("rung_", i, ".json");
    if (auto c = cached(f, rc.hash)) {
      curve.push_back(ldp_point_from_json((*c)["point"]));
      ++reused;
      out << "ldp: reusing rung " << i << " (epsilon = " << rc.epsilons[i] << ")\n";
      continue;
    }
    curve.push_back(
        estimate_ldp_point(target, u0, rc.sim, rc.covariance, rc.diffusion, rc.epsilons[i], rc.samples, rc.seed,
                           threads));
    write_file_atomic(f, dump({{"config_hash", rc.hash}, {"point", to_json(curve.back())}}));
    out << "ldp: epsilon = " << rc.epsilons[i] << ", hits = " << curve.back().hits << "/" << rc.samples << "\n";
  }

  const SanityReport rep = ldp_sanity_report(rate_of("nominal"), rate_of("interior"), rate_of("closure"), curve,
                                             rc.sanity);
  std::string csv = "epsilon,samples,hits,p_hat,eps_log_p,half_width,zero_hits\n";
  nlohmann::json jcurve = nlohmann::json::array();
  for (const auto& p : curve) {
    char v[32] = "";  // empty when no hits
    if (p.eps_log_p) std::snprintf(v, sizeof v, "%.17g", *p.eps_log_p);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%zu,%.17g,%s,%.17g,%d\n", p.epsilon, p.samples, p.hits, p.p_hat, v,
                  p.half_width, p.zero_hits ? 1 : 0);
    csv += buf;
    jcurve.push_back(to_json(p));
  }
  write_file_atomic(run.dir / "ldp_curve.csv", csv);
  write_file_atomic(run.dir / "ldp_curve.json", dump(jcurve));
  write_file_atomic(run.dir / "rate.json", dump(rates));
  write_file_atomic(run.dir / "sanity.json", dump(to_json(rep)));
  run.manifest.extra = {{"reused_rungs", reused}, {"reused_rates", reused_rates}, {"verdict", rep.verdict}};
  run.finish(true, kExitOk);
  out << "ldp: verdict " << rep.verdict;
  if (rep.extrapolated) out << ", extrapolated eps log P = " << *rep.extrapolated;
  if (rep.rate) out << ", -I = " << -*rep.rate;
  out << "\n";
  return kExitOk;
}

int cmd_check(const CliOptions& cli, const Config& raw, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  const std::string suite = !cli.suite.empty() ? cli.suite : raw.get_string("check.suite", "");
  if (suite.empty()) throw ConfigError("check: no suite given (expected estimates, identities or noise)");
  fs::path dir = cli.out ? *cli.out : fs::path(raw.get_string("output.dir", "check-" + suite));
  Config hashed = raw;
  hashed.set("check.suite", suite);
  hashed.set("run.seed", std::to_string(seed));
  CheckOutcome outcome;
  try {
    outcome = run_check_suite(suite, raw, seed, cli.threads);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  Run run = start_run("check", dir, config_hash(hashed), false);
  write_file_atomic(run.dir / "check_report.json", dump(to_json(outcome)));
  for (const auto& item : outcome.items) {
    out << (item.pass ? "PASS " : "FAIL ") << item.name << "\n";
    if (!item.pass) err << "violated: " << item.name << " " << item.detail.dump() << "\n";
  }
  const int code = outcome.pass ? kExitOk : kExitCheckFailed;
  run.finish(true, code);
  out << "check " << suite << ": " << (outcome.pass ? "PASS" : "FAIL") << "\n";
  return code;
}

}  // namespace

int run_command(const CliOptions& cli, std::ostream& out, std::ostream& err) {
  static const std::set<std::string> commands = {"simulate", "vorticity", "skeleton", "rate", "ldp", "check"};
  try {
    if (!commands.count(cli.command)) throw ConfigError("unknown command '" + cli.command + "'");
    if (cli.threads < 1) throw ConfigError("--threads must be at least 1");

    if (cli.command == "check") {
      Config raw = cli.config ? Config::load(*cli.config) : Config{};
      raw.reject_unknown(known_config_keys());
      const std::uint64_t seed = cli.seed ? *cli.seed : raw.get_u64("run.seed", 1);
      return cmd_check(cli, raw, seed, out, err);
    }

    if (!cli.config) throw ConfigError("--config is required for '" + cli.command + "'");
    Config raw = Config::load(*cli.config);
    if (cli.seed) raw.set("run.seed", std::to_string(*cli.seed));
    RunConfig rc = load_run_config(raw, cli.command);
    if (cli.out) rc.output_dir = *cli.out;
    if (rc.output_dir.empty()) throw ConfigError("missing required config key 'output.dir' (or pass --out)");
    report_warnings(rc, err);

    if (cli.command == "rate") return cmd_rate(rc, out, cli.threads);
    if (cli.command == "ldp") return cmd_ldp(rc, out, cli.threads);
    return cmd_trajectory(rc, cli.command, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const IntegrationBlowUp& e) {
    err << "blow-up: " << e.what() << "\n";
    return kExitBlowUp;
  } catch (const BlowUp& e) {
    err << "blow-up: " << e.what() << "\n";
    return kExitBlowUp;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace fsns
