#include "fsns/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "fsns/operators.hpp"
#include "fsns/random.hpp"

namespace fsns {

std::string to_string(Scheme s) {
  return s == Scheme::ExponentialEulerMaruyama ? "exponential" : "semi_implicit";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "exponential" || s == "ExponentialEulerMaruyama") return Scheme::ExponentialEulerMaruyama;
  if (s == "semi_implicit" || s == "SemiImplicitEuler") return Scheme::SemiImplicitEuler;
  throw DomainError("unknown scheme '" + s + "' (expected exponential or semi_implicit)");
}

double suggested_dt(double nu, int K, double alpha) {
  return std::min(0.1, 0.5 / (nu * std::pow(static_cast<double>(K), alpha)));
}

std::vector<std::string> SimParams::validate() const {
  if (!grid) throw DomainError("SimParams: grid not set");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("SimParams: nu must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("SimParams: T must be positive");
  if (!(dt > 0.0) || !(dt < T)) throw DomainError("SimParams: dt must satisfy 0 < dt < T");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("SimParams: epsilon must be >= 0");
  if (!(alpha >= 1.0 && alpha <= 2.0)) {
    throw DomainError("SimParams: alpha must lie in [1, 2], got " + std::to_string(alpha));
  }
  std::vector<std::string> warnings;
  if (alpha < 4.0 / 3.0 - 1e-12) {
    warnings.push_back("alpha=" + std::to_string(alpha) + " is below 4/3; well-posedness is not covered there");
  }
  const double hint = suggested_dt(nu, grid->K(), alpha);
  if (dt > hint) {
    std::ostringstream os;
    os << "dt=" << dt << " exceeds the explicit-advection guidance " << hint << " = min(0.1, 0.5/(nu K^alpha))";
    warnings.push_back(os.str());
  }
  return warnings;
}

std::size_t SimParams::steps() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / dt)));
}

ControlPath ControlPath::zero(const GridPtr& grid, double T, std::size_t intervals) {
  if (intervals == 0) throw DomainError("ControlPath: at least one interval required");
  ControlPath path;
  path.times.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) path.times[i] = T * static_cast<double>(i) / intervals;
  path.values.assign(intervals, SpectralField(grid, FieldKind::DivFreeVector));
  return path;
}

const SpectralField& ControlPath::at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  std::ptrdiff_t idx = (it - times.begin()) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(values.size()) - 1);
  return values[static_cast<std::size_t>(idx)];
}

void ControlPath::validate() const {
  if (values.empty() || times.size() != values.size() + 1) {
    throw DomainError("ControlPath: need n + 1 partition points for n values");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw DomainError("ControlPath: partition must be increasing");
  }
  for (const auto& v : values) {
    if (!v.is_vector()) throw DomainError("ControlPath: values must be divergence-free fields");
    require_same_grid(values.front(), v, "ControlPath");
    if (!v.all_finite()) throw DomainError("ControlPath: non-finite control value");
  }
}

namespace {

void check_blow_up(const SpectralField& u, std::size_t step, double t) {
  if (!u.all_finite()) throw BlowUp(step, t, "non-finite coefficient at step " + std::to_string(step));
  const double n = sobolev_norm(u, {1.0});
  if (!(n <= kBlowUpThreshold)) {
    throw BlowUp(step, t, "H^1 norm " + std::to_string(n) + " exceeds blow-up threshold at step " +
                              std::to_string(step));
  }
}

/// u+ = L(u + increment) with L the scheme's linear propagator.
SpectralField propagate(const SpectralField& u, const SpectralField& increment, const SimParams& p) {
  const auto& grid = u.grid();
  std::vector<Complex> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double rate = p.nu * std::pow(grid.magnitude(i), p.alpha) * p.dt;
    const double factor = p.scheme == Scheme::ExponentialEulerMaruyama ? std::exp(-rate) : 1.0 / (1.0 + rate);
    out[i] = factor * (u[i] + increment[i]);
  }
  return SpectralField(u.grid_ptr(), u.kind(), std::move(out));
}

SpectralField drift_increment(const SpectralField& u, const SimParams& p) {
  if (p.linearized) return SpectralField(u.grid_ptr(), u.kind());
  return p.dt * convection(u);
}

SpectralField vorticity_drift_increment(const SpectralField& theta, const SimParams& p) {
  if (p.linearized) return SpectralField(theta.grid_ptr(), theta.kind());
  return p.dt * advect_scalar(biot_savart(theta), theta);
}

void require_velocity(const SpectralField& u, const SimParams& p, const char* where) {
  if (!u.is_vector()) throw DomainError(std::string(where) + ": expected a divergence-free field");
  if (!(u.grid() == *p.grid)) throw GridMismatch(std::string(where) + ": field grid differs from SimParams grid");
}

NoiseIncrement driver_increment(const NoiseDriver& d, const SimParams& p, std::size_t step) {
  if (d.fine_per_step == 0) throw DomainError("NoiseDriver: fine_per_step must be positive");
  const double fine_dt = p.dt / static_cast<double>(d.fine_per_step);
  if (d.fine_per_step == 1) return sample_increment(*p.grid, fine_dt, d.seed, d.stream, step);
  std::vector<NoiseIncrement> parts;
  parts.reserve(d.fine_per_step);
  for (std::uint64_t j = 0; j < d.fine_per_step; ++j) {
    parts.push_back(sample_increment(*p.grid, fine_dt, d.seed, d.stream, step * d.fine_per_step + j));
  }
  return combine(parts);
}

EnergyRecord energy_record(double t, const SpectralField& u, const SimParams& p) {
  return {t, sobolev_norm_sq(u, {1.0}), sobolev_norm_sq(u, {1.0 + p.alpha / 2.0}),
          trilinear_b(u, u, u, Pairing::H1)};
}

// Shared time loop. `advance(u, t, n)` returns the state after step n.
template <class Advance, class Velocity>
Trajectory run(const SpectralField& x0, const SimParams& p, const IntegrateOptions& opt, Advance&& advance,
               Velocity&& velocity) {
  Trajectory traj;
  traj.kind = x0.kind();
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  if (opt.energy_log) traj.energy_log.push_back(energy_record(0.0, velocity(x0), p));

  const std::size_t n_steps = p.steps();
  SpectralField x = x0;
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = static_cast<double>(n) * p.dt;
    const double t_next = static_cast<double>(n + 1) * p.dt;
    try {
      x = advance(x, t, n);
    } catch (const BlowUp& e) {
      if (traj.times.back() != t) {
        traj.times.push_back(t);
        traj.states.push_back(x);
      }
      throw IntegrationBlowUp(e, std::move(traj));
    }
    if (opt.energy_log) traj.energy_log.push_back(energy_record(t_next, velocity(x), p));
    const bool last = n + 1 == n_steps;
    if (last || (opt.record_every > 0 && (n + 1) % opt.record_every == 0)) {
      traj.times.push_back(t_next);
      traj.states.push_back(x);
    }
    if (opt.observer) opt.observer(n + 1, t_next, x);
  }
  return traj;
}

void check_driver(const Driver& driver, const SimParams& p) {
  if (std::holds_alternative<NoDriver>(driver) && p.epsilon > 0.0) {
    throw DomainError("integrate: epsilon > 0 requires a noise driver");
  }
  if (const auto* c = std::get_if<ControlPath>(&driver)) {
    c->validate();
    if (!(c->values.front().grid() == *p.grid)) throw GridMismatch("integrate: control grid differs from SimParams");
  }
}

}  // namespace

SpectralField step_stochastic(const SpectralField& u, double t, const SimParams& p, const CovarianceSpec& q,
                              const DiffusionSpec& g, const NoiseIncrement& dw, std::size_t step) {
  require_velocity(u, p, "step_stochastic");
  SpectralField inc = drift_increment(u, p);
  if (p.epsilon > 0.0) {
    const double s = std::sqrt(p.epsilon) * g.gain(t, u);
    inc = axpy(inc, s, wiener_increment(dw, q, p.grid));
  }
  SpectralField next = propagate(u, inc, p);
  check_blow_up(next, step, t + p.dt);
  return next;
}

SpectralField step_skeleton(const SpectralField& u, double t, const SimParams& p, const CovarianceSpec& /*q*/,
                            const DiffusionSpec& g, const SpectralField& v_t, std::size_t step) {
  require_velocity(u, p, "step_skeleton");
  require_same_grid(u, v_t, "step_skeleton");
  const SpectralField inc = axpy(drift_increment(u, p), p.dt * g.gain(t, u), v_t);
  SpectralField next = propagate(u, inc, p);
  check_blow_up(next, step, t + p.dt);
  return next;
}

Trajectory integrate(const SpectralField& u0, const SimParams& p, const CovarianceSpec& q, const DiffusionSpec& g,
                     const Driver& driver, const IntegrateOptions& opt) {
  p.validate();
  g.validate();
  require_velocity(u0, p, "integrate");
  check_driver(driver, p);
  auto identity = [](const SpectralField& u) -> const SpectralField& { return u; };

  return run(u0, p, opt, [&](const SpectralField& u, double t, std::size_t n) {
    if (const auto* c = std::get_if<ControlPath>(&driver)) {
      return step_skeleton(u, t, p, q, g, c->at(t + 0.5 * p.dt), n);
    }
    if (const auto* d = std::get_if<NoiseDriver>(&driver); d && p.epsilon > 0.0) {
      return step_stochastic(u, t, p, q, g, driver_increment(*d, p, n), n);
    }
    SpectralField next = propagate(u, drift_increment(u, p), p);
    check_blow_up(next, n, t + p.dt);
    return next;
  }, identity);
}

Trajectory integrate_vorticity(const SpectralField& theta0, const SimParams& p, const CovarianceSpec& q,
                               const DiffusionSpec& g, const Driver& driver, const IntegrateOptions& opt) {
  p.validate();
  g.validate();
  if (theta0.kind() != FieldKind::Scalar) throw DomainError("integrate_vorticity: expected a scalar vorticity");
  if (!(theta0.grid() == *p.grid)) throw GridMismatch("integrate_vorticity: field grid differs from SimParams");
  check_driver(driver, p);
  auto velocity = [](const SpectralField& theta) { return biot_savart(theta); };

  return run(theta0, p, opt, [&](const SpectralField& theta, double t, std::size_t n) {
    SpectralField inc = vorticity_drift_increment(theta, p);
    // G~(theta) = curl G(R theta): sigma depends on |R theta|_{H^1} = |theta|_{L^2}.
    const double sigma = g.gain_from_norm(t, sobolev_norm(theta, {0.0}));
    if (const auto* c = std::get_if<ControlPath>(&driver)) {
      inc = axpy(inc, p.dt * sigma, curl(c->at(t + 0.5 * p.dt)));
    } else if (const auto* d = std::get_if<NoiseDriver>(&driver); d && p.epsilon > 0.0) {
      const auto dw = wiener_increment(driver_increment(*d, p, n), q, p.grid);
      inc = axpy(inc, std::sqrt(p.epsilon) * sigma, curl(dw));
    }
    SpectralField next = propagate(theta, inc, p);
    if (!next.all_finite() || !(sobolev_norm(next, {0.0}) <= kBlowUpThreshold)) {
      throw BlowUp(n, t + p.dt, "vorticity blow-up at step " + std::to_string(n));
    }
    return next;
  }, velocity);
}

EnergyBalance energy_balance(const Trajectory& traj, const SimParams& p) {
  if (traj.energy_log.size() < 2) throw DomainError("energy_balance: trajectory has no energy log");
  EnergyBalance b;
  b.initial = traj.energy_log.front().h1_sq;
  b.final = traj.energy_log.back().h1_sq;
  for (std::size_t n = 1; n < traj.energy_log.size(); ++n) {
    const double dt = traj.energy_log[n].t - traj.energy_log[n - 1].t;
    b.dissipation += 2.0 * p.nu * dt * traj.energy_log[n].h1a2_sq;
  }
  return b;
}

namespace {

std::vector<double> parse_args(const std::string& preset, std::string& name) {
  const auto open = preset.find('(');
  name = preset.substr(0, open);
  std::vector<double> args;
  if (open == std::string::npos) return args;
  const auto close = preset.find(')', open);
  if (close == std::string::npos || close + 1 != preset.size()) {
    throw DomainError("initial preset '" + preset + "': unbalanced parentheses");
  }
  std::stringstream ss(preset.substr(open + 1, close - open - 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      args.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw DomainError("initial preset '" + preset + "': bad argument '" + tok + "'");
    }
  }
  return args;
}

SpectralField mode_field(const GridPtr& grid, std::span<const std::pair<Mode, Complex>> entries) {
  for (const auto& [k, c] : entries) {
    if (!grid->is_active(k)) {
      throw DomainError("initial preset: mode (" + std::to_string(k.k1) + "," + std::to_string(k.k2) +
                        ") is not active for K=" + std::to_string(grid->K()));
    }
  }
  return SpectralField::from_modes(grid, FieldKind::DivFreeVector, entries);
}

}  // namespace

SpectralField initial_preset(const std::string& preset, const GridPtr& grid, double amplitude, std::uint64_t seed) {
  std::string name;
  const auto args = parse_args(preset, name);
  if (name == "zero" && args.empty()) return SpectralField(grid, FieldKind::DivFreeVector);
  if (name == "single_mode" && (args.empty() || args.size() == 2)) {
    Mode k{1, 0};
    if (args.size() == 2) k = {static_cast<int>(args[0]), static_cast<int>(args[1])};
    const std::pair<Mode, Complex> e[] = {{k, Complex(amplitude, 0.0)}};
    return mode_field(grid, e);
  }
  if (name == "two_mode" && args.empty()) {
    const std::pair<Mode, Complex> e[] = {{{1, 0}, Complex(amplitude, 0.0)}, {{1, 1}, Complex(0.5 * amplitude, 0.0)}};
    return mode_field(grid, e);
  }
  if (name == "random_smooth" && args.size() == 1) {
    RandomStream rng(seed, stream_id(StreamFamily::Initial, 0));
    const auto f = random_field(grid, FieldKind::DivFreeVector, args[0], rng);
    const double n = sobolev_norm(f, {0.0});
    return n > 0.0 ? (amplitude / n) * f : f;
  }
  throw DomainError("unknown initial preset '" + preset +
                    "' (expected zero, single_mode, single_mode(k1,k2), two_mode or random_smooth(rho))");
}

void write_energy_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,H1_norm_sq,H1a2_norm_sq,trilinear_residual\n";
  char buf[128];
  for (const auto& r : traj.energy_log) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.t, r.h1_sq, r.h1a2_sq, r.trilinear_residual);
    os << buf;
  }
}

}  // namespace fsns
