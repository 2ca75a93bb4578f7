#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fsns/errors.hpp"
#include "fsns/spectral_field.hpp"
#include "fsns/stochastic.hpp"

namespace fsns {

enum class Scheme { ExponentialEulerMaruyama, SemiImplicitEuler };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

inline constexpr double kBlowUpThreshold = 1e8;

struct SimParams {
  double alpha = 1.5;
  double nu = 1.0;
  double T = 1.0;
  double dt = 1e-2;
  double epsilon = 0.0;
  GridPtr grid;
  Scheme scheme = Scheme::ExponentialEulerMaruyama;
  /// Drops the convection term (linear Stokes-type dynamics).
  bool linearized = false;

  /// Throws DomainError on hard violations; returns advisory warnings
  /// (alpha outside [4/3, 2], large dt relative to the explicit-advection
  /// heuristic).
  std::vector<std::string> validate() const;
  std::size_t steps() const;
};

/// dt <= min(0.1, 0.5 / (nu K^alpha)).
double suggested_dt(double nu, int K, double alpha);

struct EnergyRecord {
  double t = 0.0;
  double h1_sq = 0.0;         // |u|^2_{H^1}
  double h1a2_sq = 0.0;       // |u|^2_{H^{1+alpha/2}}
  double trilinear_residual = 0.0;  // <B(u), u>_{H^1}
};

struct Trajectory {
  FieldKind kind = FieldKind::DivFreeVector;
  std::vector<double> times;           // times of recorded states
  std::vector<SpectralField> states;   // recorded states
  std::vector<EnergyRecord> energy_log;  // one record per step, plus t = 0

  const SpectralField& final_state() const { return states.back(); }
};

/// Piecewise-constant control on a uniform partition of [0, T].
struct ControlPath {
  std::vector<double> times;          // n + 1 partition points
  std::vector<SpectralField> values;  // n interval values (H_0 elements)

  static ControlPath zero(const GridPtr& grid, double T, std::size_t intervals);
  const SpectralField& at(double t) const;
  void validate() const;
};

/// Noise driver. The Brownian path is defined on a fine lattice of spacing
/// dt / fine_per_step; each step consumes fine_per_step consecutive fine
/// increments. Runs that share (seed, stream) and dt / fine_per_step see the
/// same path.
struct NoiseDriver {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t fine_per_step = 1;
};

struct NoDriver {};

using Driver = std::variant<NoDriver, NoiseDriver, ControlPath>;

struct IntegrateOptions {
  /// Store every n-th state (the initial and final states are always kept).
  /// Zero keeps only those two.
  std::size_t record_every = 1;
  /// Fill Trajectory::energy_log. The trilinear residual costs one extra
  /// product per step; Monte Carlo callers switch this off.
  bool energy_log = true;
  /// Called after every step with (step index, time, state).
  std::function<void(std::size_t, double, const SpectralField&)> observer;
};

/// Raised by the integrators; carries the trajectory up to the last finite
/// state.
class IntegrationBlowUp : public BlowUp {
 public:
  IntegrationBlowUp(const BlowUp& cause, Trajectory partial)
      : BlowUp(cause), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// One step of the stochastic equation with the given Brownian increment.
/// `step` is the index reported on blow-up.
SpectralField step_stochastic(const SpectralField& u, double t, const SimParams& p, const CovarianceSpec& q,
                              const DiffusionSpec& g, const NoiseIncrement& dw, std::size_t step = 0);

/// One step of the controlled (skeleton) equation with forcing G(t,u) v_t.
SpectralField step_skeleton(const SpectralField& u, double t, const SimParams& p, const CovarianceSpec& q,
                            const DiffusionSpec& g, const SpectralField& v_t, std::size_t step = 0);

Trajectory integrate(const SpectralField& u0, const SimParams& p, const CovarianceSpec& q, const DiffusionSpec& g,
                     const Driver& driver, const IntegrateOptions& opt = {});

/// Vorticity form: d theta = (-A_alpha theta + u . grad theta) dt + curl G(R theta) dW,
/// u = biot_savart(theta). Noise and control are the velocity-space objects
/// used by `integrate`, mapped through curl. The energy log reports the
/// velocity quantities (|u|_{H^1} = |theta|_{L^2}).
Trajectory integrate_vorticity(const SpectralField& theta0, const SimParams& p, const CovarianceSpec& q,
                               const DiffusionSpec& g, const Driver& driver, const IntegrateOptions& opt = {});

/// Discrete energy balance |u(T)|^2_{H^1} + 2 nu sum_n dt |u_n|^2_{H^{1+a/2}}
/// (right-endpoint rule) against |u_0|^2_{H^1}.
struct EnergyBalance {
  double initial = 0.0;
  double final = 0.0;
  double dissipation = 0.0;
  double lhs() const { return final + dissipation; }
};

EnergyBalance energy_balance(const Trajectory& traj, const SimParams& p);

/// Initial data presets: "zero", "single_mode", "single_mode(k1,k2)",
/// "two_mode", "random_smooth(rho)".
SpectralField initial_preset(const std::string& preset, const GridPtr& grid, double amplitude, std::uint64_t seed);

/// CSV with header "t,H1_norm_sq,H1a2_norm_sq,trilinear_residual".
void write_energy_csv(std::ostream& os, const Trajectory& traj);

}  // namespace fsns
