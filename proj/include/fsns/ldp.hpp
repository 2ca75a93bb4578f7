#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fsns/dynamics.hpp"

namespace fsns {

/// {u : |u(T) - center|_{H^s} <= radius} or, with `outside`, its complement
/// (closed: >= radius).
struct EndpointBall {
  SpectralField center;
  double radius = 1.0;
  SobolevExponent norm{1.0};
  bool outside = false;
};

/// {u : sup_t |u(t)|_{H^s} >= level}.
struct SupExceed {
  double level = 1.0;
  SobolevExponent norm{1.0};
};

struct TargetSet {
  std::variant<SupExceed, EndpointBall> kind;
  std::string description;

  void validate() const;
  /// Same set with the boundary moved by `delta` in the target norm: positive
  /// delta enlarges the set.
  TargetSet inflated(double delta) const;
};

/// Tracks the trajectory functional a target depends on. Feed it every state
/// (including the initial one) in time order.
class TargetMonitor {
 public:
  explicit TargetMonitor(const TargetSet& target) : target_(&target) {}

  void observe(const SpectralField& u);
  /// Signed distance to the set boundary in the target norm; <= 0 inside.
  double signed_distance() const;
  double violation() const { return std::max(0.0, signed_distance()); }
  bool hit() const { return signed_distance() <= 0.0; }

 private:
  const TargetSet* target_;
  std::optional<SpectralField> last_;
  double sup_ = 0.0;
};

double target_violation(const TargetSet& target, const Trajectory& traj);

/// 1/2 sum_i dt_i |v_i|^2_{H_0}.
double control_energy(const ControlPath& v, const CovarianceSpec& q);

/// g^0(int v ds): the controlled trajectory.
Trajectory skeleton_map(const ControlPath& v, const SpectralField& u0, const SimParams& p, const CovarianceSpec& q,
                        const DiffusionSpec& g, const IntegrateOptions& opt = {});

struct OptimizerConfig {
  std::size_t control_intervals = 20;
  std::size_t control_modes = 8;  // lowest-|k| Stokes modes
  int rounds = 5;
  double mu0 = 10.0;
  double mu_factor = 10.0;
  double feasibility_tol = 1e-3;
  std::size_t max_iterations = 200;  // per round
  double gradient_tol = 1e-7;
  double fd_step = 1e-6;
  int threads = 1;
};

struct RateResult {
  double energy = 0.0;
  ControlPath control;
  double terminal_residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Minimum control energy over the reduced control family such that the
/// skeleton trajectory reaches the target. Not finding a feasible control is
/// reported through converged = false (stand-in for I = infinity).
RateResult minimize_rate(const TargetSet& target, const SpectralField& u0, const SimParams& p,
                         const CovarianceSpec& q, const DiffusionSpec& g, const OptimizerConfig& opt);

nlohmann::json rate_summary_json(const RateResult& r);

struct LdpPoint {
  double epsilon = 0.0;
  std::size_t samples = 0;
  std::size_t hits = 0;
  double p_hat = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  std::optional<double> eps_log_p;  // unset when no hits occurred
  double half_width = 0.0;          // of eps * log P on the Wilson interval
  bool zero_hits = false;
};

nlohmann::json to_json(const LdpPoint& pt);
LdpPoint ldp_point_from_json(const nlohmann::json& j);

/// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z = 1.959963984540054);

/// Plain Monte Carlo estimate for one epsilon. Sample j uses the noise stream
/// stream_id(Trajectory, j), so the rungs of a ladder share their noise.
LdpPoint estimate_ldp_point(const TargetSet& target, const SpectralField& u0, const SimParams& p,
                            const CovarianceSpec& q, const DiffusionSpec& g, double epsilon, std::size_t n_samples,
                            std::uint64_t seed, int threads = 1);

std::vector<LdpPoint> estimate_ldp_curve(const TargetSet& target, const SpectralField& u0, const SimParams& p,
                                         const CovarianceSpec& q, const DiffusionSpec& g,
                                         const std::vector<double>& epsilons, std::size_t n_samples,
                                         std::uint64_t seed, int threads = 1);

/// Extrapolates eps * log P to eps -> 0 by fitting c0 + c1 eps + c2 eps log eps
/// (fewer terms when fewer points carry hits). Returns nothing when no rung
/// has hits.
std::optional<double> extrapolate_slope(const std::vector<LdpPoint>& curve);

struct SanityOptions {
  double tolerance = 0.2;       // relative, around -I
  double absolute_floor = 0.01;  // added to the band half-width
};

struct SanityReport {
  std::optional<double> rate;           // I(F); unset = infinity
  std::optional<double> rate_interior;  // I over the shrunken set
  std::optional<double> rate_closure;   // I over the enlarged set
  std::vector<LdpPoint> curve;
  std::optional<double> extrapolated;
  double band_low = 0.0;
  double band_high = 0.0;
  double tolerance = 0.2;
  double absolute_floor = 0.01;
  bool pass = false;
  std::string verdict;  // "PASS" or "FAIL"
  std::string note;
};

/// PASS when the extrapolated eps log P lies in
/// [-I_int (1 + tol) - floor, -I_clo (1 - tol) + floor].
SanityReport ldp_sanity_report(const std::optional<double>& rate, const std::optional<double>& rate_interior,
                               const std::optional<double>& rate_closure, const std::vector<LdpPoint>& curve,
                               const SanityOptions& opt);

nlohmann::json to_json(const SanityReport& r);
SanityReport sanity_report_from_json(const nlohmann::json& j);

}  // namespace fsns
