#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fsns {

/// Inequalities that can be certified numerically.
enum class EstimateName {
  /// |B(u,v)|_{H^{eta-a/2}} <= c |u|_{H^{eta+a/2}} |v|_{H^{eta+a/2}}
  BilinearDual,
  /// |B(u,v)|_{H^{eta-a/2}} <= c |u|_{H^{eta+1-a/2}} |v|_{H^{eta+1-a/2}}, eta >= 1
  BilinearShifted,
  /// |v|^2_{H^{1+a/4}} <= |v|_{H^1} |v|_{H^{1+a/2}}, constant exactly 1
  Interpolation,
  /// |<B(v1,v2),v3>_{H^1}| <= c |v3|_{H^{1+a/2}} |v1|_{H^{2-a/2}} |v2|_{H^{2-a/2}}
  TrilinearH1,
};

std::string to_string(EstimateName name);
EstimateName estimate_from_string(const std::string& name);

/// Lower end alpha(eta) of the admissible dissipation range for the
/// bilinear bound: max{(4 - 2 eta)/3, 2 eta} on [0, 1) and 1 for eta >= 1.
double critical_alpha(double eta);

/// alpha in [alpha(eta), 2], except for eta in [1/2, 1) where the lower end
/// is excluded.
bool is_admissible(double alpha, double eta);

/// Throws InadmissibleParameters naming the bound when (alpha, eta) is not
/// admissible for the given inequality.
void require_admissible(EstimateName name, double alpha, double eta);

struct EstimateReport {
  std::string name;
  double alpha = 0.0;
  double eta = 0.0;
  std::size_t trials = 0;  // per grid
  std::vector<int> grid_sizes;
  std::vector<double> max_ratio_per_grid;
  std::vector<double> growth_per_doubling;
  double max_ratio = 0.0;
  std::optional<double> constant_bound;  // set when the constant is known exactly
  bool violated = false;
};

nlohmann::json to_json(const EstimateReport& r);
EstimateReport estimate_report_from_json(const nlohmann::json& j);

struct CertifyOptions {
  std::size_t trials = 200;
  std::vector<int> grid_ladder{8, 16, 32};
  std::uint64_t seed = 1;
  int threads = 1;
  /// Allowed growth of the per-grid maximum ratio per doubling of K.
  double max_growth_per_doubling = 1.25;
};

/// Samples random fields on each grid of the ladder and records the largest
/// LHS/RHS ratio of the named inequality. Violation is flagged when the
/// maximum grows faster than the allowed rate under refinement, or when an
/// exactly known constant is exceeded.
EstimateReport certify_estimate(EstimateName name, double alpha, double eta, const CertifyOptions& opt);

/// LHS/RHS for one sample; exposed for tests.
double estimate_ratio(EstimateName name, double alpha, double eta, int K, std::uint64_t seed,
                      std::uint64_t trial);

}  // namespace fsns
