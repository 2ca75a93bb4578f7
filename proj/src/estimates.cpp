#include "fsns/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fsns/errors.hpp"
#include "fsns/operators.hpp"
#include "fsns/parallel.hpp"
#include "fsns/random.hpp"

namespace fsns {

namespace {

constexpr double kRoughness[] = {1.5, 2.0, 3.0};

std::string format_bound(double alpha, double eta) {
  std::ostringstream os;
  os.precision(6);
  os << "alpha=" << alpha << " eta=" << eta << " requires alpha in ";
  const bool open = eta >= 0.5 && eta < 1.0;
  os << (open ? "(" : "[") << critical_alpha(eta) << ", 2" << (open ? ")" : "]");
  return os.str();
}

double sample_ratio(EstimateName name, double alpha, double eta, const GridPtr& grid, std::uint64_t seed,
                    std::uint64_t stream) {
  RandomStream rng(seed, stream);
  const double rho = kRoughness[std::min<std::size_t>(2, static_cast<std::size_t>(3.0 * rng.uniform()))];
  std::uint32_t field = 0;
  auto draw = [&] { return random_field_at(grid, FieldKind::DivFreeVector, rho, seed, stream, field++); };

  switch (name) {
    case EstimateName::BilinearDual: {
      const auto u = draw();
      const auto v = draw();
      const double lhs = sobolev_norm(bilinear_B(u, v), {eta - alpha / 2});
      return lhs / (sobolev_norm(u, {eta + alpha / 2}) * sobolev_norm(v, {eta + alpha / 2}));
    }
    case EstimateName::BilinearShifted: {
      const auto u = draw();
      const auto v = draw();
      const double lhs = sobolev_norm(bilinear_B(u, v), {eta - alpha / 2});
      const SobolevExponent s{eta + 1.0 - alpha / 2};
      return lhs / (sobolev_norm(u, s) * sobolev_norm(v, s));
    }
    case EstimateName::Interpolation: {
      const auto v = draw();
      return sobolev_norm_sq(v, {1.0 + alpha / 4}) / (sobolev_norm(v, {1.0}) * sobolev_norm(v, {1.0 + alpha / 2}));
    }
    case EstimateName::TrilinearH1: {
      const auto v1 = draw();
      const auto v2 = draw();
      const auto v3 = draw();
      const double lhs = std::abs(trilinear_b(v1, v2, v3, Pairing::H1));
      const SobolevExponent s{2.0 - alpha / 2};
      return lhs / (sobolev_norm(v3, {1.0 + alpha / 2}) * sobolev_norm(v1, s) * sobolev_norm(v2, s));
    }
  }
  return 0.0;
}

}  // namespace

std::string to_string(EstimateName name) {
  switch (name) {
    case EstimateName::BilinearDual: return "bilinear_dual";
    case EstimateName::BilinearShifted: return "bilinear_shifted";
    case EstimateName::Interpolation: return "interpolation";
    case EstimateName::TrilinearH1: return "trilinear_h1";
  }
  return "unknown";
}

EstimateName estimate_from_string(const std::string& name) {
  for (auto e : {EstimateName::BilinearDual, EstimateName::BilinearShifted, EstimateName::Interpolation,
                 EstimateName::TrilinearH1}) {
    if (to_string(e) == name) return e;
  }
  throw DomainError("unknown estimate '" + name +
                    "' (expected bilinear_dual, bilinear_shifted, interpolation or trilinear_h1)");
}

double critical_alpha(double eta) {
  if (eta >= 1.0) return 1.0;
  return std::max((4.0 - 2.0 * eta) / 3.0, 2.0 * eta);
}

bool is_admissible(double alpha, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(alpha)) return false;
  const double lo = critical_alpha(eta);
  if (eta >= 0.5 && eta < 1.0) return alpha > lo && alpha < 2.0;
  // Exact comparison against 4/3 would reject the literal 1.3333333333333333.
  return alpha >= lo - 1e-12 && alpha <= 2.0;
}

void require_admissible(EstimateName name, double alpha, double eta) {
  switch (name) {
    case EstimateName::BilinearDual:
      if (!is_admissible(alpha, eta)) throw InadmissibleParameters(to_string(name) + ": " + format_bound(alpha, eta));
      return;
    case EstimateName::BilinearShifted:
      if (eta < 1.0) {
        throw InadmissibleParameters(to_string(name) + ": requires eta >= 1, got eta=" + std::to_string(eta));
      }
      if (!is_admissible(alpha, eta)) throw InadmissibleParameters(to_string(name) + ": " + format_bound(alpha, eta));
      return;
    case EstimateName::Interpolation:
      if (!(alpha > 0.0 && alpha <= 2.0)) {
        throw InadmissibleParameters(to_string(name) + ": requires alpha in (0, 2], got " + std::to_string(alpha));
      }
      return;
    case EstimateName::TrilinearH1:
      if (!(alpha >= 4.0 / 3.0 - 1e-12 && alpha <= 2.0)) {
        throw InadmissibleParameters(to_string(name) + ": requires alpha in [4/3, 2], got " + std::to_string(alpha));
      }
      return;
  }
}

double estimate_ratio(EstimateName name, double alpha, double eta, int K, std::uint64_t seed, std::uint64_t trial) {
  require_admissible(name, alpha, eta);
  return sample_ratio(name, alpha, eta, make_grid(K), seed, stream_id(StreamFamily::Certification, trial));
}

EstimateReport certify_estimate(EstimateName name, double alpha, double eta, const CertifyOptions& opt) {
  require_admissible(name, alpha, eta);
  if (opt.grid_ladder.empty()) throw DomainError("certify_estimate: empty grid ladder");
  if (opt.trials == 0) throw DomainError("certify_estimate: trials must be positive");

  EstimateReport report;
  report.name = to_string(name);
  report.alpha = alpha;
  report.eta = eta;
  report.trials = opt.trials;
  report.grid_sizes = opt.grid_ladder;
  if (name == EstimateName::Interpolation) report.constant_bound = 1.0;

  for (std::size_t g = 0; g < opt.grid_ladder.size(); ++g) {
    const auto grid = make_grid(opt.grid_ladder[g]);
    std::vector<double> ratios(opt.trials);
    parallel_for(opt.trials, opt.threads, [&](std::size_t t) {
      // Trial t sees the same random coefficients on every grid of the ladder.
      ratios[t] = sample_ratio(name, alpha, eta, grid, opt.seed, stream_id(StreamFamily::Certification, t));
    });
    report.max_ratio_per_grid.push_back(*std::max_element(ratios.begin(), ratios.end()));
  }
  report.max_ratio = *std::max_element(report.max_ratio_per_grid.begin(), report.max_ratio_per_grid.end());

  for (std::size_t g = 1; g < opt.grid_ladder.size(); ++g) {
    const double doublings = std::log2(static_cast<double>(opt.grid_ladder[g]) / opt.grid_ladder[g - 1]);
    const double ratio = report.max_ratio_per_grid[g] / report.max_ratio_per_grid[g - 1];
    const double growth = doublings > 0 ? std::pow(ratio, 1.0 / doublings) : ratio;
    report.growth_per_doubling.push_back(growth);
    if (!(growth <= opt.max_growth_per_doubling)) report.violated = true;
  }
  if (report.constant_bound && !(report.max_ratio <= *report.constant_bound * (1.0 + 1e-12))) {
    report.violated = true;
  }
  if (!std::isfinite(report.max_ratio)) report.violated = true;
  return report;
}

nlohmann::json to_json(const EstimateReport& r) {
  nlohmann::json j{{"name", r.name},
                   {"alpha", r.alpha},
                   {"eta", r.eta},
                   {"trials", r.trials},
                   {"grid_sizes", r.grid_sizes},
                   {"max_ratio_per_grid", r.max_ratio_per_grid},
                   {"growth_per_doubling", r.growth_per_doubling},
                   {"max_ratio", r.max_ratio},
                   {"violated", r.violated}};
  j["constant_bound"] = r.constant_bound ? nlohmann::json(*r.constant_bound) : nlohmann::json(nullptr);
  return j;
}

EstimateReport estimate_report_from_json(const nlohmann::json& j) {
  try {
    EstimateReport r;
    r.name = j.at("name").get<std::string>();
    r.alpha = j.at("alpha").get<double>();
    r.eta = j.at("eta").get<double>();
    r.trials = j.at("trials").get<std::size_t>();
    r.grid_sizes = j.at("grid_sizes").get<std::vector<int>>();
    r.max_ratio_per_grid = j.at("max_ratio_per_grid").get<std::vector<double>>();
    r.growth_per_doubling = j.at("growth_per_doubling").get<std::vector<double>>();
    r.max_ratio = j.at("max_ratio").get<double>();
    r.violated = j.at("violated").get<bool>();
    if (j.contains("constant_bound") && !j["constant_bound"].is_null()) {
      r.constant_bound = j["constant_bound"].get<double>();
    }
    if (r.grid_sizes.size() != r.max_ratio_per_grid.size()) {
      throw FormatError("estimate report: grid_sizes and max_ratio_per_grid differ in length");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("estimate report: ") + e.what());
  }
}

}  // namespace fsns
