#include "fsns/checks.hpp"

#include <algorithm>
#include <cmath>

#include "fsns/errors.hpp"
#include "fsns/estimates.hpp"
#include "fsns/fourier_transform.hpp"
#include "fsns/operators.hpp"
#include "fsns/random.hpp"
#include "fsns/stochastic.hpp"

namespace fsns {

namespace {

constexpr double kRho[] = {1.5, 2.0, 3.0};

// Tracks the worst relative error of one identity over many samples.
struct Worst {
  std::string name;
  double tol;
  double worst = 0.0;
  void add(double err) { worst = std::max(worst, std::isfinite(err) ? err : HUGE_VAL); }
  CheckItem item(std::size_t samples) const {
    return {name, worst <= tol, {{"max_relative_error", worst}, {"tolerance", tol}, {"samples", samples}}};
  }
};

double inner_components(const SpectralField& a1, const SpectralField& a2, const SpectralField& b1,
                        const SpectralField& b2) {
  return sobolev_inner(a1, b1, {0.0}) + sobolev_inner(a2, b2, {0.0});
}

CheckOutcome identities(const Config& cfg, std::uint64_t seed) {
  const auto grid = make_grid(static_cast<int>(cfg.get_int("check.K", 16)));
  const auto n = static_cast<std::size_t>(cfg.get_int("check.fields", 100));
  Worst idem{"helmholtz_idempotent", 1e-12}, adj{"helmholtz_self_adjoint", 1e-12};
  Worst cbs{"curl_biot_savart_inverse", 1e-12}, comm{"curl_commutes_dissipation", 1e-12};
  Worst div{"products_divergence_free", 1e-12}, mean{"products_zero_mean", 1e-12};
  Worst l2{"trilinear_l2_cancellation", 1e-10}, h1{"trilinear_h1_cancellation", 1e-10};

  for (std::size_t t = 0; t < n; ++t) {
    RandomStream rng(seed, stream_id(StreamFamily::Test, t));
    const double rho = kRho[t % 3];
    auto scalar = [&] { return random_field(grid, FieldKind::Scalar, rho, rng); };
    auto vector = [&] { return random_field(grid, FieldKind::DivFreeVector, rho, rng); };

    const auto v1 = scalar(), v2 = scalar(), w1 = scalar(), w2 = scalar();
    const auto pv = helmholtz_project(v1, v2);
    const auto [p1, p2] = vector_components(pv);
    idem.add(relative_difference(helmholtz_project(p1, p2), pv));
    const auto [q1, q2] = vector_components(helmholtz_project(w1, w2));
    const double lhs = inner_components(p1, p2, w1, w2);
    const double rhs = inner_components(v1, v2, q1, q2);
    const double scale = std::hypot(sobolev_norm(v1, {0}), sobolev_norm(v2, {0})) *
                         std::hypot(sobolev_norm(w1, {0}), sobolev_norm(w2, {0}));
    adj.add(std::abs(lhs - rhs) / scale);

    const auto theta = scalar();
    const auto u = vector(), v = vector();
    cbs.add(relative_difference(curl(biot_savart(theta)), theta));
    cbs.add(relative_difference(biot_savart(curl(u)), u));
    for (double a : {4.0 / 3.0, 1.5, 2.0}) {
      comm.add(relative_difference(curl(fractional_laplacian(u, a)), fractional_laplacian(curl(u), a)));
    }

    const auto b = bilinear_B(u, v);
    const auto [b1, b2] = vector_components(b);
    double dmax = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Mode& k = grid->mode(i);
      dmax = std::max(dmax, std::abs(static_cast<double>(k.k1) * b1[i] + static_cast<double>(k.k2) * b2[i]));
    }
    const double bscale = std::max(sobolev_norm(b, {1.0}), 1e-300);
    div.add(dmax / bscale);
    const auto phys = to_physical(b, grid->product_grid_size());
    for (const auto& comp : phys.components) {
      double s = 0.0, s2 = 0.0;
      for (double x : comp) {
        s += x;
        s2 += x * x;
      }
      mean.add(std::abs(s) / std::max(std::sqrt(s2 * static_cast<double>(comp.size())), 1e-300));
    }

    l2.add(std::abs(trilinear_b(u, v, v, Pairing::L2)) / (sobolev_norm(b, {0}) * sobolev_norm(v, {0})));
    const auto bu = convection(u);
    h1.add(std::abs(sobolev_inner(bu, u, {1.0})) / (sobolev_norm(bu, {1.0}) * sobolev_norm(u, {1.0})));
  }

  CheckOutcome out{"identities", true, {}};
  for (const Worst* w : {&idem, &adj, &cbs, &comm, &div, &mean, &l2, &h1}) out.items.push_back(w->item(n));
  return out;
}

CheckOutcome noise(const Config& cfg, std::uint64_t seed) {
  const auto grid = make_grid(static_cast<int>(cfg.get_int("check.K", 16)));
  const CovarianceSpec q(cfg.get_double("covariance.decay_s", 2.0), cfg.get_double("covariance.c0", 1.0));
  DiffusionSpec g;
  g.family = diffusion_family_from_string(cfg.get_string("diffusion.family", "diagonal_multiplicative"));
  g.c1 = cfg.get_double("diffusion.c1", 1.0);
  g.c2 = cfg.get_double("diffusion.c2", 0.5);
  g.c3 = cfg.get_double("diffusion.c3", 0.5);
  g.gamma = cfg.get_double("diffusion.gamma", 0.5);
  g.saturation = cfg.get_double("diffusion.saturation", 1.0);
  const double T = cfg.get_double("sim.T", 1.0);
  const auto n = static_cast<std::size_t>(cfg.get_int("check.fields", 100));
  const auto samples = static_cast<std::size_t>(cfg.get_int("check.samples", 4000));
  const auto c = diffusion_constants(g, q, *grid, T);

  double lip = 0.0, grow = 0.0, hold = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    RandomStream rng(seed, stream_id(StreamFamily::Test, (1ULL << 40) | t));
    const double rho = kRho[t % 3];
    const double amp = std::exp(4.0 * (rng.uniform() - 0.5));
    const auto u = amp * random_field(grid, FieldKind::DivFreeVector, rho, rng);
    const auto v = amp * random_field(grid, FieldKind::DivFreeVector, rho, rng);
    const double s = T * rng.uniform(), r = T * rng.uniform();
    const double hs = std::sqrt(q.trace(*grid));
    const double dlip = std::abs(g.gain(s, u) - g.gain(s, v)) * hs;
    if (c.lipschitz > 0 || dlip > 0) lip = std::max(lip, dlip / (c.lipschitz * sobolev_norm(u - v, {1.0})));
    grow = std::max(grow, lq_norm(q, g, s, u) / (c.growth * (1.0 + sobolev_norm(u, {1.0}))));
    const double dh = std::abs(g.gain(s, u) - g.gain(r, u)) * hs;
    if (dh > 0) hold = std::max(hold, dh / (c.holder * (1.0 + sobolev_norm(u, {1.0})) * std::pow(std::abs(s - r), g.gamma)));
  }
  const double slack = 1.0 + 1e-12;

  const double dt = 0.01;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t j = 0; j < samples; ++j) {
    const auto dw = wiener_increment(sample_increment(*grid, dt, seed, stream_id(StreamFamily::Test, 2ULL << 40), j),
                                     q, grid);
    const double e = sobolev_norm_sq(dw, {1.0}) / dt;
    sum += e;
    sum2 += e * e;
  }
  const double m = sum / static_cast<double>(samples);
  const double sd = std::sqrt(std::max(0.0, sum2 / static_cast<double>(samples) - m * m) / static_cast<double>(samples));
  const double z = std::abs(m - q.trace(*grid)) / sd;

  double cm = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    std::vector<Complex> half(grid->size());
    half[i] = std::sqrt(0.5 * q.eigenvalue(*grid, i)) / grid->magnitude(i);
    cm = std::max(cm, std::abs(h0_norm(q, SpectralField(grid, FieldKind::DivFreeVector, half)) - 1.0));
  }

  CheckOutcome out{"noise", true, {}};
  out.items.push_back({"C1_lipschitz", lip <= slack, {{"max_ratio", lip}, {"constant", c.lipschitz}}});
  out.items.push_back({"C2_linear_growth", grow <= slack, {{"max_ratio", grow}, {"constant", c.growth}}});
  out.items.push_back({"C3_time_holder", hold <= slack, {{"max_ratio", hold}, {"constant", c.holder}}});
  out.items.push_back({"noise_trace", z <= 5.0,
                       {{"mean_h1_sq_over_dt", m}, {"trace", q.trace(*grid)}, {"z_score", z}, {"samples", samples}}});
  out.items.push_back({"cameron_martin_unit_basis", cm <= 1e-12, {{"max_abs_error", cm}}});
  return out;
}

struct Case {
  EstimateName name;
  double alpha;
  double eta;
};

std::vector<Case> estimate_cases(const Config& cfg) {
  const bool explicit_cases = cfg.has("check.estimates") || cfg.has("check.alpha") || cfg.has("check.eta");
  const std::vector<double> alphas = cfg.get_double_list("check.alpha", {4.0 / 3.0, 1.5, 2.0});
  std::vector<Case> out;
  if (!explicit_cases) {
    for (double a : alphas) {
      for (double eta : {0.0, 1.0}) {
        if (is_admissible(a, eta)) out.push_back({EstimateName::BilinearDual, a, eta});
      }
      out.push_back({EstimateName::BilinearShifted, a, 1.0});
      out.push_back({EstimateName::Interpolation, a, 1.0});
      out.push_back({EstimateName::TrilinearH1, a, 1.0});
    }
    return out;
  }
  const auto names = cfg.get_string_list("check.estimates", {"bilinear_dual"});
  const auto etas = cfg.get_double_list("check.eta", {0.0});
  for (const auto& n : names) {
    const EstimateName e = estimate_from_string(n);
    for (double a : alphas) {
      for (double eta : etas) {
        require_admissible(e, a, eta);
        out.push_back({e, a, eta});
      }
    }
  }
  return out;
}

CheckOutcome estimates(const Config& cfg, std::uint64_t seed, int threads) {
  CertifyOptions opt;
  opt.trials = static_cast<std::size_t>(cfg.get_int("check.trials", 200));
  opt.seed = seed;
  opt.threads = threads;
  opt.grid_ladder.clear();
  for (double k : cfg.get_double_list("check.ladder", {8, 16, 32})) opt.grid_ladder.push_back(static_cast<int>(k));
  opt.max_growth_per_doubling = cfg.get_double("check.max_growth", opt.max_growth_per_doubling);
  const auto cases = estimate_cases(cfg);  // validates before any work

  CheckOutcome out{"estimates", true, {}};
  for (const auto& c : cases) {
    const auto report = certify_estimate(c.name, c.alpha, c.eta, opt);
    char label[96];
    std::snprintf(label, sizeof label, "%s(alpha=%.6g,eta=%.6g)", to_string(c.name).c_str(), c.alpha, c.eta);
    out.items.push_back({label, !report.violated, to_json(report)});
  }
  return out;
}

}  // namespace

CheckOutcome run_check_suite(const std::string& suite, const Config& cfg, std::uint64_t seed, int threads) {
  CheckOutcome out;
  if (suite == "identities") {
    out = identities(cfg, seed);
  } else if (suite == "noise") {
    out = noise(cfg, seed);
  } else if (suite == "estimates") {
    out = estimates(cfg, seed, threads);
  } else {
    throw ConfigError("unknown check suite '" + suite + "' (expected estimates, identities or noise)");
  }
  out.pass = std::all_of(out.items.begin(), out.items.end(), [](const CheckItem& i) { return i.pass; });
  return out;
}

nlohmann::json to_json(const CheckOutcome& c) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& i : c.items) items.push_back({{"name", i.name}, {"pass", i.pass}, {"detail", i.detail}});
  return {{"suite", c.suite}, {"pass", c.pass}, {"items", items}};
}

void validate_check_report(const nlohmann::json& j) {
  auto fail = [](const std::string& what) { throw FormatError("check report: " + what); };
  if (!j.is_object()) fail("not an object");
  if (!j.contains("suite") || !j["suite"].is_string()) fail("missing string 'suite'");
  if (!j.contains("pass") || !j["pass"].is_boolean()) fail("missing boolean 'pass'");
  if (!j.contains("items") || !j["items"].is_array() || j["items"].empty()) fail("missing non-empty 'items'");
  bool all = true;
  for (const auto& it : j["items"]) {
    if (!it.is_object() || !it.contains("name") || !it["name"].is_string()) fail("item without 'name'");
    if (!it.contains("pass") || !it["pass"].is_boolean()) fail("item without boolean 'pass'");
    if (!it.contains("detail") || !it["detail"].is_object()) fail("item without object 'detail'");
    all = all && it["pass"].get<bool>();
  }
  if (all != j["pass"].get<bool>()) fail("'pass' disagrees with the items");
}

}  // namespace fsns
