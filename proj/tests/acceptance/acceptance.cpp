// Acceptance criteria: one pass/fail line per criterion. Tolerances, sizes
// and runtime budgets are pinned below.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../common/convolution_oracle.hpp"
#include "../common/ou_oracle.hpp"
#include "fsns/dynamics.hpp"
#include "fsns/estimates.hpp"
#include "fsns/ldp.hpp"
#include "fsns/manifest.hpp"
#include "fsns/operators.hpp"
#include "fsns/random.hpp"

using namespace fsns;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr std::uint64_t kSeed = 20240601;

SpectralField draw(const GridPtr& g, FieldKind kind, std::uint64_t i, double rho = 2.0) {
  return random_field_at(g, kind, rho, kSeed, stream_id(StreamFamily::Test, i), 0);
}

/// Largest |k . u_vec(k)| / |u_vec(k)| over active modes, plus the zero mode.
double divergence_defect(const SpectralField& u) {
  double worst = std::abs(u.at({0, 0}));
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Mode k = u.grid().mode(i);
    const auto c = u.vector_coefficient(k);
    const double d = std::abs(static_cast<double>(k.k1) * c[0] + static_cast<double>(k.k2) * c[1]);
    const double s = std::hypot(std::abs(c[0]), std::abs(c[1])) * k.magnitude();
    if (s > 0) worst = std::max(worst, d / s);
  }
  return worst;
}

// 1. Structural identities.
Outcome structural_identities() {
  constexpr double kTol = 1e-12;
  constexpr int kK = 16;
  constexpr int kFields = 100;
  const auto g = make_grid(kK);
  double worst = 0.0;
  for (int t = 0; t < kFields; ++t) {
    const auto v1 = draw(g, FieldKind::Scalar, 6 * t);
    const auto v2 = draw(g, FieldKind::Scalar, 6 * t + 1);
    const auto w1 = draw(g, FieldKind::Scalar, 6 * t + 2);
    const auto w2 = draw(g, FieldKind::Scalar, 6 * t + 3);
    const auto u = draw(g, FieldKind::DivFreeVector, 6 * t + 4);
    const auto th = draw(g, FieldKind::Scalar, 6 * t + 5);

    const auto pv = helmholtz_project(v1, v2);
    const auto [p1, p2] = vector_components(pv);
    worst = std::max(worst, relative_difference(helmholtz_project(p1, p2), pv));

    const auto [q1, q2] = vector_components(helmholtz_project(w1, w2));
    const double lhs = sobolev_inner(p1, w1, {0}) + sobolev_inner(p2, w2, {0});
    const double rhs = sobolev_inner(v1, q1, {0}) + sobolev_inner(v2, q2, {0});
    const double scale = std::hypot(sobolev_norm(v1, {0}), sobolev_norm(v2, {0})) *
                         std::hypot(sobolev_norm(w1, {0}), sobolev_norm(w2, {0}));
    worst = std::max(worst, std::abs(lhs - rhs) / scale);

    worst = std::max(worst, relative_difference(curl(biot_savart(th)), th));
    for (double a : {4.0 / 3.0, 1.5, 2.0}) {
      worst = std::max(worst, relative_difference(curl(fractional_laplacian(u, a)), fractional_laplacian(curl(u), a)));
      worst = std::max(worst, divergence_defect(fractional_laplacian(u, a)));
    }
    for (const auto& f : {pv, convection(u), bilinear_B(u, pv), biot_savart(th), u + pv, 2.5 * u}) {
      worst = std::max(worst, divergence_defect(f));
    }
    worst = std::max(worst, std::abs(advect_scalar(u, th).at({0, 0})));
    worst = std::max(worst, std::abs(curl(u).at({0, 0})));
  }
  return {worst <= kTol, fmt("max relative defect %.3e (tol %.0e), K=%d, %d fields", worst, kTol, kK, kFields)};
}

// 2. Trilinear cancellations.
Outcome trilinear_cancellations() {
  constexpr double kTol = 1e-10;
  constexpr int kFields = 100;
  double worst_l2 = 0.0, worst_h1 = 0.0;
  for (int K : {8, 16, 32}) {
    const auto g = make_grid(K);
    for (int t = 0; t < kFields; ++t) {
      const auto u = draw(g, FieldKind::DivFreeVector, 2 * t, 1.5);
      const auto v = draw(g, FieldKind::DivFreeVector, 2 * t + 1, 1.5);
      const auto buv = bilinear_B(u, v);
      const double s_l2 = sobolev_norm(buv, {0}) * sobolev_norm(v, {0});
      worst_l2 = std::max(worst_l2, std::abs(sobolev_inner(buv, v, {0})) / s_l2);
      const auto bu = convection(u);
      const double s_h1 = sobolev_norm(bu, {1}) * sobolev_norm(u, {1});
      worst_h1 = std::max(worst_h1, std::abs(sobolev_inner(bu, u, {1})) / s_h1);
    }
  }
  return {worst_l2 <= kTol && worst_h1 <= kTol,
          fmt("max |b(u,v,v)| %.3e, max |<B(u),u>_H1| %.3e relative (tol %.0e), K in {8,16,32}", worst_l2, worst_h1,
              kTol)};
}

// 3. Convolution oracle.
Outcome convolution_equivalence() {
  constexpr double kTol = 1e-10;
  double worst = 0.0;
  for (int K : {1, 2, 4, 6, 8}) {
    const auto g = make_grid(K);
    for (int t = 0; t < 4; ++t) {
      const auto u = draw(g, FieldKind::DivFreeVector, 3 * t, 1.0);
      const auto v = draw(g, FieldKind::DivFreeVector, 3 * t + 1, 1.0);
      const auto th = draw(g, FieldKind::Scalar, 3 * t + 2, 1.0);
      worst = std::max(worst, relative_difference(bilinear_B(u, v), test::convolution_oracle(u, v)));
      worst = std::max(worst, relative_difference(convection(u), test::convolution_oracle(u, u)));
      worst = std::max(worst, relative_difference(advect_scalar(u, th), test::convolution_scalar_oracle(u, th)));
    }
  }
  return {worst <= kTol, fmt("max relative difference %.3e (tol %.0e), K in {1,2,4,6,8}", worst, kTol)};
}

// 4. Estimate certification.
Outcome estimate_certification() {
  CertifyOptions opt;
  opt.trials = 200;
  opt.grid_ladder = {8, 16, 32};
  opt.seed = kSeed;
  opt.max_growth_per_doubling = 1.25;
  struct Case {
    EstimateName name;
    double alpha, eta;
  };
  std::vector<Case> cases;
  for (double a : {4.0 / 3.0, 1.5, 2.0}) {
    for (double eta : {0.0, 1.0}) {
      if (is_admissible(a, eta)) cases.push_back({EstimateName::BilinearDual, a, eta});
    }
    cases.push_back({EstimateName::BilinearShifted, a, 1.0});
    cases.push_back({EstimateName::Interpolation, a, 0.0});
  }
  bool pass = true;
  double worst_growth = 0.0, worst_interp = 0.0;
  std::string failed;
  for (const auto& c : cases) {
    const auto r = certify_estimate(c.name, c.alpha, c.eta, opt);
    for (double gr : r.growth_per_doubling) worst_growth = std::max(worst_growth, gr);
    if (c.name == EstimateName::Interpolation) worst_interp = std::max(worst_interp, r.max_ratio);
    if (r.violated) {
      pass = false;
      failed += fmt(" %s(a=%.4g,eta=%g)", r.name.c_str(), c.alpha, c.eta);
    }
  }
  pass = pass && worst_interp <= 1.0;
  return {pass, fmt("%zu cases, max growth per doubling %.3f (limit 1.25), interpolation max ratio %.15f%s",
                    cases.size(), worst_growth, worst_interp, failed.empty() ? "" : (" violated:" + failed).c_str())};
}

// 5. Exact single-mode decay.
Outcome single_mode_decay() {
  constexpr double kTol = 1e-10;
  double worst = 0.0;
  for (double alpha : {4.0 / 3.0, 2.0}) {
    SimParams p;
    p.grid = make_grid(8);
    p.alpha = alpha;
    p.nu = 1.0;
    p.T = 1.0;
    p.dt = 0.01;
    const Mode k{1, 2};
    const std::pair<Mode, Complex> e[] = {{k, Complex(0.6, -0.8)}};
    const auto u0 = SpectralField::from_modes(p.grid, FieldKind::DivFreeVector, e);
    const auto tr = integrate(u0, p, CovarianceSpec{}, DiffusionSpec{}, NoDriver{});
    const double lam = p.nu * std::pow(k.magnitude(), alpha);
    for (std::size_t n = 0; n < tr.times.size(); ++n) {
      const Complex exact = std::exp(-lam * tr.times[n]) * u0.at(k);
      worst = std::max(worst, std::abs(tr.states[n].at(k) - exact) / std::abs(exact));
    }
  }
  return {worst <= kTol, fmt("max relative error over [0,1] %.3e (tol %.0e), alpha in {4/3, 2}", worst, kTol)};
}

// 6. Discrete energy inequality.
Outcome energy_inequality() {
  constexpr double kSlack = 1e-6;
  double worst = -1.0;
  std::string rows;
  for (double alpha : {4.0 / 3.0, 2.0}) {
    for (double dt : {1e-2, 5e-3, 2.5e-3}) {
      SimParams p;
      p.grid = make_grid(16);
      p.alpha = alpha;
      p.nu = 1.0;
      p.T = 1.0;
      p.dt = dt;
      const auto u0 = initial_preset("random_smooth(2.5)", p.grid, 3.0, kSeed);
      const auto tr = integrate(u0, p, CovarianceSpec{}, DiffusionSpec{}, NoDriver{});
      const auto e = energy_balance(tr, p);
      const double excess = e.lhs() / e.initial - 1.0;
      worst = std::max(worst, excess);
      rows += fmt(" %.4g", excess);
    }
  }
  return {worst <= kSlack, fmt("(lhs/initial - 1) per (alpha, dt):%s; max %.3e (allowed %.0e)", rows.c_str(), worst,
                               kSlack)};
}

// 7. Velocity/vorticity equivalence.
Outcome vorticity_equivalence() {
  constexpr double kTol = 1e-8;
  double worst = 0.0;
  const CovarianceSpec q;
  const DiffusionSpec mult{DiffusionFamily::DiagonalMultiplicative, 1.0, 0.5, 0.5, 0.5, 1.0};
  for (const auto& g : {DiffusionSpec{}, mult}) {
    for (double eps : {0.0, 0.01}) {
      SimParams p;
      p.grid = make_grid(16);
      p.alpha = 1.5;
      p.T = 0.5;
      p.dt = 0.005;
      p.epsilon = eps;
      const auto u0 = initial_preset("random_smooth(2)", p.grid, 2.0, kSeed);
      const NoiseDriver d{kSeed, stream_id(StreamFamily::Trajectory, 0)};
      const auto tu = integrate(u0, p, q, g, d, {0, false, {}});
      const auto tw = integrate_vorticity(curl(u0), p, q, g, d, {0, false, {}});
      worst = std::max(worst, relative_difference(curl(tu.final_state()), tw.final_state()));
    }
  }
  return {worst <= kTol, fmt("max relative difference at T=0.5 %.3e (tol %.0e), additive and multiplicative", worst,
                             kTol)};
}

// 8. Strong self-convergence.
Outcome strong_convergence() {
  constexpr double kTarget = 0.5;
  constexpr double kBand = 0.15;
  constexpr int kPaths = 64;
  const std::vector<double> dts{0.02, 0.01, 0.005, 0.0025};  // three halvings
  const std::uint64_t finest = 8;                             // dts[0] / finest = finest dt
  SimParams p;
  p.grid = make_grid(8);
  p.alpha = 1.5;
  p.T = 1.0;
  p.epsilon = 0.1;
  const CovarianceSpec q;
  const DiffusionSpec g;
  const auto u0 = initial_preset("two_mode", p.grid, 1.0, 0);
  std::vector<double> err(dts.size() - 1, 0.0);
  for (int j = 0; j < kPaths; ++j) {
    std::vector<SpectralField> ends;
    for (std::size_t i = 0; i < dts.size(); ++i) {
      p.dt = dts[i];
      const NoiseDriver d{kSeed, stream_id(StreamFamily::Trajectory, j), finest >> i};
      ends.push_back(integrate(u0, p, q, g, d, {0, false, {}}).final_state());
    }
    for (std::size_t i = 0; i + 1 < ends.size(); ++i) err[i] += sobolev_norm_sq(ends[i] - ends[i + 1], {1});
  }
  // Least-squares slope of log2(error) against log2(dt).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(err.size());
  std::string rows;
  for (std::size_t i = 0; i < err.size(); ++i) {
    err[i] = std::sqrt(err[i] / kPaths);
    const double x = std::log2(dts[i]), y = std::log2(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    rows += fmt(" %.3e", err[i]);
  }
  const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {std::abs(order - kTarget) <= kBand,
          fmt("RMS H1 errors vs half step:%s; observed order %.3f (required %.2f +- %.2f)", rows.c_str(), order,
              kTarget, kBand)};
}

// 9. Rate functional benchmark.
double g_rate = std::numeric_limits<double>::quiet_NaN();

double benchmark_rate() {
  if (std::isnan(g_rate)) {
    test::OuBenchmark b;
    const auto r = minimize_rate(b.target(0.25), b.u0, b.params, b.q, b.g, {});
    g_rate = r.converged ? r.energy : std::numeric_limits<double>::infinity();
  }
  return g_rate;
}

Outcome rate_benchmark() {
  constexpr double kTol = 0.02;
  const double closed = test::ou_closed_form(0.25, 1.0, 1.0, 1.0);
  const double oracle = test::ou_shooting_energy(0.25, 1.0, 1.0, 1.0);
  const double e = benchmark_rate();
  const double rel = std::abs(e / oracle - 1.0);
  return {rel <= kTol && std::abs(oracle / closed - 1.0) < 1e-8,
          fmt("minimized energy %.6f, boundary-value oracle %.6f, closed form %.6f, relative gap %.3f%% (tol 2%%)", e,
              oracle, closed, 100 * rel)};
}

// 10. LDP sanity.
Outcome ldp_sanity() {
  constexpr double kTol = 0.2;
  test::OuBenchmark b;
  const double rate = benchmark_rate();
  const auto curve = estimate_ldp_curve(b.target(0.25), b.u0, b.params, b.q, b.g, {0.1, 0.05, 0.02}, 100000, kSeed);
  const auto slope = extrapolate_slope(curve);
  std::string rows;
  for (const auto& c : curve) rows += fmt(" eps=%g:%zu hits,%.4f", c.epsilon, c.hits, c.eps_log_p.value_or(NAN));
  if (!slope) return {false, "no hits at any epsilon" + rows};
  const double rel = std::abs(*slope + rate) / rate;
  return {rel <= kTol, fmt("%s; extrapolated %.4f vs -I = %.4f, relative gap %.1f%% (tol 20%%)", rows.c_str(), *slope,
                           -rate, 100 * rel)};
}

// 11. Reproducibility.
std::map<std::string, std::string> artifacts(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == kManifestName) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), dir).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return out;
}

Outcome reproducibility() {
  const std::string cli = FSNS_CLI_PATH;
  const fs::path cfg_dir = FSNS_CONFIG_DIR;
  const fs::path root = fs::temp_directory_path() / ("fsns_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  struct Run {
    std::string command, config, extra;
  };
  const std::vector<Run> runs{{"simulate", "stochastic.cfg", ""},
                              {"simulate", "multiplicative.cfg", ""},
                              {"vorticity", "stochastic.cfg", ""},
                              {"skeleton", "single_mode.cfg", ""},
                              {"rate", "zero_target.cfg", ""},
                              {"ldp", "zero_target.cfg", ""},
                              {"check", "check_estimates.cfg", " estimates"},
                              {"check", "single_mode.cfg", " noise"},
                              {"check", "single_mode.cfg", " identities"}};
  std::size_t compared = 0;
  std::string failed;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<std::map<std::string, std::string>> results;
    for (const auto& [tag, threads] : std::vector<std::pair<std::string, int>>{{"a", 1}, {"b", 1}, {"c", 4}}) {
      const fs::path out = root / (std::to_string(i) + tag);
      const std::string cmd = cli + " " + runs[i].command + runs[i].extra + " --config " +
                              (cfg_dir / runs[i].config).string() + " --out " + out.string() + " --threads " +
                              std::to_string(threads) + " >/dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        failed += " " + runs[i].command + "(" + runs[i].config + "):exit";
        break;
      }
      results.push_back(artifacts(out));
    }
    if (results.size() != 3) continue;
    if (results[0].empty() || results[0] != results[1] || results[0] != results[2]) {
      failed += " " + runs[i].command + "(" + runs[i].config + ")";
    }
    compared += results[0].size();
  }
  fs::remove_all(root);
  return {failed.empty(), fmt("%zu commands, %zu artifacts compared across 2 runs and --threads 1/4%s", runs.size(),
                              compared, failed.empty() ? "" : ("; mismatch:" + failed).c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "Run only these criteria (1-11)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "structural identities", 10, structural_identities},
      {2, "trilinear cancellations", 30, trilinear_cancellations},
      {3, "convolution oracle", 30, convolution_equivalence},
      {4, "estimate certification", 300, estimate_certification},
      {5, "exact single-mode decay", 5, single_mode_decay},
      {6, "discrete energy inequality", 60, energy_inequality},
      {7, "velocity/vorticity equivalence", 60, vorticity_equivalence},
      {8, "strong self-convergence", 180, strong_convergence},
      {9, "rate functional benchmark", 60, rate_benchmark},
      {10, "LDP sanity", 600, ldp_sanity},
      {11, "reproducibility", 600, reproducibility},
  };

  bool all_pass = true;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    all_pass = all_pass && pass;
    std::printf("criterion %2d %s  %s: %s [%.2f s of %.0f s]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, c.budget_seconds);
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
