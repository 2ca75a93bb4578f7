#include <doctest.h>

#include <cmath>

#include "../common/ou_oracle.hpp"
#include "fsns/errors.hpp"
#include "fsns/ldp.hpp"
#include "support.hpp"

using namespace fsns;
using fsns::test::OuBenchmark;
using fsns::test::ou_closed_form;
using fsns::test::ou_shooting_energy;

namespace {

SpectralField single(const GridPtr& g, Mode k, Complex c) {
  const std::pair<Mode, Complex> e[] = {{k, c}};
  return SpectralField::from_modes(g, FieldKind::DivFreeVector, e);
}

LdpPoint synthetic(double eps, double y) {
  LdpPoint p;
  p.epsilon = eps;
  p.samples = 1000;
  p.hits = 10;
  p.eps_log_p = y;
  return p;
}

}  // namespace

TEST_CASE("control energy") {
  const auto g = make_grid(4);
  const CovarianceSpec q(2.0, 1.0);
  auto v = ControlPath::zero(g, 1.0, 5);
  CHECK(control_energy(v, q) == 0.0);

  // h0 norm one on every interval: pair +-(1,0) with q = 1 needs |a| = 1/sqrt(2).
  const auto unit = single(g, {1, 0}, 1.0 / std::sqrt(2.0));
  REQUIRE(h0_norm(q, unit) == doctest::Approx(1.0));
  for (auto& x : v.values) x = unit;
  CHECK(control_energy(v, q) == doctest::Approx(0.5).epsilon(1e-14));
  for (auto& x : v.values) x = 2.0 * x;
  CHECK(control_energy(v, q) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("skeleton map") {
  SimParams p;
  p.grid = make_grid(8);
  p.T = 0.5;
  p.dt = 0.01;
  const CovarianceSpec q;
  const DiffusionSpec g;
  const auto u0 = initial_preset("two_mode", p.grid, 1.0, 0);
  const auto zero = skeleton_map(ControlPath::zero(p.grid, p.T, 5), u0, p, q, g);
  const auto free = integrate(u0, p, q, g, NoDriver{});
  CHECK(relative_difference(zero.final_state(), free.final_state()) == 0.0);

  // Refining dt for a fixed control: successive differences shrink.
  auto v = ControlPath::zero(p.grid, p.T, 5);
  for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] = fsns::test::rand_vec(p.grid, i, 2.0);
  std::vector<SpectralField> ends;
  for (double dt : {0.01, 0.005, 0.0025, 0.00125}) {
    p.dt = dt;
    ends.push_back(skeleton_map(v, u0, p, q, g, {0, false, {}}).final_state());
  }
  const double d1 = sobolev_norm(ends[0] - ends[1], {1});
  const double d2 = sobolev_norm(ends[1] - ends[2], {1});
  const double d3 = sobolev_norm(ends[2] - ends[3], {1});
  CHECK(d2 < 0.7 * d1);
  CHECK(d3 < 0.7 * d2);
}

TEST_CASE("target sets") {
  const auto g = make_grid(2);
  const auto c = single(g, {1, 0}, 1.0);
  TargetSet ball{EndpointBall{c, 0.5, {1.0}, false}, "b"};
  CHECK_NOTHROW(ball.validate());
  CHECK(std::get<EndpointBall>(ball.inflated(0.1).kind).radius == doctest::Approx(0.6));
  TargetSet out{EndpointBall{c, 0.5, {1.0}, true}, "o"};
  CHECK(std::get<EndpointBall>(out.inflated(0.1).kind).radius == doctest::Approx(0.4));
  TargetSet sup{SupExceed{2.0, {1.0}}, "s"};
  CHECK(std::get<SupExceed>(sup.inflated(0.5).kind).level == doctest::Approx(1.5));
  CHECK_THROWS_AS((TargetSet{EndpointBall{c, 0.0, {1.0}, false}, ""}.validate()), DomainError);
  CHECK_THROWS_AS((TargetSet{SupExceed{-1.0, {1.0}}, ""}.validate()), DomainError);
  CHECK_THROWS_AS(ball.inflated(-1.0), DomainError);

  // Distances: |c|_{H^1} = sqrt(2), zero state at distance sqrt(2) from c.
  TargetMonitor m(ball);
  m.observe(SpectralField(g, FieldKind::DivFreeVector));
  CHECK(m.signed_distance() == doctest::Approx(std::sqrt(2.0) - 0.5));
  CHECK_FALSE(m.hit());
  TargetMonitor mo(out);
  mo.observe(SpectralField(g, FieldKind::DivFreeVector));
  CHECK(mo.hit());
  TargetMonitor ms(sup);
  ms.observe(c);
  ms.observe(SpectralField(g, FieldKind::DivFreeVector));
  CHECK(ms.signed_distance() == doctest::Approx(2.0 - std::sqrt(2.0)));
  ms.observe(2.0 * c);
  CHECK(ms.hit());
}

TEST_CASE("dense boundary-value oracle agrees with the closed form") {
  for (double lam : {0.5, 1.0, 3.0}) {
    CHECK(ou_shooting_energy(0.3, lam, 0.7, 1.2) == doctest::Approx(ou_closed_form(0.3, lam, 0.7, 1.2)).epsilon(1e-9));
  }
}

TEST_CASE("zero-energy target") {
  OuBenchmark b;
  SimParams p;
  p.grid = make_grid(4);
  p.T = 0.5;
  p.dt = 0.01;
  const auto u0 = initial_preset("two_mode", p.grid, 1.0, 0);
  const auto endpoint = integrate(u0, p, b.q, b.g, NoDriver{}).final_state();
  for (double r : {1e-3, 0.5}) {
    const TargetSet t{EndpointBall{endpoint, r, {1.0}, false}, "det"};
    const auto res = minimize_rate(t, u0, p, b.q, b.g, {});
    CHECK(res.converged);
    CHECK(res.energy == 0.0);
    for (const auto& v : res.control.values) CHECK(sobolev_norm(v, {0}) == 0.0);
  }
}

TEST_CASE("one-mode benchmark matches the boundary-value oracle") {
  OuBenchmark b;
  const double oracle = ou_shooting_energy(0.25, 1.0, 1.0, 1.0);
  const auto r = minimize_rate(b.target(0.25), b.u0, b.params, b.q, b.g, {});
  CHECK(r.converged);
  CHECK(r.terminal_residual <= OptimizerConfig{}.feasibility_tol);
  CHECK(r.energy == doctest::Approx(oracle).epsilon(0.02));
  CHECK(control_energy(r.control, b.q) == doctest::Approx(r.energy).epsilon(1e-12));
  const auto traj = skeleton_map(r.control, b.u0, b.params, b.q, b.g);
  CHECK(target_violation(b.target(0.25), traj) == doctest::Approx(r.terminal_residual).epsilon(1e-9));

  SUBCASE("energy scales quadratically with the target distance") {
    const auto half = minimize_rate(b.target(0.125), b.u0, b.params, b.q, b.g, {});
    CHECK(r.energy / half.energy == doctest::Approx(4.0).epsilon(0.02));
  }
  SUBCASE("enlarging the target never costs more") {
    double prev = r.energy;
    for (double radius : {20.05, 20.1, 20.2}) {
      auto t = b.target(0.25);
      std::get<EndpointBall>(t.kind).radius = radius;
      const auto bigger = minimize_rate(t, b.u0, b.params, b.q, b.g, {});
      CHECK(bigger.converged);
      CHECK(bigger.energy <= prev + OptimizerConfig{}.feasibility_tol);
      prev = bigger.energy;
    }
  }
}

TEST_CASE("unreachable target reports non-convergence") {
  OuBenchmark b;
  OptimizerConfig opt;
  opt.rounds = 2;
  opt.max_iterations = 5;
  opt.control_intervals = 4;
  const TargetSet far{SupExceed{1e9, {1.0}}, "far"};
  const auto r = minimize_rate(far, b.u0, b.params, b.q, b.g, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.terminal_residual > opt.feasibility_tol);
  const auto j = rate_summary_json(r);
  CHECK(j.at("converged") == false);
}

TEST_CASE("wilson interval") {
  const auto [lo0, hi0] = wilson_interval(0, 100);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == doctest::Approx(3.8414588 / 103.8414588).epsilon(1e-6));
  const auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.403832).epsilon(1e-5));
  CHECK(hi == doctest::Approx(0.596168).epsilon(1e-5));
  const auto [lo1, hi1] = wilson_interval(100, 100);
  CHECK(hi1 == doctest::Approx(1.0));
  CHECK(lo1 < 1.0);
}

TEST_CASE("Monte Carlo estimates") {
  OuBenchmark b(0.02);
  SUBCASE("whole space has probability one") {
    const TargetSet all{EndpointBall{SpectralField(b.grid, FieldKind::DivFreeVector), 1e6, {1.0}, false}, "all"};
    const auto pt = estimate_ldp_point(all, b.u0, b.params, b.q, b.g, 100.0, 200, 1);
    CHECK(pt.hits == 200);
    REQUIRE(pt.eps_log_p);
    CHECK(*pt.eps_log_p == 0.0);
  }
  SUBCASE("shrinking the radius never adds hits") {
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double r : {20.3, 20.2, 20.1}) {
      auto t = b.target(0.5);
      std::get<EndpointBall>(t.kind).radius = r;
      const auto pt = estimate_ldp_point(t, b.u0, b.params, b.q, b.g, 0.2, 2000, 5);
      CHECK(pt.hits <= prev);
      prev = pt.hits;
    }
  }
  SUBCASE("curves are reproducible and thread independent") {
    const auto t = b.target(0.25);
    const auto c1 = estimate_ldp_curve(t, b.u0, b.params, b.q, b.g, {0.2, 0.1}, 1000, 9, 1);
    const auto c2 = estimate_ldp_curve(t, b.u0, b.params, b.q, b.g, {0.2, 0.1}, 1000, 9, 3);
    REQUIRE(c1.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(to_json(c1[i]) == to_json(c2[i]));
      CHECK(c1[i].p_hat == static_cast<double>(c1[i].hits) / 1000.0);
      CHECK(c1[i].wilson_low <= c1[i].p_hat);
      CHECK(c1[i].wilson_high >= c1[i].p_hat);
    }
    CHECK_THROWS_AS(estimate_ldp_curve(t, b.u0, b.params, b.q, b.g, {0.1, 0.2}, 10, 9), DomainError);
  }
  SUBCASE("zero hits are flagged") {
    const auto pt = estimate_ldp_point(b.target(50.0), b.u0, b.params, b.q, b.g, 0.01, 100, 2);
    CHECK(pt.hits == 0);
    CHECK(pt.zero_hits);
    CHECK_FALSE(pt.eps_log_p.has_value());
  }
}

TEST_CASE("slope extrapolation") {
  auto f = [](double e) { return -0.3 + 0.8 * e - 0.4 * e * std::log(e); };
  const std::vector<LdpPoint> three{synthetic(0.1, f(0.1)), synthetic(0.05, f(0.05)), synthetic(0.02, f(0.02))};
  CHECK(*extrapolate_slope(three) == doctest::Approx(-0.3).epsilon(1e-10));
  const std::vector<LdpPoint> two{synthetic(0.1, -0.2), synthetic(0.05, -0.25)};
  CHECK(*extrapolate_slope(two) == doctest::Approx(-0.3).epsilon(1e-12));
  LdpPoint none;
  none.epsilon = 0.01;
  none.zero_hits = true;
  CHECK_FALSE(extrapolate_slope({none}).has_value());
}

TEST_CASE("sanity reports") {
  SUBCASE("zero-energy target") {
    const std::vector<LdpPoint> c{synthetic(0.1, -0.001), synthetic(0.05, -0.0005), synthetic(0.02, -0.0002)};
    const auto r = ldp_sanity_report(0.0, 0.0, 0.0, c, {});
    CHECK(r.band_low <= 0.0);
    CHECK(r.band_high >= 0.0);
    CHECK(r.pass);
    CHECK(r.verdict == "PASS");
  }
  SUBCASE("band and verdict") {
    const std::vector<LdpPoint> c{synthetic(0.1, -1.0), synthetic(0.05, -1.0)};
    const auto r = ldp_sanity_report(1.0, 1.1, 0.9, c, {0.2, 0.01});
    CHECK(r.band_low == doctest::Approx(-1.1 * 1.2 - 0.01));
    CHECK(r.band_high == doctest::Approx(-0.9 * 0.8 + 0.01));
    CHECK(r.pass);
    const auto off = ldp_sanity_report(2.0, 2.0, 2.0, c, {0.2, 0.01});
    CHECK_FALSE(off.pass);
    CHECK(off.verdict == "FAIL");
  }
  SUBCASE("file format round trip") {
    LdpPoint z;
    z.epsilon = 0.02;
    z.samples = 10;
    z.zero_hits = true;
    const std::vector<LdpPoint> c{synthetic(0.1, -0.123456789012345), z};
    const auto r = ldp_sanity_report(0.2, std::nullopt, 0.15, c, {});
    const auto back = sanity_report_from_json(nlohmann::json::parse(to_json(r).dump()));
    CHECK(to_json(back) == to_json(r));
    CHECK(back.curve[0].eps_log_p == r.curve[0].eps_log_p);
    CHECK_FALSE(back.curve[1].eps_log_p.has_value());
    const auto inf = ldp_sanity_report(std::nullopt, std::nullopt, std::nullopt, c, {});
    CHECK_FALSE(inf.pass);
    const auto inf_back = sanity_report_from_json(to_json(inf));
    CHECK_FALSE(inf_back.rate.has_value());
    CHECK(to_json(inf_back) == to_json(inf));
    CHECK_THROWS_AS(sanity_report_from_json(nlohmann::json{{"rate", 1.0}}), FormatError);
  }
}
