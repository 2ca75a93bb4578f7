#include <doctest.h>

#include <cmath>
#include <map>

#include "fsns/errors.hpp"
#include "fsns/estimates.hpp"
#include "fsns/operators.hpp"
#include "support.hpp"

using namespace fsns;
using fsns::test::convolution_oracle;
using fsns::test::convolution_scalar_oracle;
using fsns::test::full_vector;
using fsns::test::rand_scalar;
using fsns::test::rand_vec;

namespace {

SpectralField single(const GridPtr& g, FieldKind kind, Mode k, Complex c) {
  const std::pair<Mode, Complex> e[] = {{k, c}};
  return SpectralField::from_modes(g, kind, e);
}

}  // namespace

TEST_CASE("single shear mode does not advect itself") {
  const auto g = make_grid(8);
  for (Mode k : {Mode{1, 0}, Mode{2, 3}, Mode{0, 5}}) {
    const auto u = single(g, FieldKind::DivFreeVector, k, Complex(0.7, -1.2));
    CHECK(sobolev_norm(convection(u), {0}) < 1e-13);
  }
}

TEST_CASE("bilinear form with a zero argument vanishes") {
  const auto g = make_grid(6);
  const auto u = rand_vec(g, 1);
  const SpectralField z(g, FieldKind::DivFreeVector);
  CHECK(sobolev_norm(bilinear_B(u, z), {0}) == 0.0);
  CHECK(sobolev_norm(bilinear_B(z, u), {0}) == 0.0);
  CHECK(trilinear_b(z, u, u) == 0.0);
  CHECK(trilinear_b(u, z, u) == 0.0);
  CHECK(trilinear_b(u, u, z) == 0.0);
}

TEST_CASE("two-mode convection matches the convolution oracle") {
  const auto g = make_grid(4);
  const std::pair<Mode, Complex> e[] = {{{1, 0}, Complex(1.0, 0.5)}, {{0, 1}, Complex(-0.3, 0.8)}};
  const auto u = SpectralField::from_modes(g, FieldKind::DivFreeVector, e);
  // (f(x1) g'(x2), f'(x1) g(x2)) is the gradient of f g: projected away.
  CHECK(sobolev_norm(convolution_oracle(u, u), {0}) < 1e-14);
  CHECK(sobolev_norm(convection(u), {0}) < 1e-14);

  const std::pair<Mode, Complex> f[] = {{{1, 0}, Complex(1.0, 0.5)}, {{1, 1}, Complex(-0.3, 0.8)}};
  const auto w = SpectralField::from_modes(g, FieldKind::DivFreeVector, f);
  const auto o = convolution_oracle(w, w);
  CHECK(sobolev_norm(o, {0}) > 0.1);
  CHECK(relative_difference(convection(w), o) < 1e-10);
}

TEST_CASE("pseudo-spectral products equal direct convolution for K <= 8") {
  for (int K : {2, 5, 8}) {
    const auto g = make_grid(K);
    for (std::uint64_t t = 0; t < 3; ++t) {
      const auto u = rand_vec(g, 2 * t, 1.0);
      const auto v = rand_vec(g, 2 * t + 1, 1.0);
      CHECK(relative_difference(bilinear_B(u, v), convolution_oracle(u, v)) < 1e-10);
      const auto th = rand_scalar(g, 50 + t, 1.0);
      CHECK(relative_difference(advect_scalar(u, th), convolution_scalar_oracle(u, th)) < 1e-10);
    }
  }
  // Non-default dealias fraction does not change the exact active-mode result.
  const auto g = make_grid(6, 0.5);
  const auto u = rand_vec(g, 7, 1.0);
  CHECK(relative_difference(convection(u), convolution_oracle(u, u)) < 1e-10);
}

TEST_CASE("convection output is a zero-mean divergence-free field") {
  const auto g = make_grid(8);
  const auto b = convection(rand_vec(g, 3));
  CHECK(b.kind() == FieldKind::DivFreeVector);
  CHECK(b.at({0, 0}) == Complex(0.0));
}

TEST_CASE("trilinear cancellation and antisymmetry") {
  const auto g = make_grid(16);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto u = rand_vec(g, 3 * t, 1.5);
    const auto w = rand_vec(g, 3 * t + 1, 1.5);
    const auto v = rand_vec(g, 3 * t + 2, 1.5);
    const double scale_l2 = sobolev_norm(bilinear_B(u, v), {0}) * sobolev_norm(v, {0});
    CHECK(std::abs(trilinear_b(u, v, v)) <= 1e-10 * scale_l2);
    const double s = std::abs(trilinear_b(u, w, v)) + std::abs(trilinear_b(u, v, w));
    CHECK(std::abs(trilinear_b(u, w, v) + trilinear_b(u, v, w)) <= 1e-10 * s);
    const double scale_h1 = sobolev_norm(convection(u), {1}) * sobolev_norm(u, {1});
    CHECK(std::abs(trilinear_b(u, u, u, Pairing::H1)) <= 1e-10 * scale_h1);
  }
}

TEST_CASE("operators reject mismatched grids and kinds") {
  const auto a = rand_vec(make_grid(4), 1);
  const auto b = rand_vec(make_grid(6), 1);
  CHECK_THROWS_AS(bilinear_B(a, b), GridMismatch);
  CHECK_THROWS_AS(trilinear_b(a, a, b), GridMismatch);
  CHECK_THROWS(curl(rand_scalar(make_grid(4), 2)));
}

TEST_CASE("curl and Biot-Savart") {
  const auto g = make_grid(8);
  const auto u = single(g, FieldKind::DivFreeVector, {1, 0}, 1.0);
  const auto th = curl(u);
  CHECK(th.kind() == FieldKind::Scalar);
  CHECK(std::abs(th.at({1, 0}) - Complex(0, 1)) < 1e-15);
  CHECK(sobolev_norm(curl(SpectralField(g, FieldKind::DivFreeVector)), {0}) == 0.0);
  CHECK(sobolev_norm(biot_savart(SpectralField(g, FieldKind::Scalar)), {0}) == 0.0);

  // Cartesian definition d1 v2 - d2 v1 evaluated on the full vector coefficients.
  const auto v = rand_vec(g, 5);
  const auto cv = curl(v);
  for (const auto& [k, c] : full_vector(v)) {
    const Complex expect = Complex(0, k.first) * c[1] - Complex(0, k.second) * c[0];
    CHECK(std::abs(cv.at({k.first, k.second}) - expect) < 1e-13);
  }

  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto theta = rand_scalar(g, t);
    CHECK(relative_difference(curl(biot_savart(theta)), theta) < 1e-15);
    for (double beta : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
      CHECK(sobolev_norm(biot_savart(theta), {beta + 1}) ==
            doctest::Approx(sobolev_norm(theta, {beta})).epsilon(1e-14));
    }
    const auto w = rand_vec(g, 100 + t);
    for (double a : {1.0, 4.0 / 3.0, 2.0}) {
      CHECK(relative_difference(curl(fractional_laplacian(w, a)), fractional_laplacian(curl(w), a)) < 1e-15);
    }
  }
}

TEST_CASE("admissibility of the dissipation exponent") {
  CHECK(critical_alpha(0.0) == doctest::Approx(4.0 / 3.0));
  CHECK(critical_alpha(1.0) == 1.0);
  CHECK(critical_alpha(3.0) == 1.0);
  CHECK(critical_alpha(0.25) == doctest::Approx(7.0 / 6.0));
  CHECK(critical_alpha(0.75) == doctest::Approx(1.5));
  CHECK(is_admissible(4.0 / 3.0, 0.0));
  CHECK(is_admissible(2.0, 0.0));
  CHECK_FALSE(is_admissible(1.3, 0.0));
  CHECK_FALSE(is_admissible(2.01, 0.0));
  // Open interval for eta in [1/2, 1).
  CHECK_FALSE(is_admissible(1.5, 0.75));
  CHECK_FALSE(is_admissible(2.0, 0.75));
  CHECK(is_admissible(1.7, 0.75));
  CHECK(is_admissible(1.0, 1.0));
  CHECK_FALSE(is_admissible(1.5, -0.1));

  CHECK_THROWS_AS(require_admissible(EstimateName::BilinearDual, 1.2, 0.0), InadmissibleParameters);
  try {
    require_admissible(EstimateName::BilinearDual, 1.2, 0.0);
  } catch (const InadmissibleParameters& e) {
    CHECK(std::string(e.what()).find("[1.33333, 2]") != std::string::npos);
  }
  CHECK_THROWS_AS(require_admissible(EstimateName::BilinearShifted, 1.5, 0.5), InadmissibleParameters);
  CHECK_THROWS_AS(require_admissible(EstimateName::TrilinearH1, 1.2, 0.0), InadmissibleParameters);
  CHECK_THROWS_AS(certify_estimate(EstimateName::BilinearDual, 1.0, 0.0, {}), InadmissibleParameters);
  CHECK_NOTHROW(require_admissible(EstimateName::Interpolation, 1.0, 0.0));
}

TEST_CASE("certification of the shifted bilinear bound at eta = 1") {
  CertifyOptions opt;
  opt.trials = 60;
  opt.grid_ladder = {8, 16, 32};
  const auto r = certify_estimate(EstimateName::BilinearShifted, 1.5, 1.0, opt);
  CHECK_FALSE(r.violated);
  CHECK(r.max_ratio > 0.0);
  REQUIRE(r.max_ratio_per_grid.size() == 3);
  REQUIRE(r.growth_per_doubling.size() == 2);
  const auto back = estimate_report_from_json(to_json(r));
  CHECK(back.name == r.name);
  CHECK(back.max_ratio == r.max_ratio);
  CHECK(back.grid_sizes == r.grid_sizes);
  CHECK(back.violated == r.violated);
}

TEST_CASE("certification is deterministic across thread counts") {
  CertifyOptions a;
  a.trials = 24;
  a.grid_ladder = {8, 16};
  CertifyOptions b = a;
  b.threads = 3;
  const auto ra = certify_estimate(EstimateName::TrilinearH1, 1.5, 0.0, a);
  const auto rb = certify_estimate(EstimateName::TrilinearH1, 1.5, 0.0, b);
  CHECK(ra.max_ratio_per_grid == rb.max_ratio_per_grid);
}

TEST_CASE("the growth criterion detects a false inequality") {
  // |B(u, v)|_{L2} <= c |u|_{L2} |v|_{L2} fails: B costs one derivative.
  std::vector<double> max_ratio;
  for (int K : {8, 16, 32}) {
    const auto g = make_grid(K);
    double m = 0.0;
    for (std::uint32_t t = 0; t < 20; ++t) {
      const auto u = random_field_at(g, FieldKind::DivFreeVector, 1.5, 7, t, 0);
      const auto v = random_field_at(g, FieldKind::DivFreeVector, 1.5, 7, t, 1);
      m = std::max(m, sobolev_norm(bilinear_B(u, v), {0}) / (sobolev_norm(u, {0}) * sobolev_norm(v, {0})));
    }
    max_ratio.push_back(m);
  }
  CHECK(max_ratio[1] / max_ratio[0] > 1.25);
  CHECK(max_ratio[2] / max_ratio[1] > 1.25);
}

TEST_CASE("interpolation certification respects the exact constant") {
  CertifyOptions opt;
  opt.trials = 100;
  opt.grid_ladder = {8, 16};
  const auto r = certify_estimate(EstimateName::Interpolation, 4.0 / 3.0, 0.0, opt);
  REQUIRE(r.constant_bound.has_value());
  CHECK(r.max_ratio <= 1.0);
  CHECK_FALSE(r.violated);
}
