#include "fsns/operators.hpp"

#include <array>
#include <vector>

#include "fsns/errors.hpp"
#include "fsns/fourier_transform.hpp"

namespace fsns {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_vector(const SpectralField& f, const char* where) {
  if (!f.is_vector()) throw DomainError(std::string(where) + ": expected a divergence-free vector field");
}

void require_scalar(const SpectralField& f, const char* where) {
  if (f.is_vector()) throw DomainError(std::string(where) + ": expected a scalar field");
}

void require_compatible(const SpectralField& a, const SpectralField& b, const char* where) {
  if (!(a.grid() == b.grid())) {
    throw GridMismatch(std::string(where) + ": fields live on different grids (K=" +
                       std::to_string(a.grid().K()) + " vs K=" + std::to_string(b.grid().K()) + ")");
  }
}

// Cartesian components of a Stokes field, upper-half scalar coefficients.
std::array<std::vector<Complex>, 2> components(const SpectralField& v) {
  const auto& grid = v.grid();
  std::array<std::vector<Complex>, 2> c{std::vector<Complex>(grid.size()), std::vector<Complex>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Mode& k = grid.mode(i);
    const double mag = grid.magnitude(i);
    c[0][i] = v[i] * (-k.k2 / mag);
    c[1][i] = v[i] * (k.k1 / mag);
  }
  return c;
}

// Coefficients of d_m f for a scalar coefficient array f (m = 0 or 1).
std::vector<Complex> derivative(const WaveGrid& grid, std::span<const Complex> f, int m) {
  std::vector<Complex> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Mode& k = grid.mode(i);
    out[i] = kI * static_cast<double>(m == 0 ? k.k1 : k.k2) * f[i];
  }
  return out;
}

}  // namespace

SpectralField bilinear_B(const SpectralField& u, const SpectralField& v) {
  require_compatible(u, v, "bilinear_B");
  require_vector(u, "bilinear_B");
  require_vector(v, "bilinear_B");
  const auto& grid = u.grid();
  const int M = grid.product_grid_size();
  const std::size_t n = static_cast<std::size_t>(M) * M;

  const auto uc = components(u);
  const auto vc = components(v);
  std::vector<double> u1(n), u2(n), d(n), w1(n, 0.0), w2(n, 0.0);
  detail::synthesize(grid, uc[0], M, u1);
  detail::synthesize(grid, uc[1], M, u2);

  // w_j = u1 d1 v_j + u2 d2 v_j
  for (int j = 0; j < 2; ++j) {
    auto& w = j == 0 ? w1 : w2;
    for (int m = 0; m < 2; ++m) {
      const auto& um = m == 0 ? u1 : u2;
      detail::synthesize(grid, derivative(grid, vc[j], m), M, d);
      for (std::size_t p = 0; p < n; ++p) w[p] += um[p] * d[p];
    }
  }

  std::vector<Complex> h1(grid.size()), h2(grid.size());
  detail::analyze(grid, w1, M, grid.product_cutoff(), h1);
  detail::analyze(grid, w2, M, grid.product_cutoff(), h2);
  return helmholtz_project(SpectralField(u.grid_ptr(), FieldKind::Scalar, std::move(h1)),
                           SpectralField(u.grid_ptr(), FieldKind::Scalar, std::move(h2)));
}

SpectralField advect_scalar(const SpectralField& u, const SpectralField& theta) {
  require_compatible(u, theta, "advect_scalar");
  require_vector(u, "advect_scalar");
  require_scalar(theta, "advect_scalar");
  const auto& grid = u.grid();
  const int M = grid.product_grid_size();
  const std::size_t n = static_cast<std::size_t>(M) * M;

  const auto uc = components(u);
  std::vector<double> u1(n), u2(n), d(n), w(n, 0.0);
  detail::synthesize(grid, uc[0], M, u1);
  detail::synthesize(grid, uc[1], M, u2);
  for (int m = 0; m < 2; ++m) {
    const auto& um = m == 0 ? u1 : u2;
    detail::synthesize(grid, derivative(grid, theta.coefficients(), m), M, d);
    for (std::size_t p = 0; p < n; ++p) w[p] += um[p] * d[p];
  }
  std::vector<Complex> h(grid.size());
  detail::analyze(grid, w, M, grid.product_cutoff(), h);
  return SpectralField(u.grid_ptr(), FieldKind::Scalar, std::move(h));
}

double trilinear_b(const SpectralField& u, const SpectralField& w, const SpectralField& v, Pairing pairing) {
  require_compatible(u, v, "trilinear_b");
  const SpectralField b = bilinear_B(u, w);
  return sobolev_inner(b, v, {pairing == Pairing::L2 ? 0.0 : 1.0});
}

SpectralField curl(const SpectralField& v) {
  require_vector(v, "curl");
  const auto& grid = v.grid();
  std::vector<Complex> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = kI * grid.magnitude(i) * v[i];
  return SpectralField(v.grid_ptr(), FieldKind::Scalar, std::move(out));
}

SpectralField biot_savart(const SpectralField& theta) {
  require_scalar(theta, "biot_savart");
  const auto& grid = theta.grid();
  std::vector<Complex> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = -kI * theta[i] / grid.magnitude(i);
  return SpectralField(theta.grid_ptr(), FieldKind::DivFreeVector, std::move(out));
}

}  // namespace fsns
