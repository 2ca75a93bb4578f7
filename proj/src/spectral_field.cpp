#include "fsns/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fsns/errors.hpp"

namespace fsns {

namespace {

// Value stored for the upper-half partner when a lower-half entry is given.
Complex partner_value(FieldKind kind, Complex lower) {
  return kind == FieldKind::Scalar ? std::conj(lower) : -std::conj(lower);
}

}  // namespace

SpectralField::SpectralField(GridPtr grid, FieldKind kind)
    : grid_(std::move(grid)), kind_(kind), coeffs_(grid_->size(), Complex{}) {}

SpectralField::SpectralField(GridPtr grid, FieldKind kind, std::vector<Complex> half_coefficients)
    : grid_(std::move(grid)), kind_(kind), coeffs_(std::move(half_coefficients)) {
  if (coeffs_.size() != grid_->size()) {
    throw GridMismatch("SpectralField: coefficient count " + std::to_string(coeffs_.size()) +
                       " does not match grid half-spectrum size " + std::to_string(grid_->size()));
  }
}

SpectralField SpectralField::from_modes(GridPtr grid, FieldKind kind,
                                        std::span<const std::pair<Mode, Complex>> entries) {
  std::vector<Complex> half(grid->size(), Complex{});
  std::vector<bool> explicit_upper(grid->size(), false);
  for (const auto& [k, value] : entries) {
    const auto ref = grid->find(k);
    if (!ref) {
      throw DomainError("SpectralField::from_modes: mode (" + std::to_string(k.k1) + "," +
                        std::to_string(k.k2) + ") is not active on this grid");
    }
    if (ref->conjugate) {
      if (!explicit_upper[ref->index]) half[ref->index] = partner_value(kind, value);
    } else {
      half[ref->index] = value;
      explicit_upper[ref->index] = true;
    }
  }
  return SpectralField(std::move(grid), kind, std::move(half));
}

Complex SpectralField::at(const Mode& k) const {
  const auto ref = grid_->find(k);
  if (!ref) return {};
  const Complex c = coeffs_[ref->index];
  return ref->conjugate ? partner_value(kind_, c) : c;
}

std::array<Complex, 2> SpectralField::vector_coefficient(const Mode& k) const {
  if (kind_ != FieldKind::DivFreeVector) {
    throw DomainError("vector_coefficient: field is scalar");
  }
  const Complex a = at(k);
  if (k.k1 == 0 && k.k2 == 0) return {Complex{}, Complex{}};
  const double mag = k.magnitude();
  return {a * (-k.k2 / mag), a * (k.k1 / mag)};
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* where) {
  if (!(a.grid() == b.grid())) {
    throw GridMismatch(std::string(where) + ": fields live on different grids (K=" +
                       std::to_string(a.grid().K()) + " vs K=" + std::to_string(b.grid().K()) + ")");
  }
  if (a.kind() != b.kind()) {
    throw GridMismatch(std::string(where) + ": fields have different kinds");
  }
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b, "operator+");
  return map_modes(a, [&](std::size_t i, Complex c) { return c + b[i]; });
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b, "operator-");
  return map_modes(a, [&](std::size_t i, Complex c) { return c - b[i]; });
}

SpectralField operator*(double s, const SpectralField& a) {
  return map_modes(a, [s](std::size_t, Complex c) { return s * c; });
}

SpectralField operator*(Complex s, const SpectralField& a) {
  return map_modes(a, [s](std::size_t, Complex c) { return s * c; });
}

SpectralField axpy(const SpectralField& a, double s, const SpectralField& b) {
  require_same_grid(a, b, "axpy");
  return map_modes(a, [&](std::size_t i, Complex c) { return c + s * b[i]; });
}

double sobolev_norm_sq(const SpectralField& f, SobolevExponent s) {
  const auto& grid = f.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = s.beta == 0.0 ? 1.0 : std::pow(grid.mode(i).magnitude_sq(), s.beta);
    sum += w * std::norm(f[i]);
  }
  // Each stored mode stands for the pair +-k.
  return 2.0 * sum;
}

double sobolev_norm(const SpectralField& f, SobolevExponent s) { return std::sqrt(sobolev_norm_sq(f, s)); }

double sobolev_inner(const SpectralField& f, const SpectralField& g, SobolevExponent s) {
  require_same_grid(f, g, "sobolev_inner");
  const auto& grid = f.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = s.beta == 0.0 ? 1.0 : std::pow(grid.mode(i).magnitude_sq(), s.beta);
    sum += w * (f[i].real() * g[i].real() + f[i].imag() * g[i].imag());
  }
  return 2.0 * sum;
}

SpectralField fractional_laplacian(const SpectralField& f, double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw DomainError("fractional_laplacian: alpha must lie in (0, 2], got " + std::to_string(alpha));
  }
  const auto& grid = f.grid();
  return map_modes(f, [&](std::size_t i, Complex c) {
    return std::pow(grid.mode(i).magnitude_sq(), 0.5 * alpha) * c;
  });
}

SpectralField helmholtz_project(const SpectralField& v1, const SpectralField& v2) {
  require_same_grid(v1, v2, "helmholtz_project");
  if (v1.kind() != FieldKind::Scalar) {
    throw DomainError("helmholtz_project: components must be scalar fields");
  }
  const auto& grid = v1.grid();
  std::vector<Complex> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Mode& k = grid.mode(i);
    out[i] = (-static_cast<double>(k.k2) * v1[i] + static_cast<double>(k.k1) * v2[i]) / grid.magnitude(i);
  }
  return SpectralField(v1.grid_ptr(), FieldKind::DivFreeVector, std::move(out));
}

std::pair<SpectralField, SpectralField> vector_components(const SpectralField& v) {
  if (!v.is_vector()) throw DomainError("vector_components: field is scalar");
  const auto& grid = v.grid();
  std::vector<Complex> c1(grid.size()), c2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Mode& k = grid.mode(i);
    const double mag = grid.magnitude(i);
    c1[i] = v[i] * (-k.k2 / mag);
    c2[i] = v[i] * (k.k1 / mag);
  }
  return {SpectralField(v.grid_ptr(), FieldKind::Scalar, std::move(c1)),
          SpectralField(v.grid_ptr(), FieldKind::Scalar, std::move(c2))};
}

double relative_difference(const SpectralField& a, const SpectralField& b, double floor) {
  const double diff = sobolev_norm(a - b, {0.0});
  const double scale = std::max({sobolev_norm(a, {0.0}), sobolev_norm(b, {0.0}), floor});
  return diff / scale;
}

}  // namespace fsns
