#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fsns/wave_grid.hpp"

namespace fsns {

using Complex = std::complex<double>;

enum class FieldKind : std::uint8_t { Scalar = 0, DivFreeVector = 1 };

/// Order of a Sobolev space H^{beta,2}; negative orders are allowed.
struct SobolevExponent {
  double beta = 0.0;
};

/// Truncated Fourier coefficients of a real, zero-mean field on the torus.
///
/// Scalar fields store f^(k). Divergence-free vector fields store a single
/// Stokes amplitude a(k) per mode, the vector coefficient being
/// a(k) k_perp / |k| with k_perp = (-k2, k1). Only the upper half-spectrum is
/// stored; reality fixes the rest:
///   scalar:  f^(-k) = conj(f^(k))
///   vector:  a(-k)  = -conj(a(k))   (so that the vector coefficient is Hermitian)
/// The zero mode is never represented.
///
/// Fields are immutable once constructed.
class SpectralField {
 public:
  SpectralField(GridPtr grid, FieldKind kind);
  SpectralField(GridPtr grid, FieldKind kind, std::vector<Complex> half_coefficients);

  /// Builds a field from arbitrary (mode, value) entries. Entries in the lower
  /// half are mapped onto their stored partner; an explicit upper-half entry
  /// takes precedence over its conjugate.
  static SpectralField from_modes(GridPtr grid, FieldKind kind,
                                  std::span<const std::pair<Mode, Complex>> entries);

  const WaveGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  FieldKind kind() const { return kind_; }
  bool is_vector() const { return kind_ == FieldKind::DivFreeVector; }

  std::span<const Complex> coefficients() const { return coeffs_; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }
  std::size_t size() const { return coeffs_.size(); }

  /// Coefficient (or Stokes amplitude) at any k; zero outside the active set.
  Complex at(const Mode& k) const;

  /// Cartesian coefficient vector at k. Scalar fields are rejected.
  std::array<Complex, 2> vector_coefficient(const Mode& k) const;

  bool all_finite() const;

 private:
  GridPtr grid_;
  FieldKind kind_;
  std::vector<Complex> coeffs_;
};

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* where);

/// Applies fn(index, coefficient) -> coefficient mode by mode.
template <class Fn>
SpectralField map_modes(const SpectralField& f, Fn&& fn) {
  std::vector<Complex> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(i, f[i]);
  return SpectralField(f.grid_ptr(), f.kind(), std::move(out));
}

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(double s, const SpectralField& a);
SpectralField operator*(Complex s, const SpectralField& a);

/// a + s * b
SpectralField axpy(const SpectralField& a, double s, const SpectralField& b);

/// Sobolev norm ( sum over active k of |k|^{2s} |f^(k)|^2 )^{1/2}.
double sobolev_norm(const SpectralField& f, SobolevExponent s);
double sobolev_norm_sq(const SpectralField& f, SobolevExponent s);

/// Real inner product sum_k |k|^{2s} Re(f^(k) conj(g^(k))) over active modes.
double sobolev_inner(const SpectralField& f, const SpectralField& g, SobolevExponent s);

/// Multiplier |k|^alpha, alpha in (0, 2]. Kind is preserved.
SpectralField fractional_laplacian(const SpectralField& f, double alpha);

/// Leray projection of a vector field given as two scalar components.
SpectralField helmholtz_project(const SpectralField& v1, const SpectralField& v2);

/// Cartesian components of a divergence-free field as two scalar fields.
std::pair<SpectralField, SpectralField> vector_components(const SpectralField& v);

/// Relative distance |a - b|_{L^2} / max(|a|_{L^2}, |b|_{L^2}, floor).
double relative_difference(const SpectralField& a, const SpectralField& b, double floor = 1e-300);

}  // namespace fsns
