#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fsns/spectral_field.hpp"

namespace fsns {

/// Trace-class covariance Q, diagonal on the Stokes basis with eigenvalues
/// q_k = c0 |k|^{-2 decay_s}. decay_s > 1 keeps the trace finite in the
/// continuum limit.
///
/// The Wiener series is taken over an orthonormal basis of H^{1,2}: per
/// stored mode k the two real basis fields have Stokes amplitude
/// 1/(sqrt(2)|k|) and i/(sqrt(2)|k|). With this choice the Cameron-Martin
/// norm of the sampled process is exactly h0_norm below.
class CovarianceSpec {
 public:
  CovarianceSpec(double decay_s = 2.0, double c0 = 1.0);

  double decay_s() const { return decay_s_; }
  double c0() const { return c0_; }

  double eigenvalue(const Mode& k) const;
  double eigenvalue(const WaveGrid& grid, std::size_t i) const;
  /// Sum of q_k over all active modes of the grid (both halves).
  double trace(const WaveGrid& grid) const;

 private:
  double decay_s_;
  double c0_;
};

/// Brownian increments for one time step: per stored mode the pair of
/// N(0, dt) draws driving the cosine and sine basis fields.
struct NoiseIncrement {
  double dt = 0.0;
  std::vector<std::pair<double, double>> db;
};

/// Draws the increment for `index` in stream (seed, stream). Each draw is a
/// pure function of (seed, stream, index, mode).
NoiseIncrement sample_increment(const WaveGrid& grid, double dt, std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t index);

/// Sum of consecutive increments (a coarser step of the same Brownian path).
NoiseIncrement combine(const std::vector<NoiseIncrement>& parts);

/// Q^{1/2} applied to the increment: the Wiener increment as a
/// divergence-free field.
SpectralField wiener_increment(const NoiseIncrement& dw, const CovarianceSpec& q, const GridPtr& grid);

/// Q^{1/2} w mode-wise.
SpectralField apply_sqrt_covariance(const CovarianceSpec& q, const SpectralField& w);

enum class DiffusionFamily { Additive, DiagonalMultiplicative };

std::string to_string(DiffusionFamily f);
DiffusionFamily diffusion_family_from_string(const std::string& s);

/// G(t, u) = sigma(t, u) Id with
///   Additive:                sigma = 1
///   DiagonalMultiplicative:  sigma = (c1 + c2 psi(|u|_{H^1})) (1 + c3 t^gamma),
///                            psi(x) = x / (1 + x / saturation).
/// psi is 1-Lipschitz and psi(x) <= x, so the Lipschitz, linear-growth and
/// time-Hoelder conditions hold with the constants below.
struct DiffusionSpec {
  DiffusionFamily family = DiffusionFamily::Additive;
  double c1 = 1.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double gamma = 1.0;
  double saturation = 1.0;

  void validate() const;
  double gain(double t, const SpectralField& u) const;
  double gain_from_norm(double t, double h1_norm) const;
};

SpectralField apply_G(const DiffusionSpec& spec, double t, const SpectralField& u, const SpectralField& h);

/// ( sum_k q_k^{-1} |k|^2 |v(k)|^2 )^{1/2} over active modes.
double h0_norm(const CovarianceSpec& q, const SpectralField& v);

/// Hilbert-Schmidt norm of G(t,u) Q^{1/2} on H^{1,2}: sigma(t,u) sqrt(tr Q).
double lq_norm(const CovarianceSpec& q, const DiffusionSpec& spec, double t, const SpectralField& u);

/// Constants c with which the three structural conditions hold on [0, T]:
///   |G(t,u) - G(t,v)|_{L_Q}  <= c_lip   |u - v|_{H^1}
///   |G(t,u)|_{L_Q}           <= c_grow  (1 + |u|_{H^1})
///   |G(t,u) - G(s,u)|_{L_Q}  <= c_hold  (1 + |u|_{H^1}) |t - s|^gamma
struct DiffusionConstants {
  double lipschitz = 0.0;
  double growth = 0.0;
  double holder = 0.0;
};

DiffusionConstants diffusion_constants(const DiffusionSpec& spec, const CovarianceSpec& q, const WaveGrid& grid,
                                       double T);

}  // namespace fsns
