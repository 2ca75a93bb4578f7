#include "fsns/stochastic.hpp"

#include <cmath>

#include "fsns/errors.hpp"
#include "fsns/random.hpp"

namespace fsns {

CovarianceSpec::CovarianceSpec(double decay_s, double c0) : decay_s_(decay_s), c0_(c0) {
  if (!(decay_s > 1.0) || !std::isfinite(decay_s)) {
    throw DomainError("CovarianceSpec: decay_s must exceed 1 for a trace-class covariance, got " +
                      std::to_string(decay_s));
  }
  if (!(c0 > 0.0) || !std::isfinite(c0)) {
    throw DomainError("CovarianceSpec: c0 must be positive, got " + std::to_string(c0));
  }
}

double CovarianceSpec::eigenvalue(const Mode& k) const { return c0_ * std::pow(k.magnitude_sq(), -decay_s_); }

double CovarianceSpec::eigenvalue(const WaveGrid& grid, std::size_t i) const { return eigenvalue(grid.mode(i)); }

double CovarianceSpec::trace(const WaveGrid& grid) const {
  double sum = 0.0;
  for (const Mode& k : grid.modes()) sum += eigenvalue(k);
  return 2.0 * sum;
}

NoiseIncrement sample_increment(const WaveGrid& grid, double dt, std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t index) {
  if (!(dt > 0.0)) throw DomainError("sample_increment: dt must be positive");
  NoiseIncrement out;
  out.dt = dt;
  out.db.resize(grid.size());
  const double sd = std::sqrt(dt);
  // Counter words: (step low, step high | mode). Modes are < 2^20 and steps
  // < 2^44 in practice; the packing keeps every (step, mode) distinct.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto a = static_cast<std::uint32_t>(index);
    const auto b = static_cast<std::uint32_t>(((index >> 32) << 20) | i);
    const auto [z0, z1] = normal_pair_at(seed, stream, a, b);
    out.db[i] = {sd * z0, sd * z1};
  }
  return out;
}

NoiseIncrement combine(const std::vector<NoiseIncrement>& parts) {
  if (parts.empty()) throw DomainError("combine: no increments");
  NoiseIncrement out = parts.front();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    if (parts[p].db.size() != out.db.size()) throw GridMismatch("combine: increments of different size");
    out.dt += parts[p].dt;
    for (std::size_t i = 0; i < out.db.size(); ++i) {
      out.db[i].first += parts[p].db[i].first;
      out.db[i].second += parts[p].db[i].second;
    }
  }
  return out;
}

SpectralField wiener_increment(const NoiseIncrement& dw, const CovarianceSpec& q, const GridPtr& grid) {
  if (dw.db.size() != grid->size()) throw GridMismatch("wiener_increment: increment does not match grid");
  std::vector<Complex> half(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double scale = std::sqrt(0.5 * q.eigenvalue(*grid, i)) / grid->magnitude(i);
    half[i] = Complex(dw.db[i].first, dw.db[i].second) * scale;
  }
  return SpectralField(grid, FieldKind::DivFreeVector, std::move(half));
}

SpectralField apply_sqrt_covariance(const CovarianceSpec& q, const SpectralField& w) {
  const auto& grid = w.grid();
  return map_modes(w, [&](std::size_t i, Complex c) { return std::sqrt(q.eigenvalue(grid, i)) * c; });
}

std::string to_string(DiffusionFamily f) {
  return f == DiffusionFamily::Additive ? "additive" : "diagonal_multiplicative";
}

DiffusionFamily diffusion_family_from_string(const std::string& s) {
  if (s == "additive") return DiffusionFamily::Additive;
  if (s == "diagonal_multiplicative") return DiffusionFamily::DiagonalMultiplicative;
  throw DomainError("unknown diffusion family '" + s + "' (expected additive or diagonal_multiplicative)");
}

void DiffusionSpec::validate() const {
  if (family == DiffusionFamily::Additive) return;
  if (!(c1 >= 0.0 && c2 >= 0.0 && c3 >= 0.0)) throw DomainError("DiffusionSpec: c1, c2, c3 must be >= 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("DiffusionSpec: gamma must lie in (0, 1]");
  if (!(saturation > 0.0)) throw DomainError("DiffusionSpec: saturation must be positive");
}

double DiffusionSpec::gain_from_norm(double t, double h1_norm) const {
  if (family == DiffusionFamily::Additive) return 1.0;
  const double psi = h1_norm / (1.0 + h1_norm / saturation);
  const double time_factor = c3 == 0.0 ? 1.0 : 1.0 + c3 * std::pow(std::abs(t), gamma);
  return (c1 + c2 * psi) * time_factor;
}

double DiffusionSpec::gain(double t, const SpectralField& u) const {
  if (family == DiffusionFamily::Additive) return 1.0;
  return gain_from_norm(t, sobolev_norm(u, {1.0}));
}

SpectralField apply_G(const DiffusionSpec& spec, double t, const SpectralField& u, const SpectralField& h) {
  if (spec.family == DiffusionFamily::Additive) return h;
  return spec.gain(t, u) * h;
}

double h0_norm(const CovarianceSpec& q, const SpectralField& v) {
  const auto& grid = v.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sum += grid.mode(i).magnitude_sq() * std::norm(v[i]) / q.eigenvalue(grid, i);
  }
  return std::sqrt(2.0 * sum);
}

double lq_norm(const CovarianceSpec& q, const DiffusionSpec& spec, double t, const SpectralField& u) {
  return spec.gain(t, u) * std::sqrt(q.trace(u.grid()));
}

DiffusionConstants diffusion_constants(const DiffusionSpec& spec, const CovarianceSpec& q, const WaveGrid& grid,
                                       double T) {
  spec.validate();
  const double hs = std::sqrt(q.trace(grid));
  if (spec.family == DiffusionFamily::Additive) return {0.0, hs, 0.0};
  const double time_max = 1.0 + spec.c3 * std::pow(T, spec.gamma);
  const double cmax = std::max(spec.c1, spec.c2);
  // psi' <= 1 and psi(x) <= x; t^gamma is gamma-Hoelder with constant 1.
  return {spec.c2 * time_max * hs, cmax * time_max * hs, spec.c3 * cmax * hs};
}

}  // namespace fsns
