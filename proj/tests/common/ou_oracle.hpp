#pragma once

#include <cmath>
#include <vector>

#include "fsns/ldp.hpp"

namespace fsns::test {

/// Minimal energy 1/2 int x^2 dt steering X' = -lam X + sigma x from 0 to a.
inline double ou_closed_form(double a, double lam, double sigma2, double T) {
  return a * a * lam / (sigma2 * (1.0 - std::exp(-2.0 * lam * T)));
}

/// Same quantity from the Euler-Lagrange boundary problem
///   X' = -lam X + sigma^2 p,  p' = lam p,  X(0) = 0,  X(T) = a,
/// shot with dense RK4 (the terminal value is linear in p(0)) and the energy
/// 1/2 int sigma^2 p^2 dt integrated by Simpson's rule.
inline double ou_shooting_energy(double a, double lam, double sigma2, double T, int n = 20000) {
  const double h = T / n;
  auto rhs = [&](double x, double p) { return std::pair{-lam * x + sigma2 * p, lam * p}; };
  auto shoot = [&](double p0, std::vector<double>* ps) {
    double x = 0.0, p = p0;
    if (ps) ps->push_back(p);
    for (int i = 0; i < n; ++i) {
      const auto [k1x, k1p] = rhs(x, p);
      const auto [k2x, k2p] = rhs(x + 0.5 * h * k1x, p + 0.5 * h * k1p);
      const auto [k3x, k3p] = rhs(x + 0.5 * h * k2x, p + 0.5 * h * k2p);
      const auto [k4x, k4p] = rhs(x + h * k3x, p + h * k3p);
      x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
      p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
      if (ps) ps->push_back(p);
    }
    return x;
  };
  const double p0 = a / shoot(1.0, nullptr);
  std::vector<double> ps;
  shoot(p0, &ps);
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * ps[i] * ps[i];
  }
  return 0.5 * sigma2 * s * h / 3.0;
}

/// One-mode linear benchmark: K = 1, alpha = 2, nu = 1, additive noise with
/// q = 1 at |k| = 1, so the H^1 coordinate of mode (1,0) is an OU process with
/// lam = 1 and sigma^2 = 1. The target is a radius-R ball whose nearest point
/// lies at distance a along that coordinate.
struct OuBenchmark {
  GridPtr grid = make_grid(1);
  SimParams params;
  CovarianceSpec q{2.0, 1.0};
  DiffusionSpec g{};
  SpectralField u0{grid, FieldKind::DivFreeVector};

  explicit OuBenchmark(double dt = 0.005) {
    params.alpha = 2.0;
    params.nu = 1.0;
    params.T = 1.0;
    params.dt = dt;
    params.grid = grid;
    params.linearized = true;
  }

  TargetSet target(double a, double radius = 20.0) const {
    // H^1 coordinate X = sqrt(2) |k| Re a(k) for the stored amplitude.
    const std::pair<Mode, Complex> e[] = {{{1, 0}, Complex((a + radius) / std::sqrt(2.0), 0.0)}};
    return TargetSet{EndpointBall{SpectralField::from_modes(grid, FieldKind::DivFreeVector, e), radius, {1.0}, false},
                     "ou"};
  }
};

}  // namespace fsns::test
