#pragma once

#include "fsns/spectral_field.hpp"

namespace fsns {

/// B(u, v) = Pi((u . grad) v), computed pseudo-spectrally on the padded
/// product grid of u.grid() and truncated to the active modes.
SpectralField bilinear_B(const SpectralField& u, const SpectralField& v);

/// B(u) = B(u, u).
inline SpectralField convection(const SpectralField& u) { return bilinear_B(u, u); }

/// u . grad(theta) for a divergence-free u and scalar theta, truncated to
/// the active modes.
SpectralField advect_scalar(const SpectralField& u, const SpectralField& theta);

enum class Pairing { L2, H1 };

/// <B(u, w), v> in L^2 or H^{1,2}.
double trilinear_b(const SpectralField& u, const SpectralField& w, const SpectralField& v,
                   Pairing pairing = Pairing::L2);

/// Scalar vorticity d1 v2 - d2 v1; for a Stokes amplitude a(k) this is i|k| a(k).
SpectralField curl(const SpectralField& v);

/// Velocity from vorticity, a(k) = -i theta(k) / |k|; inverse of curl.
SpectralField biot_savart(const SpectralField& theta);

}  // namespace fsns
