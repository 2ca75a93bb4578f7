#pragma once

#include <span>
#include <vector>

#include "fsns/spectral_field.hpp"

namespace fsns {

/// Point values on the uniform M x M collocation grid x = 2*pi*(i1, i2)/M,
/// stored row-major with index i1 * M + i2. One component for scalar fields,
/// two for vector fields.
struct PhysicalSamples {
  int M = 0;
  std::vector<std::vector<double>> components;
};

/// Evaluates f on the M x M grid. Requires M >= 2K + 2.
PhysicalSamples to_physical(const SpectralField& f, int M);

/// Discrete Fourier analysis of the samples restricted to the active modes of
/// `grid`. One component gives a scalar field; two components are projected
/// onto the divergence-free subspace.
SpectralField from_physical(const PhysicalSamples& samples, const GridPtr& grid);

namespace detail {

/// Synthesis of a real field from upper-half coefficients with scalar
/// (Hermitian) pairing. `out` must have M * M entries.
void synthesize(const WaveGrid& grid, std::span<const Complex> half, int M, std::span<double> out);

/// Analysis of M * M real samples into upper-half coefficients of `grid`,
/// zeroing modes with max(|k1|,|k2|) > cutoff.
void analyze(const WaveGrid& grid, std::span<const double> samples, int M, int cutoff,
             std::span<Complex> half);

}  // namespace detail

}  // namespace fsns
