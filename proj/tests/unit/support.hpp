#pragma once

#include "../common/convolution_oracle.hpp"
#include "fsns/random.hpp"
#include "fsns/spectral_field.hpp"

namespace fsns::test {

inline SpectralField rand_field(const GridPtr& grid, FieldKind kind, std::uint64_t index, double rho = 2.0,
                                std::uint64_t seed = 99) {
  RandomStream rng(seed, stream_id(StreamFamily::Test, index));
  return random_field(grid, kind, rho, rng);
}

inline SpectralField rand_vec(const GridPtr& g, std::uint64_t i, double rho = 2.0) {
  return rand_field(g, FieldKind::DivFreeVector, i, rho);
}

inline SpectralField rand_scalar(const GridPtr& g, std::uint64_t i, double rho = 2.0) {
  return rand_field(g, FieldKind::Scalar, i, rho);
}

}  // namespace fsns::test
