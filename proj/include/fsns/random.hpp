#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "fsns/spectral_field.hpp"

namespace fsns {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A block is a
/// pure function of (counter, key), which is what makes noise reproducible
/// per (seed, stream, step, mode) regardless of evaluation order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Two independent standard normals for the counter (a, b, stream).
std::pair<double, double> normal_pair_at(std::uint64_t seed, std::uint64_t stream, std::uint32_t a,
                                         std::uint32_t b);

/// Named stream families; the high bits of a stream id select the family.
enum class StreamFamily : std::uint64_t {
  Trajectory = 1,
  Certification = 2,
  Optimizer = 3,
  Test = 4,
  Initial = 5,
};

inline std::uint64_t stream_id(StreamFamily family, std::uint64_t index) {
  return (static_cast<std::uint64_t>(family) << 56) | (index & ((std::uint64_t{1} << 56) - 1));
}

/// Sequential view of one (seed, stream) pair.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  double normal();
  double uniform();
  std::pair<double, double> normal_pair();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Random field with Stokes (or scalar) amplitudes xi(k) |k|^{-rho}, xi a
/// complex standard normal (E|xi|^2 = 1).
SpectralField random_field(const GridPtr& grid, FieldKind kind, double rho, RandomStream& rng);

/// Same ensemble, but each coefficient is a pure function of
/// (seed, stream, field, k). The field drawn on a coarse grid is then the
/// truncation of the one drawn on a finer grid. Requires K <= 32767.
SpectralField random_field_at(const GridPtr& grid, FieldKind kind, double rho, std::uint64_t seed,
                              std::uint64_t stream, std::uint32_t field);

}  // namespace fsns
