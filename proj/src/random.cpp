#include "fsns/random.hpp"

#include <cmath>
#include <numbers>

#include "fsns/errors.hpp"

namespace fsns {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> box_muller(double u1, double u2) {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::pair<double, double> normal_pair_at(std::uint64_t seed, std::uint64_t stream, std::uint32_t a,
                                         std::uint32_t b) {
  const auto block = philox4x32(
      {a, b, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return box_muller(to_unit_open(block[0], block[1]), to_unit_open(block[2], block[3]));
}

std::pair<double, double> RandomStream::normal_pair() {
  const std::uint64_t c = counter_++;
  return normal_pair_at(seed_, stream_, static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32));
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const auto [z0, z1] = normal_pair();
  spare_ = z1;
  has_spare_ = true;
  return z0;
}

double RandomStream::uniform() {
  const std::uint64_t c = counter_++;
  const auto block = philox4x32(
      {static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32) | 0x80000000u,
       static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
      {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  return to_unit_open(block[0], block[1]);
}

SpectralField random_field(const GridPtr& grid, FieldKind kind, double rho, RandomStream& rng) {
  std::vector<Complex> half(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto [re, im] = rng.normal_pair();
    half[i] = Complex(re, im) * (std::sqrt(0.5) * std::pow(grid->magnitude(i), -rho));
  }
  return SpectralField(grid, kind, std::move(half));
}

SpectralField random_field_at(const GridPtr& grid, FieldKind kind, double rho, std::uint64_t seed,
                              std::uint64_t stream, std::uint32_t field) {
  if (grid->K() > 32767 || field > 0x3fff) throw DomainError("random_field_at: K or field index out of range");
  std::vector<Complex> half(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Mode& k = grid->mode(i);
    // Bit 30 of the second counter word keeps these draws apart from the
    // sequential counters of RandomStream on the same stream.
    const auto a = static_cast<std::uint32_t>(k.k1);
    const std::uint32_t b = 0x40000000u | (field << 16) | static_cast<std::uint32_t>(k.k2 + 32768);
    const auto [re, im] = normal_pair_at(seed, stream, a, b);
    half[i] = Complex(re, im) * (std::sqrt(0.5) * std::pow(grid->magnitude(i), -rho));
  }
  return SpectralField(grid, kind, std::move(half));
}

}  // namespace fsns
