#include "fsns/snapshot.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "fsns/errors.hpp"

namespace fsns {

namespace {

constexpr std::array<char, 4> kMagic{'F', 'S', 'N', 'S'};

template <class U>
void put_le(std::ostream& os, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  os.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }
void put_i32(std::ostream& os, std::int32_t v) { put_le(os, std::bit_cast<std::uint32_t>(v)); }

template <class U>
U get_le(std::istream& is, const char* what) {
  std::array<unsigned char, sizeof(U)> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw FormatError(std::string("snapshot truncated while reading ") + what);
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

double get_f64(std::istream& is, const char* what) {
  return std::bit_cast<double>(get_le<std::uint64_t>(is, what));
}

std::int32_t get_i32(std::istream& is, const char* what) {
  return std::bit_cast<std::int32_t>(get_le<std::uint32_t>(is, what));
}

}  // namespace

void write_snapshot(std::ostream& os, const SpectralField& f, double time, double alpha, double nu) {
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, kSnapshotVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().K()));
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(f.kind()));
  put_f64(os, time);
  put_f64(os, alpha);
  put_f64(os, nu);
  put_le<std::uint64_t>(os, f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Mode& k = f.grid().mode(i);
    put_i32(os, k.k1);
    put_i32(os, k.k2);
    put_f64(os, f[i].real());
    put_f64(os, f[i].imag());
  }
  if (!os) throw FormatError("write_snapshot: stream write failed");
}

void write_snapshot(const std::filesystem::path& path, const SpectralField& f, double time, double alpha,
                    double nu) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("write_snapshot: cannot open " + path.string());
  write_snapshot(os, f, time, alpha, nu);
}

Snapshot read_snapshot(std::istream& is, double dealias_fraction) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
    throw FormatError("snapshot: bad magic bytes (expected \"FSNS\")");
  }
  const auto version = get_le<std::uint32_t>(is, "version");
  if (version != kSnapshotVersion) {
    throw FormatError("snapshot: unsupported version " + std::to_string(version));
  }
  const auto K = get_le<std::uint32_t>(is, "K");
  const auto kind_byte = get_le<std::uint8_t>(is, "kind");
  if (K < 1 || K > 4096) throw FormatError("snapshot: implausible K = " + std::to_string(K));
  if (kind_byte > 1) throw FormatError("snapshot: unknown field kind " + std::to_string(kind_byte));
  const double time = get_f64(is, "time");
  const double alpha = get_f64(is, "alpha");
  const double nu = get_f64(is, "nu");
  const auto count = get_le<std::uint64_t>(is, "mode count");

  auto grid = make_grid(static_cast<int>(K), dealias_fraction);
  if (count != grid->size()) {
    throw FormatError("snapshot: mode count " + std::to_string(count) + " does not match K=" +
                      std::to_string(K) + " (expected " + std::to_string(grid->size()) + ")");
  }
  std::vector<Complex> half(grid->size());
  for (std::uint64_t n = 0; n < count; ++n) {
    const Mode k{get_i32(is, "k1"), get_i32(is, "k2")};
    const double re = get_f64(is, "re");
    const double im = get_f64(is, "im");
    const auto ref = grid->find(k);
    if (!ref || ref->conjugate) {
      throw FormatError("snapshot: mode (" + std::to_string(k.k1) + "," + std::to_string(k.k2) +
                        ") is not in the stored half-spectrum");
    }
    half[ref->index] = Complex(re, im);
  }
  return Snapshot{SpectralField(grid, static_cast<FieldKind>(kind_byte), std::move(half)), time, alpha, nu};
}

Snapshot read_snapshot(const std::filesystem::path& path, double dealias_fraction) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("read_snapshot: cannot open " + path.string());
  return read_snapshot(is, dealias_fraction);
}

}  // namespace fsns
