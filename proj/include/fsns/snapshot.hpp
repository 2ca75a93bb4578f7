#pragma once

#include <filesystem>
#include <iosfwd>

#include "fsns/spectral_field.hpp"

namespace fsns {

/// Binary snapshot layout (all little-endian):
///
///   char[4] "FSNS" | u32 version = 1 | u32 K | u8 kind | f64 time | f64 alpha
///   | f64 nu | u64 mode_count | mode_count x (i32 k1, i32 k2, f64 re, f64 im)
///
/// Modes are the stored half-spectrum (k1 > 0, or k1 = 0 and k2 > 0); the
/// conjugate half is implied.
struct Snapshot {
  SpectralField field;
  double time = 0.0;
  double alpha = 0.0;
  double nu = 0.0;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(std::ostream& os, const SpectralField& f, double time, double alpha, double nu);
void write_snapshot(const std::filesystem::path& path, const SpectralField& f, double time, double alpha,
                    double nu);

/// The dealiasing fraction is not part of the format; it is supplied by the
/// caller when reconstructing the grid.
Snapshot read_snapshot(std::istream& is, double dealias_fraction = 2.0 / 3.0);
Snapshot read_snapshot(const std::filesystem::path& path, double dealias_fraction = 2.0 / 3.0);

}  // namespace fsns
