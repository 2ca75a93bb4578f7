#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace fsns {

/// Integer wavevector on the torus (0, 2*pi)^2.
struct Mode {
  int k1 = 0;
  int k2 = 0;

  double magnitude() const { return std::hypot(static_cast<double>(k1), static_cast<double>(k2)); }
  double magnitude_sq() const { return static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2; }
  int max_abs() const { return std::max(std::abs(k1), std::abs(k2)); }
  Mode operator-() const { return {-k1, -k2}; }

  friend bool operator==(const Mode&, const Mode&) = default;
};

/// Location of an active mode in half-spectrum storage. `conjugate` is set
/// when the requested mode lives in the implied (lower) half.
struct ModeRef {
  std::size_t index = 0;
  bool conjugate = false;
};

/// True for the stored half of Z^2 \ {0}: k1 > 0, or k1 == 0 and k2 > 0.
inline bool in_upper_half(const Mode& k) { return k.k1 > 0 || (k.k1 == 0 && k.k2 > 0); }

/// Truncated wavenumber set {k in Z^2 : 0 < max(|k1|,|k2|) <= K}.
///
/// Only the upper half-spectrum is enumerated; the conjugate half is implied
/// by reality of the fields. The grid also fixes the padded collocation size
/// used for quadratic products so that every active output mode is free of
/// aliasing.
class WaveGrid {
 public:
  explicit WaveGrid(int K, double dealias_fraction = 2.0 / 3.0);

  int K() const { return K_; }
  double dealias_fraction() const { return dealias_fraction_; }

  /// Number of stored (upper half) modes; the active set has twice as many.
  std::size_t size() const { return modes_.size(); }
  std::size_t active_count() const { return 2 * modes_.size(); }

  std::span<const Mode> modes() const { return modes_; }
  const Mode& mode(std::size_t i) const { return modes_[i]; }
  double magnitude(std::size_t i) const { return magnitudes_[i]; }

  bool is_active(const Mode& k) const;
  std::optional<ModeRef> find(const Mode& k) const;

  /// Physical grid size M used for quadratic products (M >= 3K+1 so that
  /// alias images of the product never land on an active mode).
  int product_grid_size() const { return product_M_; }
  /// Largest max(|k1|,|k2|) kept after a product: floor(fraction * M / 2).
  int product_cutoff() const { return product_cutoff_; }

  /// Half-spectrum indices ordered by increasing |k| (ties by k1, then k2).
  std::vector<std::size_t> lowest_modes(std::size_t count) const;

  friend bool operator==(const WaveGrid& a, const WaveGrid& b) {
    return a.K_ == b.K_ && a.dealias_fraction_ == b.dealias_fraction_;
  }

 private:
  std::size_t lookup_slot(const Mode& k) const {
    return static_cast<std::size_t>(k.k1 + K_) * static_cast<std::size_t>(2 * K_ + 1) +
           static_cast<std::size_t>(k.k2 + K_);
  }

  int K_;
  double dealias_fraction_;
  int product_M_ = 0;
  int product_cutoff_ = 0;
  std::vector<Mode> modes_;
  std::vector<double> magnitudes_;
  std::vector<long> lookup_;  // slot -> stored index, or -1 for k = 0
};

using GridPtr = std::shared_ptr<const WaveGrid>;

GridPtr make_grid(int K, double dealias_fraction = 2.0 / 3.0);

/// Smallest even integer >= n whose prime factors are in {2, 3, 5, 7}.
int fft_friendly_size(int n);

}  // namespace fsns
