#include "fsns/wave_grid.hpp"

#include <numeric>
#include <string>

#include "fsns/errors.hpp"

namespace fsns {

namespace {

bool smooth_number(int n) {
  for (int p : {2, 3, 5, 7}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

}  // namespace

int fft_friendly_size(int n) {
  int m = std::max(n, 2);
  if (m % 2 != 0) ++m;
  while (!smooth_number(m)) m += 2;
  return m;
}

WaveGrid::WaveGrid(int K, double dealias_fraction) : K_(K), dealias_fraction_(dealias_fraction) {
  if (K < 1) throw DomainError("WaveGrid: K must be >= 1, got " + std::to_string(K));
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw DomainError("WaveGrid: dealias_fraction must lie in (0, 1], got " +
                      std::to_string(dealias_fraction));
  }

  const int side = 2 * K + 1;
  lookup_.assign(static_cast<std::size_t>(side) * side, -1);
  for (int k1 = 0; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const Mode k{k1, k2};
      if (!in_upper_half(k)) continue;
      lookup_[lookup_slot(k)] = static_cast<long>(modes_.size());
      lookup_[lookup_slot(-k)] = static_cast<long>(modes_.size());
      modes_.push_back(k);
      magnitudes_.push_back(k.magnitude());
    }
  }

  // Products of modes up to K reach 2K; the alias image q - M of an output
  // mode stays outside [-K, K] once M >= 3K + 1. The cutoff floor(f M / 2)
  // must also cover every active mode.
  int M = std::max(3 * K + 1, 2 * K + 2);
  M = fft_friendly_size(M);
  while (static_cast<int>(std::floor(dealias_fraction * M / 2.0 + 1e-12)) < K) {
    M = fft_friendly_size(M + 1);
  }
  product_M_ = M;
  product_cutoff_ = static_cast<int>(std::floor(dealias_fraction * M / 2.0 + 1e-12));
}

bool WaveGrid::is_active(const Mode& k) const {
  return k.max_abs() <= K_ && !(k.k1 == 0 && k.k2 == 0);
}

std::optional<ModeRef> WaveGrid::find(const Mode& k) const {
  if (!is_active(k)) return std::nullopt;
  const long idx = lookup_[lookup_slot(k)];
  return ModeRef{static_cast<std::size_t>(idx), !in_upper_half(k)};
}

std::vector<std::size_t> WaveGrid::lowest_modes(std::size_t count) const {
  std::vector<std::size_t> order(modes_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    const auto& ka = modes_[a];
    const auto& kb = modes_[b];
    if (ka.magnitude_sq() != kb.magnitude_sq()) return ka.magnitude_sq() < kb.magnitude_sq();
    if (ka.k1 != kb.k1) return ka.k1 < kb.k1;
    return ka.k2 < kb.k2;
  });
  order.resize(std::min(count, order.size()));
  return order;
}

GridPtr make_grid(int K, double dealias_fraction) {
  return std::make_shared<const WaveGrid>(K, dealias_fraction);
}

}  // namespace fsns
