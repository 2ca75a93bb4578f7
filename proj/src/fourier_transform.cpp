#include "fsns/fourier_transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "fsns/errors.hpp"

namespace fsns {

namespace {

// The FFTW planner is not re-entrant; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Per-thread FFTW state for one grid size. Buffers come from fftw_malloc so
// every instance has the same alignment and FFTW_ESTIMATE selects the same
// codelets on every thread; results are therefore bit-identical regardless
// of which thread runs a transform.
class PlanPair {
 public:
  explicit PlanPair(int M) : M_(M) {
    const std::size_t nreal = static_cast<std::size_t>(M) * M;
    const std::size_t ncplx = static_cast<std::size_t>(M) * (M / 2 + 1);
    real_ = static_cast<double*>(fftw_malloc(sizeof(double) * nreal));
    cplx_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncplx));
    std::lock_guard lock(planner_mutex());
    c2r_ = fftw_plan_dft_c2r_2d(M, M, cplx_, real_, FFTW_ESTIMATE);
    r2c_ = fftw_plan_dft_r2c_2d(M, M, real_, cplx_, FFTW_ESTIMATE);
  }
  ~PlanPair() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(c2r_);
      fftw_destroy_plan(r2c_);
    }
    fftw_free(real_);
    fftw_free(cplx_);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;

  int M() const { return M_; }
  int half_width() const { return M_ / 2 + 1; }
  double* real() { return real_; }
  fftw_complex* cplx() { return cplx_; }
  void backward() { fftw_execute(c2r_); }
  void forward() { fftw_execute(r2c_); }

 private:
  int M_;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan c2r_ = nullptr;
  fftw_plan r2c_ = nullptr;
};

PlanPair& plans_for(int M) {
  thread_local std::map<int, std::unique_ptr<PlanPair>> cache;
  auto& slot = cache[M];
  if (!slot) slot = std::make_unique<PlanPair>(M);
  return *slot;
}

int wrap(int k, int M) { return ((k % M) + M) % M; }

void require_resolvable(const WaveGrid& grid, int M, const char* where) {
  if (M < 2 * grid.K() + 2) {
    throw DomainError(std::string(where) + ": collocation size M=" + std::to_string(M) +
                      " is too small for K=" + std::to_string(grid.K()) + " (need M >= 2K+2)");
  }
}

}  // namespace

namespace detail {

void synthesize(const WaveGrid& grid, std::span<const Complex> half, int M, std::span<double> out) {
  auto& p = plans_for(M);
  const int W = p.half_width();
  fftw_complex* c = p.cplx();
  std::fill_n(&c[0][0], 2 * static_cast<std::size_t>(M) * W, 0.0);
  auto put = [&](int k1, int k2, Complex v) {
    fftw_complex& dst = c[static_cast<std::size_t>(wrap(k1, M)) * W + k2];
    dst[0] = v.real();
    dst[1] = v.imag();
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Mode& k = grid.mode(i);
    const Complex v = half[i];
    if (k.k2 > 0) {
      put(k.k1, k.k2, v);
    } else if (k.k2 < 0) {
      put(-k.k1, -k.k2, std::conj(v));
    } else {
      put(k.k1, 0, v);
      put(-k.k1, 0, std::conj(v));
    }
  }
  p.backward();
  std::copy_n(p.real(), static_cast<std::size_t>(M) * M, out.begin());
}

void analyze(const WaveGrid& grid, std::span<const double> samples, int M, int cutoff,
             std::span<Complex> half) {
  auto& p = plans_for(M);
  const int W = p.half_width();
  std::copy_n(samples.begin(), static_cast<std::size_t>(M) * M, p.real());
  p.forward();
  const fftw_complex* c = p.cplx();
  const double scale = 1.0 / (static_cast<double>(M) * M);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Mode& k = grid.mode(i);
    if (k.max_abs() > cutoff) {
      half[i] = {};
      continue;
    }
    if (k.k2 >= 0) {
      const auto& s = c[static_cast<std::size_t>(wrap(k.k1, M)) * W + k.k2];
      half[i] = Complex(s[0], s[1]) * scale;
    } else {
      const auto& s = c[static_cast<std::size_t>(wrap(-k.k1, M)) * W - k.k2];
      half[i] = Complex(s[0], -s[1]) * scale;
    }
  }
}

}  // namespace detail

PhysicalSamples to_physical(const SpectralField& f, int M) {
  require_resolvable(f.grid(), M, "to_physical");
  PhysicalSamples out;
  out.M = M;
  const std::size_t n = static_cast<std::size_t>(M) * M;
  if (f.kind() == FieldKind::Scalar) {
    out.components.emplace_back(n);
    detail::synthesize(f.grid(), f.coefficients(), M, out.components[0]);
  } else {
    const auto [c1, c2] = vector_components(f);
    out.components.emplace_back(n);
    out.components.emplace_back(n);
    detail::synthesize(f.grid(), c1.coefficients(), M, out.components[0]);
    detail::synthesize(f.grid(), c2.coefficients(), M, out.components[1]);
  }
  return out;
}

SpectralField from_physical(const PhysicalSamples& samples, const GridPtr& grid) {
  require_resolvable(*grid, samples.M, "from_physical");
  const std::size_t n = static_cast<std::size_t>(samples.M) * samples.M;
  for (const auto& comp : samples.components) {
    if (comp.size() != n) throw DomainError("from_physical: sample array has wrong size");
  }
  auto analyze_one = [&](const std::vector<double>& comp) {
    std::vector<Complex> half(grid->size());
    detail::analyze(*grid, comp, samples.M, grid->K(), half);
    return SpectralField(grid, FieldKind::Scalar, std::move(half));
  };
  if (samples.components.size() == 1) return analyze_one(samples.components[0]);
  if (samples.components.size() == 2) {
    return helmholtz_project(analyze_one(samples.components[0]), analyze_one(samples.components[1]));
  }
  throw DomainError("from_physical: expected 1 or 2 components, got " +
                    std::to_string(samples.components.size()));
}

}  // namespace fsns
