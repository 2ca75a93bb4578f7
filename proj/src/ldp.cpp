#include "fsns/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit.h>
#include <gsl/gsl_multimin.h>

#include "fsns/parallel.hpp"
#include "fsns/random.hpp"

namespace fsns {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Signed distance reported for a control whose skeleton solve blows up.
constexpr double kBlowUpDistance = 1e10;

const SpectralField& final_state_of(const std::optional<SpectralField>& s) {
  if (!s) throw DomainError("TargetMonitor: no state observed");
  return *s;
}

}  // namespace

void TargetSet::validate() const {
  if (const auto* b = std::get_if<EndpointBall>(&kind)) {
    if (!(b->radius > 0.0) || !std::isfinite(b->radius)) throw DomainError("target: radius must be positive");
    if (!b->center.is_vector()) throw DomainError("target: ball center must be a divergence-free field");
  } else {
    const auto& s = std::get<SupExceed>(kind);
    if (!(s.level > 0.0) || !std::isfinite(s.level)) throw DomainError("target: level must be positive");
  }
}

TargetSet TargetSet::inflated(double delta) const {
  TargetSet out = *this;
  if (auto* b = std::get_if<EndpointBall>(&out.kind)) {
    b->radius += b->outside ? -delta : delta;
  } else {
    std::get<SupExceed>(out.kind).level -= delta;
  }
  out.validate();
  return out;
}

void TargetMonitor::observe(const SpectralField& u) {
  if (const auto* s = std::get_if<SupExceed>(&target_->kind)) {
    sup_ = std::max(sup_, sobolev_norm(u, s->norm));
  } else {
    last_ = u;
  }
}

double TargetMonitor::signed_distance() const {
  if (const auto* s = std::get_if<SupExceed>(&target_->kind)) return s->level - sup_;
  const auto& b = std::get<EndpointBall>(target_->kind);
  const double d = sobolev_norm(final_state_of(last_) - b.center, b.norm);
  return b.outside ? b.radius - d : d - b.radius;
}

double target_violation(const TargetSet& target, const Trajectory& traj) {
  TargetMonitor m(target);
  for (const auto& s : traj.states) m.observe(s);
  return m.violation();
}

double control_energy(const ControlPath& v, const CovarianceSpec& q) {
  v.validate();
  double e = 0.0;
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    const double h = h0_norm(q, v.values[i]);
    e += (v.times[i + 1] - v.times[i]) * h * h;
  }
  return 0.5 * e;
}

Trajectory skeleton_map(const ControlPath& v, const SpectralField& u0, const SimParams& p, const CovarianceSpec& q,
                        const DiffusionSpec& g, const IntegrateOptions& opt) {
  return integrate(u0, p, q, g, Driver{v}, opt);
}

namespace {

// Control coefficients x -> piecewise-constant path. Per interval j and
// control mode m the pair (x_re, x_im) is a coordinate in an H_0-orthonormal
// frame, so the energy is 1/2 sum_j dt_j |x_j|^2.
struct ControlBasis {
  GridPtr grid;
  std::vector<std::size_t> modes;
  std::vector<double> scale;  // sqrt(q_k / 2) / |k|
  std::size_t intervals = 0;
  double T = 0.0;

  std::size_t dim() const { return 2 * modes.size() * intervals; }
  double interval_length() const { return T / static_cast<double>(intervals); }

  ControlPath path(const double* x) const {
    ControlPath out = ControlPath::zero(grid, T, intervals);
    for (std::size_t j = 0; j < intervals; ++j) {
      std::vector<Complex> half(grid->size());
      for (std::size_t m = 0; m < modes.size(); ++m) {
        const std::size_t o = 2 * (j * modes.size() + m);
        half[modes[m]] = scale[m] * Complex(x[o], x[o + 1]);
      }
      out.values[j] = SpectralField(grid, FieldKind::DivFreeVector, std::move(half));
    }
    return out;
  }

  double energy(const double* x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += x[i] * x[i];
    return 0.5 * interval_length() * s;
  }
};

struct Problem {
  const TargetSet* target;
  const SpectralField* u0;
  const SimParams* p;
  const CovarianceSpec* q;
  const DiffusionSpec* g;
  ControlBasis basis;
  double mu = 1.0;
  double fd_step = 1e-6;
  int threads = 1;

  double distance(const double* x) const {
    TargetMonitor monitor(*target);
    monitor.observe(*u0);
    IntegrateOptions io;
    io.record_every = 0;
    io.energy_log = false;
    io.observer = [&](std::size_t, double, const SpectralField& u) { monitor.observe(u); };
    try {
      integrate(*u0, *p, *q, *g, Driver{basis.path(x)}, io);
    } catch (const BlowUp&) {
      return kBlowUpDistance;
    }
    return monitor.signed_distance();
  }

  double objective(const double* x) const {
    const double v = std::max(0.0, distance(x));
    return basis.energy(x) + mu * v * v;
  }

  void gradient(const double* x, double* grad, double* value) const {
    const std::size_t n = basis.dim();
    const double d = distance(x);
    const double v = std::max(0.0, d);
    if (value) *value = basis.energy(x) + mu * v * v;
    const double dt = basis.interval_length();
    for (std::size_t i = 0; i < n; ++i) grad[i] = dt * x[i];
    if (v == 0.0) return;
    // Central differences of the smooth signed distance.
    std::vector<double> plus(n), minus(n);
    parallel_for(2 * n, threads, [&](std::size_t k) {
      const std::size_t i = k / 2;
      std::vector<double> y(x, x + n);
      y[i] += (k % 2 == 0 ? fd_step : -fd_step);
      (k % 2 == 0 ? plus : minus)[i] = distance(y.data());
    });
    for (std::size_t i = 0; i < n; ++i) grad[i] += 2.0 * mu * v * (plus[i] - minus[i]) / (2.0 * fd_step);
  }
};

double gsl_f(const gsl_vector* x, void* ctx) {
  return static_cast<const Problem*>(ctx)->objective(x->data);
}

void gsl_df(const gsl_vector* x, void* ctx, gsl_vector* g) {
  static_cast<const Problem*>(ctx)->gradient(x->data, g->data, nullptr);
}

void gsl_fdf(const gsl_vector* x, void* ctx, double* f, gsl_vector* g) {
  static_cast<const Problem*>(ctx)->gradient(x->data, g->data, f);
}

}  // namespace

RateResult minimize_rate(const TargetSet& target, const SpectralField& u0, const SimParams& p,
                         const CovarianceSpec& q, const DiffusionSpec& g, const OptimizerConfig& opt) {
  p.validate();
  target.validate();
  if (opt.control_intervals == 0 || opt.control_modes == 0) {
    throw DomainError("minimize_rate: control_intervals and control_modes must be positive");
  }
  if (!(opt.feasibility_tol > 0.0) || opt.rounds < 1 || !(opt.mu0 > 0.0) || !(opt.mu_factor >= 1.0)) {
    throw DomainError("minimize_rate: invalid optimizer settings");
  }

  Problem prob{&target, &u0, &p, &q, &g, {}, opt.mu0, opt.fd_step, opt.threads};
  prob.basis.grid = p.grid;
  prob.basis.modes = p.grid->lowest_modes(std::min(opt.control_modes, p.grid->size()));
  for (std::size_t m : prob.basis.modes) {
    prob.basis.scale.push_back(std::sqrt(0.5 * q.eigenvalue(*p.grid, m)) / p.grid->magnitude(m));
  }
  prob.basis.intervals = opt.control_intervals;
  prob.basis.T = p.T;
  const std::size_t n = prob.basis.dim();

  RateResult result;
  std::vector<double> x(n, 0.0);
  const double d0 = prob.distance(x.data());
  if (d0 <= 0.0) {
    result.energy = 0.0;
    result.control = prob.basis.path(x.data());
    result.terminal_residual = 0.0;
    result.converged = true;
    return result;
  }

  gsl_set_error_handler_off();
  gsl_vector* gx = gsl_vector_alloc(n);
  gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
  gsl_multimin_function_fdf fdf{&gsl_f, &gsl_df, &gsl_fdf, n, &prob};

  try {
    for (int round = 0; round < opt.rounds; ++round) {
      prob.mu = opt.mu0 * std::pow(opt.mu_factor, round);
      for (std::size_t i = 0; i < n; ++i) gsl_vector_set(gx, i, x[i]);
      gsl_multimin_fdfminimizer_set(s, &fdf, gx, 0.1, 0.1);
      for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        const int status = gsl_multimin_fdfminimizer_iterate(s);
        ++result.iterations;
        if (status != GSL_SUCCESS) break;
        if (gsl_multimin_test_gradient(s->gradient, opt.gradient_tol) == GSL_SUCCESS) break;
      }
      std::copy(s->x->data, s->x->data + n, x.begin());
    }
  } catch (...) {
    gsl_multimin_fdfminimizer_free(s);
    gsl_vector_free(gx);
    throw;
  }
  gsl_multimin_fdfminimizer_free(s);
  gsl_vector_free(gx);

  result.control = prob.basis.path(x.data());
  result.energy = control_energy(result.control, q);
  result.terminal_residual = std::max(0.0, prob.distance(x.data()));
  result.converged = result.terminal_residual <= opt.feasibility_tol;
  return result;
}

nlohmann::json rate_summary_json(const RateResult& r) {
  return {{"energy", r.energy},
          {"terminal_residual", r.terminal_residual},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"control_intervals", r.control.values.size()}};
}

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (ph + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn));
  // The endpoints are exact at the extremes; the formula leaves round-off there.
  const double lo = hits == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = hits == n ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

LdpPoint estimate_ldp_point(const TargetSet& target, const SpectralField& u0, const SimParams& p,
                            const CovarianceSpec& q, const DiffusionSpec& g, double epsilon, std::size_t n_samples,
                            std::uint64_t seed, int threads) {
  target.validate();
  if (!(epsilon > 0.0)) throw DomainError("estimate_ldp_point: epsilon must be positive");
  if (n_samples == 0) throw DomainError("estimate_ldp_point: n_samples must be positive");
  SimParams pe = p;
  pe.epsilon = epsilon;
  pe.validate();

  std::vector<unsigned char> hit(n_samples, 0);
  parallel_for(n_samples, threads, [&](std::size_t j) {
    TargetMonitor monitor(target);
    monitor.observe(u0);
    IntegrateOptions io;
    io.record_every = 0;
    io.energy_log = false;
    io.observer = [&](std::size_t, double, const SpectralField& u) { monitor.observe(u); };
    const NoiseDriver driver{seed, stream_id(StreamFamily::Trajectory, j), 1};
    try {
      integrate(u0, pe, q, g, Driver{driver}, io);
      hit[j] = monitor.hit();
    } catch (const BlowUp&) {
      // Past the blow-up threshold every sup-level target below it is reached.
      hit[j] = std::holds_alternative<SupExceed>(target.kind) &&
               std::get<SupExceed>(target.kind).level <= kBlowUpThreshold;
    }
  });

  LdpPoint pt;
  pt.epsilon = epsilon;
  pt.samples = n_samples;
  for (auto h : hit) pt.hits += h;
  pt.p_hat = static_cast<double>(pt.hits) / static_cast<double>(n_samples);
  std::tie(pt.wilson_low, pt.wilson_high) = wilson_interval(pt.hits, n_samples);
  pt.zero_hits = pt.hits == 0;
  if (!pt.zero_hits) {
    pt.eps_log_p = epsilon * std::log(pt.p_hat);
    pt.half_width = 0.5 * epsilon * (std::log(pt.wilson_high) - std::log(pt.wilson_low));
  }
  return pt;
}

std::vector<LdpPoint> estimate_ldp_curve(const TargetSet& target, const SpectralField& u0, const SimParams& p,
                                         const CovarianceSpec& q, const DiffusionSpec& g,
                                         const std::vector<double>& epsilons, std::size_t n_samples,
                                         std::uint64_t seed, int threads) {
  for (std::size_t i = 1; i < epsilons.size(); ++i) {
    if (!(epsilons[i] < epsilons[i - 1])) throw DomainError("estimate_ldp_curve: epsilons must be decreasing");
  }
  std::vector<LdpPoint> out;
  for (double e : epsilons) out.push_back(estimate_ldp_point(target, u0, p, q, g, e, n_samples, seed, threads));
  return out;
}

std::optional<double> extrapolate_slope(const std::vector<LdpPoint>& curve) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& c : curve) {
    if (c.eps_log_p) pts.emplace_back(c.epsilon, *c.eps_log_p);
  }
  if (pts.empty()) return std::nullopt;
  if (pts.size() == 1) return pts.front().second;

  const std::size_t cols = pts.size() >= 3 ? 3 : 2;
  gsl_matrix* X = gsl_matrix_alloc(pts.size(), cols);
  gsl_vector* y = gsl_vector_alloc(pts.size());
  gsl_vector* c = gsl_vector_alloc(cols);
  gsl_matrix* cov = gsl_matrix_alloc(cols, cols);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double e = pts[i].first;
    gsl_matrix_set(X, i, 0, 1.0);
    gsl_matrix_set(X, i, 1, e);
    if (cols == 3) gsl_matrix_set(X, i, 2, e * std::log(e));
    gsl_vector_set(y, i, pts[i].second);
  }
  double chisq = 0.0;
  gsl_multifit_linear_workspace* w = gsl_multifit_linear_alloc(pts.size(), cols);
  gsl_multifit_linear(X, y, c, cov, &chisq, w);
  const double c0 = gsl_vector_get(c, 0);
  gsl_multifit_linear_free(w);
  gsl_matrix_free(cov);
  gsl_vector_free(c);
  gsl_vector_free(y);
  gsl_matrix_free(X);
  return c0;
}

SanityReport ldp_sanity_report(const std::optional<double>& rate, const std::optional<double>& rate_interior,
                               const std::optional<double>& rate_closure, const std::vector<LdpPoint>& curve,
                               const SanityOptions& opt) {
  SanityReport r;
  r.rate = rate;
  r.rate_interior = rate_interior ? rate_interior : rate;
  r.rate_closure = rate_closure ? rate_closure : rate;
  r.curve = curve;
  r.tolerance = opt.tolerance;
  r.absolute_floor = opt.absolute_floor;
  r.extrapolated = extrapolate_slope(curve);
  r.band_low = r.rate_interior ? -*r.rate_interior * (1.0 + opt.tolerance) - opt.absolute_floor : -kInf;
  r.band_high = r.rate_closure ? -*r.rate_closure * (1.0 - opt.tolerance) + opt.absolute_floor : -kInf;
  r.pass = r.extrapolated && *r.extrapolated >= r.band_low && *r.extrapolated <= r.band_high;
  r.verdict = r.pass ? "PASS" : "FAIL";
  std::size_t zero = 0;
  for (const auto& c : curve) zero += c.zero_hits;
  if (!r.extrapolated) {
    r.note = "no rung produced hits; only upper bounds are available";
  } else if (zero > 0) {
    r.note = std::to_string(zero) + " rung(s) without hits excluded from the extrapolation";
  }
  return r;
}

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

double finite_or_neg_inf(const nlohmann::json& j) { return j.is_null() ? -kInf : j.get<double>(); }

}  // namespace

nlohmann::json to_json(const LdpPoint& pt) {
  return {{"epsilon", pt.epsilon},       {"samples", pt.samples},
          {"hits", pt.hits},             {"p_hat", pt.p_hat},
          {"wilson_low", pt.wilson_low}, {"wilson_high", pt.wilson_high},
          {"eps_log_p", opt_json(pt.eps_log_p)}, {"half_width", pt.half_width},
          {"zero_hits", pt.zero_hits}};
}

LdpPoint ldp_point_from_json(const nlohmann::json& j) {
  try {
    LdpPoint pt;
    pt.epsilon = j.at("epsilon").get<double>();
    pt.samples = j.at("samples").get<std::size_t>();
    pt.hits = j.at("hits").get<std::size_t>();
    pt.p_hat = j.at("p_hat").get<double>();
    pt.wilson_low = j.at("wilson_low").get<double>();
    pt.wilson_high = j.at("wilson_high").get<double>();
    pt.eps_log_p = opt_from(j, "eps_log_p");
    pt.half_width = j.at("half_width").get<double>();
    pt.zero_hits = j.at("zero_hits").get<bool>();
    return pt;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("ldp point: ") + e.what());
  }
}

nlohmann::json to_json(const SanityReport& r) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& c : r.curve) curve.push_back(to_json(c));
  return {{"rate", opt_json(r.rate)},
          {"rate_interior", opt_json(r.rate_interior)},
          {"rate_closure", opt_json(r.rate_closure)},
          {"curve", curve},
          {"extrapolated", opt_json(r.extrapolated)},
          {"band", {opt_json(r.band_low), opt_json(r.band_high)}},
          {"tolerance", r.tolerance},
          {"absolute_floor", r.absolute_floor},
          {"pass", r.pass},
          {"verdict", r.verdict},
          {"note", r.note}};
}

SanityReport sanity_report_from_json(const nlohmann::json& j) {
  try {
    SanityReport r;
    r.rate = opt_from(j, "rate");
    r.rate_interior = opt_from(j, "rate_interior");
    r.rate_closure = opt_from(j, "rate_closure");
    for (const auto& c : j.at("curve")) r.curve.push_back(ldp_point_from_json(c));
    r.extrapolated = opt_from(j, "extrapolated");
    const auto& band = j.at("band");
    if (!band.is_array() || band.size() != 2) throw FormatError("sanity report: band must have two entries");
    r.band_low = finite_or_neg_inf(band[0]);
    r.band_high = finite_or_neg_inf(band[1]);
    r.tolerance = j.at("tolerance").get<double>();
    r.absolute_floor = j.at("absolute_floor").get<double>();
    r.pass = j.at("pass").get<bool>();
    r.verdict = j.at("verdict").get<std::string>();
    r.note = j.at("note").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("sanity report: ") + e.what());
  }
}

}  // namespace fsns
