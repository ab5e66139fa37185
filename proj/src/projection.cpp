#include "dopmeter/projection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "dopmeter/error.hpp"

namespace dopmeter {

namespace {

using Vec2 = std::array<double, 2>;

constexpr double kDeg = std::numbers::pi / 180.0;

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Crystal frame rotated by `frame` from the lab. Returns the field along the
// crystal's y axis, which is where the type-II SFG wave is generated.
// Desired process: wave 1 on crystal x, wave 2 on crystal y; the perturbing
// one swaps them with weight alpha.
double crystal_response(const Vec2& u1, const Vec2& u2, double frame, double alpha) {
  const Vec2 cx = unit(frame);
  const Vec2 cy = unit(frame + std::numbers::pi / 2);
  return dot(u1, cx) * dot(u2, cy) + alpha * dot(u1, cy) * dot(u2, cx);
}

// Same for a single coherent input (SHG of the summed field).
double crystal_response_shg(const Vec2& u, double frame) {
  const Vec2 cx = unit(frame);
  const Vec2 cy = unit(frame + std::numbers::pi / 2);
  return dot(u, cx) * dot(u, cy);
}

// Crystal 2 output is reported along +R(err) x, i.e. the negated crystal-2
// y axis, so nominal amplitudes match the sign of the crystal-1 form.
FieldPair assemble(double f1, double f2, double crystal2_err) {
  FieldPair out;
  out.e_y = f1;
  out.axis_y = {0.0, 1.0};
  out.e_x = -f2;
  out.axis_x = unit(crystal2_err);
  return out;
}

void parallel_for(std::size_t n, unsigned threads, auto&& body) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
}

std::int64_t poisson_draw(double mean, std::uint64_t s0, std::uint64_t s1, std::uint64_t s2) {
  if (!(mean > 0.0)) return 0;
  std::seed_seq seq{static_cast<std::uint32_t>(s0), static_cast<std::uint32_t>(s0 >> 32),
                    static_cast<std::uint32_t>(s1), static_cast<std::uint32_t>(s2)};
  std::mt19937_64 rng(seq);
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

}  // namespace

void SourceConfig::validate() const {
  pol.validate();
  if (!(lambda1 > 0.0) || !(lambda2 >= lambda1))
    throw InvalidArgument("source needs 0 < lambda1 <= lambda2");
}

void InstrumentConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidArgument(fmt::format("alpha must lie in [0, 1] (got {})", alpha));
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw InvalidArgument(fmt::format("visibility must lie in [0, 1] (got {})", visibility));
  if (!(count_scale >= 0.0) || !(dark_rate >= 0.0))
    throw InvalidArgument("count_scale and dark_rate must be >= 0");
  for (double a : {crystal2_rot_err, waveplate_axis_err, waveplate_retardance, polarizer_angle})
    if (!std::isfinite(a)) throw InvalidArgument("instrument angles must be finite");
}

FieldPair sfg_amplitudes(const SourceConfig& src, const InstrumentConfig& cfg) {
  cfg.validate();
  const auto& p = src.pol;
  const Vec2 u1{p.e1 * std::cos(p.theta), p.e1 * std::sin(p.theta)};
  const Vec2 u2{p.e2 * std::cos(p.theta + p.phi), p.e2 * std::sin(p.theta + p.phi)};
  const double frame2 = std::numbers::pi / 2 + cfg.crystal2_rot_err;
  return assemble(crystal_response(u1, u2, 0.0, cfg.alpha),
                  crystal_response(u1, u2, frame2, cfg.alpha), cfg.crystal2_rot_err);
}

FieldPair degenerate_amplitudes(const SourceConfig& src, const InstrumentConfig& cfg) {
  if (src.lambda1 != src.lambda2)
    throw InvalidArgument("degenerate amplitudes need lambda1 == lambda2");
  const auto& p = src.pol;
  const Vec2 u{p.e1 * std::cos(p.theta) + p.e2 * std::cos(p.theta + p.phi),
               p.e1 * std::sin(p.theta) + p.e2 * std::sin(p.theta + p.phi)};
  const double frame2 = std::numbers::pi / 2 + cfg.crystal2_rot_err;
  return assemble(crystal_response_shg(u, 0.0), crystal_response_shg(u, frame2),
                  cfg.crystal2_rot_err);
}

double detect_intensity(const FieldPair& f, const InstrumentConfig& cfg) {
  // Retarder R(psi) diag(1, e^{i Gamma}) R(-psi), then projection on the
  // analyzer axis. Each crystal's field is propagated on its own.
  const Complex phase = std::polar(1.0, cfg.waveplate_retardance);
  const double psi = cfg.waveplate_axis_err;
  const Vec2 fast = unit(psi);
  const Vec2 slow = unit(psi + std::numbers::pi / 2);
  const Vec2 analyzer = unit(cfg.polarizer_angle);
  auto through = [&](Complex amp, const Vec2& axis) {
    return amp * (dot(axis, fast) * dot(analyzer, fast) +
                  phase * dot(axis, slow) * dot(analyzer, slow));
  };
  const Complex a = through(f.e_y, f.axis_y);
  const Complex b = through(f.e_x, f.axis_x);
  return std::norm(a) + std::norm(b) + 2.0 * cfg.visibility * (a * std::conj(b)).real();
}

double singlet_intensity(const SourceConfig& src, const InstrumentConfig& cfg) {
  return detect_intensity(sfg_amplitudes(src, cfg), cfg);
}

std::int64_t simulate_counts(const SourceConfig& src, const InstrumentConfig& cfg,
                             double integration_time, std::uint64_t seed) {
  if (!(integration_time >= 0.0)) throw InvalidArgument("integration time must be >= 0");
  const double mean =
      (cfg.count_scale * singlet_intensity(src, cfg) + cfg.dark_rate) * integration_time;
  return poisson_draw(mean, seed, 0, 0);
}

PhiStats stats_over_theta(std::span<const double> m, std::size_t n_theta, std::size_t n_phi) {
  PhiStats s{std::vector<double>(n_phi, 0.0), std::vector<double>(n_phi, 0.0)};
  if (n_theta == 0) return s;
  for (std::size_t ip = 0; ip < n_phi; ++ip) {
    double sum = 0.0;
    for (std::size_t it = 0; it < n_theta; ++it) sum += m[it * n_phi + ip];
    const double mean = sum / static_cast<double>(n_theta);
    double ss = 0.0;
    for (std::size_t it = 0; it < n_theta; ++it) {
      const double d = m[it * n_phi + ip] - mean;
      ss += d * d;
    }
    s.mean[ip] = mean;
    s.stddev[ip] = std::sqrt(ss / static_cast<double>(n_theta));
  }
  return s;
}

SweepResult sweep(const SourceConfig& tmpl, const InstrumentConfig& cfg,
                  std::span<const double> theta_set, std::span<const double> phi_set,
                  const SweepOptions& opts) {
  if (theta_set.empty() || phi_set.empty()) throw InvalidArgument("sweep grids must be non-empty");
  if (!(opts.integration_time >= 0.0)) throw InvalidArgument("integration time must be >= 0");
  tmpl.validate();
  cfg.validate();

  SweepResult r;
  r.theta.assign(theta_set.begin(), theta_set.end());
  r.phi.assign(phi_set.begin(), phi_set.end());
  const std::size_t n = r.n_theta() * r.n_phi();
  r.intensity.resize(n);
  r.expected.resize(n);
  r.counts.resize(n);

  parallel_for(n, opts.threads, [&](std::size_t cell) {
    const std::size_t it = cell / r.n_phi();
    const std::size_t ip = cell % r.n_phi();
    SourceConfig src = tmpl;
    src.pol.theta = r.theta[it];
    src.pol.phi = r.phi[ip];
    const double intensity = singlet_intensity(src, cfg);
    const double mean = (cfg.count_scale * intensity + cfg.dark_rate) * opts.integration_time;
    r.intensity[cell] = intensity;
    r.expected[cell] = mean;
    r.counts[cell] = static_cast<double>(poisson_draw(mean, opts.seed, it + 1, ip + 1));
  });

  r.intensity_stats = stats_over_theta(r.intensity, r.n_theta(), r.n_phi());
  r.expected_stats = stats_over_theta(r.expected, r.n_theta(), r.n_phi());
  r.count_stats = stats_over_theta(r.counts, r.n_theta(), r.n_phi());
  return r;
}

std::vector<double> default_theta_grid() {
  std::vector<double> g;
  for (int i = 0; i < 5; ++i) g.push_back(22.5 * i * kDeg);
  return g;
}

std::vector<double> default_phi_grid() {
  std::vector<double> g;
  for (int i = 0; i < 13; ++i) g.push_back((-90.0 + 15.0 * i) * kDeg);
  return g;
}

}  // namespace dopmeter
