#include "levyshe/mild_solver.hpp"

#include "levyshe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace levyshe {

SigmaSpec constant_sigma(double value)
{
  std::ostringstream name;
  name << "const(" << value << ")";
  return { name.str(), [value](double) { return value; }, [](double) { return 0.0; },
           0.0, value };
}

SigmaSpec sine_sigma(double a, double b)
{
  std::ostringstream name;
  name << a << "+" << b << "*sin(u)";
  return { name.str(), [a, b](double u) { return a + b * std::sin(u); },
           [b](double u) { return b * std::cos(u); }, std::abs(b), a - std::abs(b) };
}

void validate_sigma(const SigmaSpec& s)
{
  if (!s.sigma || !s.sigma_prime)
    throw ConfigError("sigma and sigma' must both be set");
  const double h = 0.01;
  const double fd = 1e-5;
  double prev = s.sigma(-50.0);
  for (int j = 1; j <= 10000; ++j) {
    const double u = -50.0 + h * j;
    const double v = s.sigma(u);
    if (!std::isfinite(v))
      throw ConfigError("sigma is not finite at u = " + std::to_string(u));
    if (v < s.kappa - 1e-12)
      throw ConfigError("sigma falls below its lower bound kappa at u = " +
                        std::to_string(u));
    if (std::abs(v - prev) > s.lip * h * (1.0 + 1e-9) + 1e-14)
      throw ConfigError("sigma exceeds its Lipschitz constant near u = " +
                        std::to_string(u));
    const double central = (s.sigma(u + fd) - s.sigma(u - fd)) / (2.0 * fd);
    if (std::abs(central - s.sigma_prime(u)) > 1e-5 * (1.0 + std::abs(central)))
      throw ConfigError("sigma' disagrees with a difference quotient of sigma at u = " +
                        std::to_string(u));
    prev = v;
  }
}

GridProbe probe_at(const GridSpec& grid, double t, double x)
{
  const double kd = std::round(t / grid.dt());
  const double id = std::round(x / grid.dx());
  if (kd < 0.0 || kd > static_cast<double>(grid.k_time) ||
      std::abs(kd * grid.dt() - t) > 1e-9 * std::max(1.0, std::abs(t)))
    throw ConfigError("probe time " + std::to_string(t) + " is not a grid time");
  if (id < 0.0 || id >= static_cast<double>(grid.m_space) ||
      std::abs(id * grid.dx() - x) > 1e-9 * std::max(1.0, std::abs(x)))
    throw ConfigError("probe point " + std::to_string(x) + " is not a grid point");
  return { static_cast<std::size_t>(kd), static_cast<std::size_t>(id) };
}

void RunConfig::validate() const
{
  grid.validate();
  if (u0.size() != grid.m_space)
    throw ConfigError("initial field has " + std::to_string(u0.size()) +
                      " points, grid has " + std::to_string(grid.m_space));
  if (replicas < 1)
    throw ConfigError("replicas must be at least 1");
  if (workers < 1)
    throw ConfigError("workers must be at least 1");
  for (const auto& p : probes)
    if (p.k > grid.k_time || p.i >= grid.m_space)
      throw ConfigError("probe outside the grid");
  validate_sigma(sigma);
}

SchemeOperator::SchemeOperator(const LevyExponent& exponent, const GridSpec& grid)
  : grid_(grid)
  , fft_(grid.m_space)
  , decay_(fft_.spectrum_size())
  , filter_(fft_.spectrum_size())
  , scratch_(fft_.spectrum_size())
{
  grid_.validate();
  const double dt = grid_.dt();
  const std::size_t m = grid_.m_space;
  for (std::size_t j = 0; j < decay_.size(); ++j) {
    const auto phi = exponent(static_cast<long>(j));
    const double a = phi.real();
    const double mag = a > 0.0 ? std::sqrt(-std::expm1(-2.0 * a * dt) / (2.0 * a * dt)) : 1.0;
    decay_[j] = std::exp(-dt * phi);
    filter_[j] = std::polar(mag, -dt * phi.imag());
    if (j == 0 || (m % 2 == 0 && j == m / 2)) {
      decay_[j] = decay_[j].real();
      filter_[j] = filter_[j].real();
    }
  }
}

void SchemeOperator::to_spectrum(std::span<const double> values,
                                 std::span<std::complex<double>> out)
{
  fft_.forward(values, out);
}

void SchemeOperator::to_values(std::span<const std::complex<double>> spectrum,
                               std::span<double> out)
{
  fft_.inverse(spectrum, out);
  const double inv = 1.0 / static_cast<double>(grid_.m_space);
  for (double& v : out)
    v *= inv;
}

void SchemeOperator::advance(std::span<std::complex<double>> spectrum,
                             std::span<const double> density)
{
  fft_.forward(density, scratch_);
  for (std::size_t j = 0; j < spectrum.size(); ++j)
    spectrum[j] = decay_[j] * spectrum[j] + filter_[j] * scratch_[j];
}

void SchemeOperator::apply(std::span<const std::complex<double>> mult,
                           std::span<const double> v, std::span<double> out,
                           bool transpose)
{
  fft_.forward(v, scratch_);
  for (std::size_t j = 0; j < scratch_.size(); ++j)
    scratch_[j] *= transpose ? std::conj(mult[j]) : mult[j];
  to_values(scratch_, out);
}

void SchemeOperator::apply_decay(std::span<const double> v, std::span<double> out,
                                 bool transpose)
{
  apply(decay_, v, out, transpose);
}

void SchemeOperator::apply_filter(std::span<const double> v, std::span<double> out,
                                  bool transpose)
{
  apply(filter_, v, out, transpose);
}

void noise_density(const GridSpec& grid, const SigmaSpec& sigma,
                   std::span<const double> u, std::span<const double> xi,
                   std::span<double> density)
{
  const double scale = std::sqrt(grid.dt() * grid.dx()) / grid.dx();
  for (std::size_t i = 0; i < u.size(); ++i)
    density[i] = sigma.sigma(u[i]) * xi[i] * scale;
}

void check_blowup(std::size_t k, std::span<const double> u)
{
  double worst = 0.0;
  for (double v : u) {
    if (!std::isfinite(v))
      throw BlowUpError(k, v);
    worst = std::max(worst, std::abs(v));
  }
  if (worst > kBlowUpThreshold)
    throw BlowUpError(k, worst);
}

FieldState initial_state(SchemeOperator& op, const SpectralField& u0)
{
  if (u0.size() != op.grid().m_space)
    throw ConfigError("initial field does not match the grid");
  FieldState s;
  s.k = 0;
  s.values.assign(u0.values().begin(), u0.values().end());
  s.spectrum.resize(op.grid().m_space / 2 + 1);
  op.to_spectrum(s.values, s.spectrum);
  return s;
}

FieldState step(const FieldState& state, std::span<const double> noise_row,
                SchemeOperator& op, const SigmaSpec& sigma)
{
  FieldState next = state;
  std::vector<double> density(state.values.size());
  noise_density(op.grid(), sigma, state.values, noise_row, density);
  op.advance(next.spectrum, density);
  op.to_values(next.spectrum, next.values);
  next.k = state.k + 1;
  check_blowup(next.k, next.values);
  return next;
}

Trajectory solve_path(const RunConfig& config, const NoiseField& noise,
                      SchemeOperator& op)
{
  const auto& g = config.grid;
  const std::size_t m = g.m_space;
  Trajectory path{ g, std::vector<double>((g.k_time + 1) * m) };
  FieldState s = initial_state(op, config.u0);
  std::copy(s.values.begin(), s.values.end(), path.data.begin());
  std::vector<double> density(m);
  for (std::size_t k = 0; k < g.k_time; ++k) {
    noise_density(g, config.sigma, s.values, noise.row(k), density);
    op.advance(s.spectrum, density);
    op.to_values(s.spectrum, s.values);
    check_blowup(k + 1, s.values);
    std::copy(s.values.begin(), s.values.end(), path.data.begin() + (k + 1) * m);
  }
  return path;
}

Trajectory solve_path(const RunConfig& config, std::uint64_t replica)
{
  SchemeOperator op(config.exponent, config.grid);
  return solve_path(config, sample_noise(config.grid, config.seed, replica), op);
}

std::vector<double> solve_probes(const RunConfig& config, std::uint64_t replica,
                                 SchemeOperator& op)
{
  const auto& g = config.grid;
  const std::size_t m = g.m_space;
  std::vector<double> out(config.probes.size());
  FieldState s = initial_state(op, config.u0);
  const auto record = [&](std::size_t k) {
    for (std::size_t p = 0; p < config.probes.size(); ++p)
      if (config.probes[p].k == k)
        out[p] = s.values[config.probes[p].i];
  };
  record(0);
  std::size_t last = 0;
  for (const auto& p : config.probes)
    last = std::max(last, p.k);
  std::vector<double> xi(m), density(m);
  for (std::size_t k = 0; k < last; ++k) {
    for (std::size_t i = 0; i < m; ++i)
      xi[i] = normal_variate(config.seed, replica, k, i);
    noise_density(g, config.sigma, s.values, xi, density);
    op.advance(s.spectrum, density);
    op.to_values(s.spectrum, s.values);
    check_blowup(k + 1, s.values);
    record(k + 1);
  }
  return out;
}

WeightedNorm weighted_norm(std::span<const MomentSample> samples, double rate, double p)
{
  if (!(p >= 2.0))
    throw ConfigError("weighted norm needs p >= 2");
  if (!(rate >= 0.0))
    throw ConfigError("weighted norm needs a nonnegative rate");
  if (samples.empty())
    throw ConfigError("weighted norm needs at least one sample");
  std::size_t best = 0;
  double best_w = -1.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double w = std::exp(-rate * samples[j].t) * samples[j].moment;
    if (w > best_w) {
      best_w = w;
      best = j;
    }
  }
  const double weight = std::exp(-rate * samples[best].t);
  const double value = std::pow(best_w, 1.0 / p);
  const double se = best_w > 0.0
                      ? value / (p * best_w) * weight * samples[best].std_error
                      : 0.0;
  return { value, se, best };
}

PicardReport picard_sequence(const RunConfig& config, std::size_t n_max, double rate,
                             double p)
{
  config.validate();
  if (n_max < 2)
    throw ConfigError("picard needs n_max >= 2");
  if (!(p >= 2.0))
    throw ConfigError("picard needs p >= 2");
  const auto& g = config.grid;
  const std::size_t m = g.m_space;
  const std::size_t nodes = (g.k_time + 1) * m;

  auto moments = reduce_replicas(
    config.replicas, n_max * nodes, config.workers,
    [&] { return SchemeOperator(config.exponent, g); },
    [&](SchemeOperator& op, std::size_t r, std::span<double> out) {
      const NoiseField noise = sample_noise(g, config.seed, r);
      std::vector<double> prev(nodes), next(nodes), density(m);
      std::vector<std::complex<double>> spec(m / 2 + 1);
      const auto u0 = config.u0.values();

      std::copy(u0.begin(), u0.end(), prev.begin());
      op.to_spectrum(u0, spec);
      for (std::size_t k = 0; k < g.k_time; ++k) {
        for (std::size_t j = 0; j < spec.size(); ++j)
          spec[j] = op.decay()[j] * spec[j];
        op.to_values(spec, std::span<double>(prev).subspan((k + 1) * m, m));
      }

      for (std::size_t n = 0; n < n_max; ++n) {
        std::copy(u0.begin(), u0.end(), next.begin());
        op.to_spectrum(u0, spec);
        for (std::size_t k = 0; k < g.k_time; ++k) {
          noise_density(g, config.sigma, std::span<const double>(prev).subspan(k * m, m),
                        noise.row(k), density);
          op.advance(spec, density);
          auto slice = std::span<double>(next).subspan((k + 1) * m, m);
          op.to_values(spec, slice);
          check_blowup(k + 1, slice);
        }
        for (std::size_t j = 0; j < nodes; ++j)
          out[n * nodes + j] = std::pow(std::abs(next[j] - prev[j]), p);
        std::swap(prev, next);
      }
    });

  PicardReport report{ rate, p, moments.count, moments.blowups, {} };
  if (moments.count == 0)
    throw NumericalError("every picard replica blew up");
  std::vector<MomentSample> samples(nodes);
  for (std::size_t n = 0; n < n_max; ++n) {
    for (std::size_t j = 0; j < nodes; ++j) {
      const std::size_t k = j / m;
      samples[j] = { g.t(k), g.x(j % m), moments.mean[n * nodes + j],
                     moments.stderr_of(n * nodes + j) };
    }
    const auto w = weighted_norm(samples, rate, p);
    PicardRow row{ n, w.value, w.std_error, std::nan(""), samples[w.argmax].t,
                   samples[w.argmax].x };
    if (n > 0 && report.rows.back().norm > 0.0)
      row.ratio = w.value / report.rows.back().norm;
    report.rows.push_back(row);
  }
  return report;
}

} // namespace levyshe
