#include "levyshe/malliavin.hpp"

#include "levyshe/errors.hpp"
#include "levyshe/parallel.hpp"
#include "levyshe/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace levyshe {

namespace {

constexpr double kWilsonZ = 1.959963984540054;

// Number of source steps inside [t - delta, t).
std::size_t tail_steps(const GridSpec& grid, std::size_t k_final, double delta)
{
  const double steps = std::round(delta / grid.dt());
  if (steps <= 0.0)
    return 0;
  return std::min<std::size_t>(k_final, static_cast<std::size_t>(steps));
}

void check_deltas(std::span<const double> deltas)
{
  for (double d : deltas)
    if (!(d > 0.0))
      throw ConfigError("tail widths delta must be positive");
}

// One weighted source cell per block of `stride` cells in time and space.
struct StridedSum
{
  double total;
  std::vector<double> tails;
};

StridedSum forward_sum(const Trajectory& path, const NoiseField& noise,
                       SchemeOperator& op, const SigmaSpec& sigma, GridProbe probe,
                       std::size_t stride, std::span<const double> deltas)
{
  const auto& g = path.grid;
  CompensatedSum total;
  std::vector<CompensatedSum> tails(deltas.size());
  std::vector<std::size_t> tail_start(deltas.size());
  for (std::size_t d = 0; d < deltas.size(); ++d)
    tail_start[d] = probe.k - tail_steps(g, probe.k, deltas[d]);
  for (std::size_t ks = 0; ks < probe.k; ks += stride) {
    const std::size_t wk = std::min(stride, probe.k - ks);
    for (std::size_t is = 0; is < g.m_space; is += stride) {
      const std::size_t wi = std::min(stride, g.m_space - is);
      const auto st = propagate_derivative(path, noise, op, sigma, { ks, is }, probe.k);
      const double v = st.values[probe.i];
      const double c = v * v * g.dt() * g.dx() * static_cast<double>(wk * wi);
      total.add(c);
      for (std::size_t d = 0; d < deltas.size(); ++d)
        if (ks >= tail_start[d])
          tails[d].add(c);
    }
  }
  StridedSum out{ total.value(), {} };
  for (auto& t : tails)
    out.tails.push_back(t.value());
  return out;
}

} // namespace

MalliavinState propagate_derivative(const Trajectory& path, const NoiseField& noise,
                                    SchemeOperator& op, const SigmaSpec& sigma,
                                    SourceCell source, std::size_t k_final)
{
  const auto& g = path.grid;
  const std::size_t m = g.m_space;
  if (k_final > g.k_time || source.i >= m)
    throw ConfigError("source or final time outside the grid");
  MalliavinState st{ source, k_final, std::vector<double>(m, 0.0) };
  if (source.k >= k_final)
    return st;

  const double dx = g.dx();
  const double cell = std::sqrt(g.dt() * dx);
  std::vector<double> w(m, 0.0);
  std::vector<std::complex<double>> spec(m / 2 + 1);
  w[source.i] = sigma.sigma(path.value(source.k, source.i)) / dx;
  op.advance(spec, w);
  op.to_values(spec, st.values);
  for (std::size_t k = source.k + 1; k < k_final; ++k) {
    const auto u = path.at(k);
    const auto xi = noise.row(k);
    for (std::size_t i = 0; i < m; ++i)
      w[i] = sigma.sigma_prime(u[i]) * xi[i] * cell / dx * st.values[i];
    op.advance(spec, w);
    op.to_values(spec, st.values);
    check_blowup(k + 1, st.values);
  }
  return st;
}

OracleResult noise_gradient_oracle(const RunConfig& config, std::uint64_t replica,
                                   SourceCell source, GridProbe probe, double h)
{
  if (!(h > 0.0))
    throw ConfigError("oracle step h must be positive");
  const auto& g = config.grid;
  if (source.k >= g.k_time || source.i >= g.m_space || probe.k > g.k_time ||
      probe.i >= g.m_space)
    throw ConfigError("oracle source or probe outside the grid");
  SchemeOperator op(config.exponent, g);
  const NoiseField noise = sample_noise(g, config.seed, replica);
  const double cell = std::sqrt(g.dt() * g.dx());
  double scale = 0.0;
  const auto quotient = [&](double step) {
    const double up =
      solve_path(config, noise.perturbed(source.k, source.i, step), op).value(probe.k, probe.i);
    const double down =
      solve_path(config, noise.perturbed(source.k, source.i, -step), op).value(probe.k, probe.i);
    scale = std::max({ scale, std::abs(up), std::abs(down) });
    return (up - down) / (2.0 * step) / cell;
  };
  OracleResult r{};
  r.h = h;
  r.quotient_h = quotient(h);
  r.quotient_half = quotient(0.5 * h);
  r.value = (4.0 * r.quotient_half - r.quotient_h) / 3.0;
  const double roundoff =
    64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale) / (h * cell);
  const double gap = std::abs(r.quotient_h - r.quotient_half);
  r.consistent =
    gap <= 1e-3 * std::max(std::abs(r.quotient_h), std::abs(r.quotient_half)) + roundoff;
  return r;
}

HNormReport hnorm_sq(std::span<const MalliavinState> states, const GridSpec& grid,
                     GridProbe probe, std::span<const double> deltas,
                     std::uint64_t replica)
{
  check_deltas(deltas);
  HNormReport rep{ grid.t(probe.k), grid.x(probe.i), replica, 0.0, {}, 1, 0.0 };
  CompensatedSum total;
  std::vector<CompensatedSum> tails(deltas.size());
  for (const auto& st : states) {
    if (st.k != probe.k)
      throw ConfigError("derivative states must share the probe time");
    const double v = st.values.at(probe.i);
    const double c = v * v * grid.dt() * grid.dx();
    total.add(c);
    for (std::size_t d = 0; d < deltas.size(); ++d)
      if (st.source.k < probe.k &&
          st.source.k >= probe.k - tail_steps(grid, probe.k, deltas[d]))
        tails[d].add(c);
  }
  rep.hnorm_sq = total.value();
  rep.hnorm_sq_half_stride = rep.hnorm_sq;
  for (std::size_t d = 0; d < deltas.size(); ++d)
    rep.tails.push_back({ deltas[d], tails[d].value() });
  return rep;
}

HNormReport hnorm_forward(const Trajectory& path, const NoiseField& noise,
                          SchemeOperator& op, const SigmaSpec& sigma, GridProbe probe,
                          std::size_t stride, std::span<const double> deltas)
{
  check_deltas(deltas);
  if (stride < 1)
    throw ConfigError("source stride must be at least 1");
  const auto& g = path.grid;
  const auto full = forward_sum(path, noise, op, sigma, probe, stride, deltas);
  HNormReport rep{ g.t(probe.k), g.x(probe.i), noise.replica(), full.total, {}, stride,
                   full.total };
  if (stride > 1)
    rep.hnorm_sq_half_stride =
      forward_sum(path, noise, op, sigma, probe, stride / 2, {}).total;
  for (std::size_t d = 0; d < deltas.size(); ++d)
    rep.tails.push_back({ deltas[d], full.tails[d] });
  return rep;
}

std::vector<double> derivative_field_adjoint(const Trajectory& path,
                                             const NoiseField& noise,
                                             SchemeOperator& op, const SigmaSpec& sigma,
                                             GridProbe probe)
{
  const auto& g = path.grid;
  const std::size_t m = g.m_space;
  if (probe.k > g.k_time || probe.i >= m)
    throw ConfigError("probe outside the grid");
  std::vector<double> field(g.k_time * m, 0.0);
  if (probe.k == 0)
    return field;
  const double dx = g.dx();
  const double cell = std::sqrt(g.dt() * dx);
  std::vector<double> lambda(m, 0.0), mu(m), next(m);
  lambda[probe.i] = 1.0;
  for (std::size_t k = probe.k; k-- > 0;) {
    const auto u = path.at(k);
    op.apply_filter(lambda, mu, true);
    for (std::size_t i = 0; i < m; ++i)
      field[k * m + i] = sigma.sigma(u[i]) * mu[i] / dx;
    if (k == 0)
      break;
    op.apply_decay(lambda, next, true);
    const auto xi = noise.row(k);
    for (std::size_t i = 0; i < m; ++i)
      next[i] += sigma.sigma_prime(u[i]) * xi[i] * cell / dx * mu[i];
    std::swap(lambda, next);
    check_blowup(k, lambda);
  }
  return field;
}

HNormReport hnorm_adjoint(const Trajectory& path, const NoiseField& noise,
                          SchemeOperator& op, const SigmaSpec& sigma, GridProbe probe,
                          std::span<const double> deltas)
{
  check_deltas(deltas);
  const auto& g = path.grid;
  const std::size_t m = g.m_space;
  const auto field = derivative_field_adjoint(path, noise, op, sigma, probe);
  std::vector<double> per_step(probe.k);
  for (std::size_t k = 0; k < probe.k; ++k) {
    CompensatedSum s;
    for (std::size_t i = 0; i < m; ++i)
      s.add(field[k * m + i] * field[k * m + i]);
    per_step[k] = s.value() * g.dt() * g.dx();
  }
  HNormReport rep{ g.t(probe.k), g.x(probe.i), noise.replica(), 0.0, {}, 1, 0.0 };
  rep.hnorm_sq = compensated_sum(per_step);
  rep.hnorm_sq_half_stride = rep.hnorm_sq;
  for (double d : deltas) {
    const std::size_t n = tail_steps(g, probe.k, d);
    rep.tails.push_back(
      { d, compensated_sum(std::span<const double>(per_step).subspan(probe.k - n, n)) });
  }
  return rep;
}

HNormSamples hnorm_samples(const RunConfig& config, GridProbe probe)
{
  config.validate();
  std::vector<std::optional<double>> slot(config.replicas);
  std::vector<std::optional<BlowUpRecord>> failed(config.replicas);
  parallel_for(
    config.replicas, config.workers,
    [&] { return SchemeOperator(config.exponent, config.grid); },
    [&](SchemeOperator& op, std::size_t r) {
      try {
        const NoiseField noise = sample_noise(config.grid, config.seed, r);
        const Trajectory path = solve_path(config, noise, op);
        slot[r] = hnorm_adjoint(path, noise, op, config.sigma, probe, {}).hnorm_sq;
      } catch (const BlowUpError& e) {
        failed[r] = BlowUpRecord{ r, e.step(), e.max_abs() };
      }
    });
  HNormSamples out;
  for (std::size_t r = 0; r < config.replicas; ++r) {
    if (slot[r]) {
      out.values.push_back(*slot[r]);
      out.replicas.push_back(r);
    } else if (failed[r]) {
      out.blowups.push_back(*failed[r]);
    }
  }
  return out;
}

SeriesResult jdelta(const LevyExponent& exponent, double kappa, double delta, double tol)
{
  if (!(delta > 0.0))
    throw ConfigError("J_delta needs delta > 0");
  const double f = 0.5 * kappa * kappa;
  auto w = walsh_variance(exponent, delta, tol);
  return { f * w.value, f * w.tail_bound, w.terms };
}

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n)
{
  if (n == 0)
    return { 0.0, 1.0 };
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(hits) / nn;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / nn;
  const double centre = (ph + z2 / (2.0 * nn)) / denom;
  const double half =
    kWilsonZ * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
  const double lo = hits == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = hits == n ? 1.0 : std::min(1.0, centre + half);
  return { lo, hi };
}

SmallBallReport smallball_from_samples(std::span<const double> samples,
                                       std::span<const double> eps_list,
                                       const LevyExponent& exponent, double kappa,
                                       double t)
{
  if (!(kappa > 0.0))
    throw ConfigError("small-ball diagnostics need sigma >= kappa > 0");
  if (!(t > 0.0))
    throw ConfigError("small-ball diagnostics need t > 0");
  const double beta = exponent.envelope().beta;
  const double power = 1.0 - 1.0 / beta;

  double a1 = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= 20; ++j) {
    const double d = t * std::pow(10.0, -4.0 + 0.2 * j);
    a1 = std::min(a1, walsh_variance(exponent, d, 1e-9).value / std::pow(d, power));
  }
  SmallBallReport rep{ t, kappa * kappa * a1, {}, {} };

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  for (double eps : eps_list) {
    if (!(eps > 0.0))
      throw ConfigError("small-ball levels eps must be positive");
    SmallBallRow row{};
    row.eps = eps;
    row.samples = sorted.size();
    row.hits = static_cast<std::size_t>(
      std::lower_bound(sorted.begin(), sorted.end(), eps) - sorted.begin());
    const auto [lo, hi] = wilson_interval(row.hits, row.samples);
    row.ci_low = lo;
    row.ci_high = hi;
    row.upper_bound_only = row.hits == 0;
    row.probability = row.hits == 0 ? hi
                                    : static_cast<double>(row.hits) /
                                        static_cast<double>(row.samples);
    const double d = std::pow(4.0 * eps / rep.c_constant, beta / (beta - 1.0));
    row.delta_capped = d > t;
    row.delta = std::min(d, t);
    row.jdelta = jdelta(exponent, kappa, row.delta).value;
    row.jdelta_margin = row.jdelta - eps;
    rep.rows.push_back(row);
  }
  return rep;
}

SmallBallReport smallball_probability(const RunConfig& config, GridProbe probe,
                                      std::span<const double> eps_list)
{
  const auto s = hnorm_samples(config, probe);
  if (s.values.empty())
    throw NumericalError("every small-ball replica blew up");
  auto rep = smallball_from_samples(s.values, eps_list, config.exponent,
                                    config.sigma.kappa, config.grid.t(probe.k));
  rep.blowups = s.blowups;
  return rep;
}

SlopeFit smallball_fit(const SmallBallReport& report, std::size_t min_hits)
{
  std::vector<double> xs, ys;
  for (const auto& r : report.rows)
    if (r.hits >= min_hits && r.hits < r.samples) {
      xs.push_back(r.eps);
      ys.push_back(r.probability);
    }
  return fit_slope(xs, ys);
}

NegativeMoment negative_moment_estimate(std::span<const double> samples, double p,
                                        double floor)
{
  if (!(p >= 2.0))
    throw ConfigError("negative moments need p >= 2");
  if (!(floor > 0.0))
    throw ConfigError("negative moment floor must be positive");
  if (samples.size() < 2)
    throw ConfigError("negative moments need at least two samples");
  const auto mean_at = [&](double fl, double* se) {
    CompensatedSum s, s2;
    for (double h : samples) {
      const double v = std::pow(std::max(h, fl), -0.5 * p);
      s.add(v);
      s2.add(v * v);
    }
    const double n = static_cast<double>(samples.size());
    const double mean = s.value() / n;
    if (se) {
      const double var = std::max(0.0, (s2.value() / n - mean * mean) * n / (n - 1.0));
      *se = std::sqrt(var / n);
    }
    return mean;
  };
  NegativeMoment out{};
  out.value = mean_at(floor, &out.std_error);
  out.value_floor_up = mean_at(10.0 * floor, nullptr);
  out.value_floor_down = mean_at(0.1 * floor, nullptr);
  std::size_t at_floor = 0;
  for (double h : samples)
    if (h <= floor)
      ++at_floor;
  out.floored_fraction = static_cast<double>(at_floor) / static_cast<double>(samples.size());
  out.unreliable = out.floored_fraction > 0.01;
  return out;
}

} // namespace levyshe
