#include "levyshe/mc_stats.hpp"

#include "levyshe/errors.hpp"
#include "levyshe/parallel.hpp"
#include "levyshe/summation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace levyshe {

SlopeFit fit_slope(std::span<const double> xs, std::span<const double> ys)
{
  if (xs.size() != ys.size())
    throw ConfigError("fit_slope needs equally many xs and ys");
  if (xs.size() < 3)
    throw ConfigError("fit_slope needs at least 3 points");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (!(xs[j] > 0.0) || !(ys[j] > 0.0))
      throw ConfigError("fit_slope needs positive values before taking logs");
    lx[j] = std::log(xs[j]);
    ly[j] = std::log(ys[j]);
  }
  auto sorted = lx;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("fit_slope needs distinct xs");

  const double n = static_cast<double>(lx.size());
  const double mx = compensated_sum(lx) / n;
  const double my = compensated_sum(ly) / n;
  CompensatedSum sxx, sxy, syy;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    const double dx = lx[j] - mx;
    const double dy = ly[j] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  const double slope = sxy.value() / sxx.value();
  const double intercept = my - slope * mx;
  CompensatedSum sse;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    const double r = ly[j] - (intercept + slope * lx[j]);
    sse.add(r * r);
  }
  const double r2 = syy.value() > 0.0 ? 1.0 - sse.value() / syy.value() : 1.0;
  return { slope, intercept, r2 };
}

Ensemble run_ensemble(const RunConfig& config)
{
  config.validate();
  if (config.replicas < 2)
    throw ConfigError("an ensemble needs at least 2 replicas");
  if (config.probes.empty())
    throw ConfigError("an ensemble needs at least one probe");
  std::vector<std::optional<std::vector<double>>> slot(config.replicas);
  std::vector<std::optional<BlowUpRecord>> failed(config.replicas);
  parallel_for(
    config.replicas, config.workers,
    [&] { return SchemeOperator(config.exponent, config.grid); },
    [&](SchemeOperator& op, std::size_t r) {
      try {
        slot[r] = solve_probes(config, r, op);
      } catch (const BlowUpError& e) {
        failed[r] = BlowUpRecord{ r, e.step(), e.max_abs() };
      }
    });

  Ensemble ens;
  ens.requested = config.replicas;
  for (const auto& p : config.probes)
    ens.sets.push_back({ p, config.grid.t(p.k), config.grid.x(p.i), {}, {} });
  for (std::size_t r = 0; r < config.replicas; ++r) {
    if (failed[r]) {
      ens.blowups.push_back(*failed[r]);
      continue;
    }
    for (std::size_t p = 0; p < ens.sets.size(); ++p) {
      ens.sets[p].values.push_back((*slot[r])[p]);
      ens.sets[p].replicas.push_back(r);
    }
  }
  return ens;
}

SampleSummary summarize(std::span<const double> values)
{
  const std::size_t count = values.size();
  if (count < 2)
    throw ConfigError("summary statistics need at least 2 samples");
  const double n = static_cast<double>(count);
  const double mean = compensated_sum(values) / n;
  CompensatedSum s2, s3, s4;
  for (double v : values) {
    const double d = v - mean;
    s2.add(d * d);
    s3.add(d * d * d);
    s4.add(d * d * d * d);
  }
  const double m2 = s2.value() / n;
  const double m3 = s3.value() / n;
  const double m4 = s4.value() / n;
  SampleSummary out{};
  out.n = count;
  out.mean = mean;
  out.variance = s2.value() / (n - 1.0);
  out.mean_se = std::sqrt(out.variance / n);
  const double var_var = (m4 - out.variance * out.variance * (n - 3.0) / (n - 1.0)) / n;
  out.variance_se = std::sqrt(std::max(0.0, var_var));
  out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  out.skewness_se = count > 2 ? std::sqrt(6.0 * n * (n - 1.0) /
                                          ((n - 2.0) * (n + 1.0) * (n + 3.0)))
                              : std::nan("");
  return out;
}

namespace {

double quantile_sorted(const std::vector<double>& s, double q)
{
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

} // namespace

double silverman_bandwidth(std::span<const double> samples)
{
  if (samples.size() < 2)
    throw ConfigError("bandwidth needs at least 2 samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  if (s.front() == s.back())
    throw DegenerateSampleError(s.front());
  const auto sum = summarize(samples);
  const double sd = std::sqrt(sum.variance);
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(s.size()), -0.2);
}

std::vector<double> default_eval_points(std::span<const double> samples, double bandwidth,
                                        std::size_t count)
{
  if (samples.empty() || count < 3)
    throw ConfigError("evaluation grid needs samples and at least 3 points");
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const double a = *lo - 4.0 * bandwidth;
  const double b = *hi + 4.0 * bandwidth;
  std::vector<double> pts(count);
  for (std::size_t j = 0; j < count; ++j)
    pts[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(count - 1);
  return pts;
}

DensityEstimate kde(std::span<const double> samples, double bandwidth,
                    std::span<const double> eval_points)
{
  if (!(bandwidth > 0.0))
    throw ConfigError("bandwidth must be positive");
  if (samples.size() < 2)
    throw ConfigError("density estimate needs at least 2 samples");
  if (eval_points.size() < 3 || !std::is_sorted(eval_points.begin(), eval_points.end()))
    throw ConfigError("evaluation points must be sorted, at least 3");
  {
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi)
      throw DegenerateSampleError(*lo);
  }
  const double norm =
    1.0 / (static_cast<double>(samples.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  DensityEstimate est;
  est.bandwidth = bandwidth;
  est.points.assign(eval_points.begin(), eval_points.end());
  est.density.resize(est.points.size());
  for (std::size_t j = 0; j < est.points.size(); ++j) {
    CompensatedSum acc;
    for (double s : samples) {
      const double z = (est.points[j] - s) / bandwidth;
      acc.add(std::exp(-0.5 * z * z));
    }
    est.density[j] = norm * acc.value();
  }

  const std::size_t n = est.points.size();
  const auto& x = est.points;
  const auto& f = est.density;
  est.d1.assign(n, 0.0);
  est.d2.assign(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double h1 = x[j] - x[j - 1];
    const double h2 = x[j + 1] - x[j];
    est.d1[j] = (f[j + 1] - f[j - 1]) / (h1 + h2);
    est.d2[j] = 2.0 * ((f[j + 1] - f[j]) / h2 - (f[j] - f[j - 1]) / h1) / (h1 + h2);
  }
  est.d1[0] = est.d1[1];
  est.d1[n - 1] = est.d1[n - 2];
  est.d2[0] = est.d2[1];
  est.d2[n - 1] = est.d2[n - 2];
  return est;
}

double kde_cdf(std::span<const double> samples, double bandwidth, double z)
{
  CompensatedSum acc;
  for (double s : samples)
    acc.add(normal_cdf((z - s) / bandwidth));
  return acc.value() / static_cast<double>(samples.size());
}

double kolmogorov_distance_to_normal(std::span<const double> samples, double bandwidth,
                                     double mean, double sd,
                                     std::span<const double> eval_points)
{
  if (!(sd > 0.0))
    throw ConfigError("reference normal needs sd > 0");
  double worst = 0.0;
  for (double z : eval_points)
    worst = std::max(worst, std::abs(kde_cdf(samples, bandwidth, z) -
                                     normal_cdf((z - mean) / sd)));
  return worst;
}

SmoothnessReport smoothness_report(const DensityEstimate& est)
{
  const std::size_t n = est.points.size();
  std::vector<double> cdf(n, 0.0);
  for (std::size_t j = 1; j < n; ++j)
    cdf[j] = cdf[j - 1] + 0.5 * (est.density[j] + est.density[j - 1]) *
                            (est.points[j] - est.points[j - 1]);
  const double total = cdf.back();
  std::size_t lo = 0;
  while (lo + 1 < n && cdf[lo] < 0.025 * total)
    ++lo;
  std::size_t hi = n - 1;
  while (hi > lo && cdf[hi] > 0.975 * total)
    --hi;

  SmoothnessReport rep{ est.points[lo], est.points[hi], 0.0, 0.0, 0, false };
  for (std::size_t j = lo; j <= hi; ++j) {
    rep.max_abs_d1 = std::max(rep.max_abs_d1, std::abs(est.d1[j]));
    rep.max_abs_d2 = std::max(rep.max_abs_d2, std::abs(est.d2[j]));
  }
  const double noise = 1e-6 * rep.max_abs_d2;
  int last_sign = 0;
  for (std::size_t j = lo; j <= hi; ++j) {
    if (std::abs(est.d2[j]) <= noise)
      continue;
    const int sign = est.d2[j] > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign)
      ++rep.d2_sign_changes;
    last_sign = sign;
  }
  rep.oscillating = rep.d2_sign_changes > 2;
  return rep;
}

} // namespace levyshe
