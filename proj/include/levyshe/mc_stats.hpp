#pragma once

#include "levyshe/fit.hpp"
#include "levyshe/mild_solver.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace levyshe {

/// Replica samples of u at one probe. Replica r is driven by noise (seed, r).
struct SampleSet
{
  GridProbe probe;
  double t;
  double x;
  std::vector<double> values;
  std::vector<std::uint64_t> replicas;
};

struct Ensemble
{
  std::size_t requested = 0;
  std::vector<SampleSet> sets; // one per config.probes entry
  std::vector<BlowUpRecord> blowups;
};

/// config.replicas (>= 2) independent solves; blown-up replicas are left
/// out of every sample set and listed in blowups.
Ensemble run_ensemble(const RunConfig& config);

struct SampleSummary
{
  std::size_t n;
  double mean;
  double mean_se;
  double variance; // unbiased
  double variance_se;
  double skewness;
  double skewness_se;
};

SampleSummary summarize(std::span<const double> values);

struct DensityEstimate
{
  std::vector<double> points;
  std::vector<double> density;
  std::vector<double> d1; // finite differences of density over points
  std::vector<double> d2;
  double bandwidth;
};

inline constexpr const char* kBandwidthRule =
  "silverman: 0.9 * min(sd, iqr / 1.34) * n^(-1/5)";

/// Throws DegenerateSampleError when the samples have no spread.
double silverman_bandwidth(std::span<const double> samples);

/// `count` equispaced points over [min - 4h, max + 4h].
std::vector<double> default_eval_points(std::span<const double> samples, double bandwidth,
                                        std::size_t count = 512);

/// Gaussian-kernel estimate at sorted eval points.
DensityEstimate kde(std::span<const double> samples, double bandwidth,
                    std::span<const double> eval_points);

double kde_cdf(std::span<const double> samples, double bandwidth, double z);

/// sup over eval points of |KDE CDF - N(mean, sd^2) CDF|.
double kolmogorov_distance_to_normal(std::span<const double> samples, double bandwidth,
                                     double mean, double sd,
                                     std::span<const double> eval_points);

struct SmoothnessReport
{
  double bulk_low;
  double bulk_high; // central 95% of the estimate's mass
  double max_abs_d1;
  double max_abs_d2;
  std::size_t d2_sign_changes;
  bool oscillating; // more than the two inflections of a unimodal bump
};

SmoothnessReport smoothness_report(const DensityEstimate& estimate);

} // namespace levyshe
