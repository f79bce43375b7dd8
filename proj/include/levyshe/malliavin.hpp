#pragma once

#include "levyshe/fit.hpp"
#include "levyshe/mild_solver.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace levyshe {

/// Noise cell (k, i) standing for (s, y) = (t_k, x_i); it drives the step
/// from t_k to t_{k+1}.
struct SourceCell
{
  std::size_t k;
  std::size_t i;
};

/// D_{s,y} u(t_k, .) on the spatial grid.
struct MalliavinState
{
  SourceCell source;
  std::size_t k;
  std::vector<double> values;
};

/// Derivative of the discrete path with respect to the noise of `source`,
/// divided by the cell size sqrt(dt dx), at time index k_final. The first
/// nonzero slice is t_{k_s + 1}: one filtered step of sigma(u(s, y)) times a
/// point mass of unit integral at y. Later slices follow the linearized
/// scheme with density sigma'(u_k) D_k xi_k sqrt(dt dx) / dx. Zero whenever
/// k_final <= k_s.
MalliavinState propagate_derivative(const Trajectory& path, const NoiseField& noise,
                                    SchemeOperator& op, const SigmaSpec& sigma,
                                    SourceCell source, std::size_t k_final);

struct OracleResult
{
  double value;      // Richardson combination of the two quotients
  double quotient_h;
  double quotient_half;
  double h;
  bool consistent;   // the two quotients agree to 1e-3 relative
};

/// Central differences of u(probe) in xi(source) with steps h and h/2,
/// divided by sqrt(dt dx). Four re-solves of the replica.
OracleResult noise_gradient_oracle(const RunConfig& config, std::uint64_t replica,
                                   SourceCell source, GridProbe probe, double h);

struct TailNorm
{
  double delta;
  double value; // contribution of sources with s in [t - delta, t)
};

struct HNormReport
{
  double t;
  double x;
  std::uint64_t replica;
  double hnorm_sq;
  std::vector<TailNorm> tails;
  std::size_t stride = 1;
  double hnorm_sq_half_stride = 0.0; // forward quadrature at stride / 2
};

/// Quadrature sum D^2 dt dx over the given states (all sources, stride 1),
/// at spatial index probe.i of their common final time.
HNormReport hnorm_sq(std::span<const MalliavinState> states, const GridSpec& grid,
                     GridProbe probe, std::span<const double> deltas,
                     std::uint64_t replica = 0);

/// Forward propagation from every stride-th source in time and space, each
/// weighted by the cells it stands for. Also evaluates stride / 2.
HNormReport hnorm_forward(const Trajectory& path, const NoiseField& noise,
                          SchemeOperator& op, const SigmaSpec& sigma, GridProbe probe,
                          std::size_t stride, std::span<const double> deltas);

/// D_{s,y} u(probe) for every source cell at once by running the transposed
/// linearized scheme backwards from the probe. Row-major K x M; rows
/// k >= probe.k are zero.
std::vector<double> derivative_field_adjoint(const Trajectory& path,
                                             const NoiseField& noise,
                                             SchemeOperator& op, const SigmaSpec& sigma,
                                             GridProbe probe);

HNormReport hnorm_adjoint(const Trajectory& path, const NoiseField& noise,
                          SchemeOperator& op, const SigmaSpec& sigma, GridProbe probe,
                          std::span<const double> deltas);

struct HNormSamples
{
  std::vector<double> values; // one per surviving replica, in replica order
  std::vector<std::uint64_t> replicas;
  std::vector<BlowUpRecord> blowups;
};

/// ||Du(probe)||^2_H over config.replicas replicas (adjoint method).
HNormSamples hnorm_samples(const RunConfig& config, GridProbe probe);

/// (kappa^2 / 2) times the Lebesgue-measure integral int_0^delta int q_u^2 dy du.
SeriesResult jdelta(const LevyExponent& exponent, double kappa, double delta,
                    double tol = 1e-9);

struct SmallBallRow
{
  double eps;
  std::size_t hits;
  std::size_t samples;
  double probability; // hits / samples, or the Wilson upper bound if hits = 0
  double ci_low;
  double ci_high;
  bool upper_bound_only;
  double delta;        // (4 eps / C)^{beta / (beta - 1)}, capped at t
  bool delta_capped;
  double jdelta;
  double jdelta_margin; // J_delta - eps
};

struct SmallBallReport
{
  double t;
  double c_constant; // kappa^2 A1 with A1 = min J-scale ratio over (0, t]
  std::vector<SmallBallRow> rows;
  std::vector<BlowUpRecord> blowups;
};

/// 95% Wilson score interval for hits out of n.
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n);

SmallBallReport smallball_from_samples(std::span<const double> samples,
                                       std::span<const double> eps_list,
                                       const LevyExponent& exponent, double kappa,
                                       double t);

SmallBallReport smallball_probability(const RunConfig& config, GridProbe probe,
                                      std::span<const double> eps_list);

/// Log-log fit of probability against eps over rows with at least min_hits
/// hits and at least one miss.
SlopeFit smallball_fit(const SmallBallReport& report, std::size_t min_hits = 10);

struct NegativeMoment
{
  double value; // mean of max(H, floor)^{-p/2}
  double std_error;
  double value_floor_up;   // floor * 10
  double value_floor_down; // floor / 10
  double floored_fraction;
  bool unreliable; // more than 1% of samples at the floor
};

NegativeMoment negative_moment_estimate(std::span<const double> hnorm_samples, double p,
                                        double floor);

} // namespace levyshe
