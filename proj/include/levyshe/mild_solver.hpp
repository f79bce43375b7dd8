#pragma once

#include "levyshe/ensemble.hpp"
#include "levyshe/fft.hpp"
#include "levyshe/levy_kernel.hpp"
#include "levyshe/noise_field.hpp"
#include "levyshe/spectral_field.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace levyshe {

inline constexpr double kBlowUpThreshold = 1e12;

struct SigmaSpec
{
  std::string name;
  std::function<double(double)> sigma;
  std::function<double(double)> sigma_prime;
  double lip = 0.0;
  double kappa = 0.0; // lower bound of sigma
};

SigmaSpec constant_sigma(double value);

/// sigma(u) = a + b sin(u): Lipschitz constant |b|, lower bound a - |b|.
SigmaSpec sine_sigma(double a, double b);

/// Probes sigma on a grid of [-50, 50]: finiteness, sigma >= kappa, the
/// Lipschitz bound on neighbouring pairs and sigma' against a central
/// difference. Throws ConfigError on violation.
void validate_sigma(const SigmaSpec& sigma);

struct GridProbe
{
  std::size_t k;
  std::size_t i;
};

/// Grid indices of (t, x); throws ConfigError if the point is not a grid node.
GridProbe probe_at(const GridSpec& grid, double t, double x);

struct RunConfig
{
  GridSpec grid;
  LevyExponent exponent;
  SigmaSpec sigma;
  SpectralField u0;
  std::uint64_t seed = 0;
  std::size_t replicas = 10000;
  std::vector<GridProbe> probes;
  unsigned workers = 1;

  void validate() const;
};

/// u(t_k, .) with its r2c spectrum.
struct FieldState
{
  std::size_t k = 0;
  std::vector<double> values;
  std::vector<std::complex<double>> spectrum;
};

/// Per-thread operator for one (exponent, grid) pair.
///
/// The update of the r2c spectrum is U_{k+1} = E U_k + F G_k with
/// E = exp(-dt Phi) and G_k the spectrum of the noise density
/// g_k = sigma(u_k) xi_k sqrt(dt dx) / dx. F has the phase of exp(-i dt Im Phi)
/// and modulus sqrt((1 - exp(-2 dt Re Phi)) / (2 dt Re Phi)), which makes the
/// variance of every mode of the stochastic convolution exact over a step.
class SchemeOperator
{
public:
  SchemeOperator(const LevyExponent& exponent, const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::span<const std::complex<double>> decay() const { return decay_; }
  std::span<const std::complex<double>> filter() const { return filter_; }

  void to_spectrum(std::span<const double> values, std::span<std::complex<double>> out);
  /// Normalized inverse of to_spectrum.
  void to_values(std::span<const std::complex<double>> spectrum, std::span<double> out);

  /// spectrum <- E spectrum + F fft(density).
  void advance(std::span<std::complex<double>> spectrum, std::span<const double> density);

  /// out <- circulant action of the multiplier (E or F) on v; with transpose
  /// the conjugate multiplier is used.
  void apply_decay(std::span<const double> v, std::span<double> out, bool transpose);
  void apply_filter(std::span<const double> v, std::span<double> out, bool transpose);

private:
  void apply(std::span<const std::complex<double>> mult, std::span<const double> v,
             std::span<double> out, bool transpose);

  GridSpec grid_;
  RealFft fft_;
  std::vector<std::complex<double>> decay_;
  std::vector<std::complex<double>> filter_;
  std::vector<std::complex<double>> scratch_;
};

/// Fills density with sigma(u_i) xi_i sqrt(dt dx) / dx.
void noise_density(const GridSpec& grid, const SigmaSpec& sigma,
                   std::span<const double> u, std::span<const double> xi,
                   std::span<double> density);

/// Throws BlowUpError(k, max|u|) on non-finite values or max|u| above the threshold.
void check_blowup(std::size_t k, std::span<const double> u);

FieldState initial_state(SchemeOperator& op, const SpectralField& u0);

FieldState step(const FieldState& state, std::span<const double> noise_row,
                SchemeOperator& op, const SigmaSpec& sigma);

/// All K+1 time slices of one replica.
struct Trajectory
{
  GridSpec grid;
  std::vector<double> data;

  std::span<const double> at(std::size_t k) const
  {
    return std::span<const double>(data).subspan(k * grid.m_space, grid.m_space);
  }
  double value(std::size_t k, std::size_t i) const { return data[k * grid.m_space + i]; }
};

Trajectory solve_path(const RunConfig& config, std::uint64_t replica);
Trajectory solve_path(const RunConfig& config, const NoiseField& noise,
                      SchemeOperator& op);

/// u at config.probes for one replica without storing the path.
std::vector<double> solve_probes(const RunConfig& config, std::uint64_t replica,
                                 SchemeOperator& op);

struct MomentSample
{
  double t;
  double x;
  double moment; // E|f(t,x)|^p estimate
  double std_error;
};

struct WeightedNorm
{
  double value;
  double std_error;
  std::size_t argmax;
};

/// sup over samples of (exp(-rate t) moment)^{1/p}; standard error by the delta
/// method at the maximizer. Needs p >= 2 and rate >= 0.
WeightedNorm weighted_norm(std::span<const MomentSample> samples, double rate, double p);

struct PicardRow
{
  std::size_t n; // row n is ||v_{n+1} - v_n||
  double norm;
  double std_error;
  double ratio; // norm_n / norm_{n-1}, NaN for n = 0 or a zero denominator
  double t;
  double x;
};

struct PicardReport
{
  double rate;
  double p;
  std::size_t replicas_used;
  std::vector<BlowUpRecord> blowups;
  std::vector<PicardRow> rows;
};

/// Picard iterates on the frozen noise of each replica: v_0 is the
/// deterministic flow of u0 and v_{n+1} the same scheme with integrand
/// sigma(v_n). Norms use every grid node (t_k, x_i), k >= 1.
PicardReport picard_sequence(const RunConfig& config, std::size_t n_max, double rate,
                             double p);

} // namespace levyshe
