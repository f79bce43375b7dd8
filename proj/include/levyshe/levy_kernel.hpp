#pragma once

#include "levyshe/spectral_field.hpp"

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace levyshe {

inline constexpr double kDefaultSeriesTol = 1e-10;

/// Power-law envelope C1 |n|^alpha <= Re Phi(n) <= C2 |n|^beta, n >= 1.
struct PowerEnvelope
{
  double alpha;
  double beta;
  double c_lower;
  double c_upper;
};

/// Fourier multiplier n -> Phi(n) of a Levy process on the torus,
/// E exp(i n X_t) = exp(-t Phi(n)).
///
/// Construction checks Phi(0) = 0, Re Phi >= 0, Phi(-n) = conj(Phi(n)) and the
/// envelope on |n| <= validation_modes; violations throw ConfigError.
class LevyExponent
{
public:
  using Function = std::function<std::complex<double>(long)>;

  LevyExponent(std::string name, Function phi, PowerEnvelope envelope,
               long validation_modes = 4096);

  std::complex<double> operator()(long n) const { return phi_(n); }
  double real_part(long n) const { return phi_(n).real(); }
  const PowerEnvelope& envelope() const { return envelope_; }
  const std::string& name() const { return name_; }

private:
  std::string name_;
  Function phi_;
  PowerEnvelope envelope_;
};

/// Phi(n) = c |n|^alpha + i drift n, envelope (alpha, alpha, c, c).
LevyExponent make_power_exponent(double c, double alpha, double drift = 0.0);

/// Phi(n) = c_low |n|^alpha + c_high |n|^beta with alpha < beta, the simplest
/// exponent with a genuinely two-sided envelope (alpha, beta, c_low, c_low + c_high).
LevyExponent make_mixed_exponent(double c_low, double alpha, double c_high,
                                 double beta);

/// Value of a truncated series with a certified bound on what was discarded.
struct SeriesResult
{
  double value;
  double tail_bound;
  long terms;
};

/// Coefficients qhat_t(n) = exp(-t Phi(n)) / 2pi of the transition kernel,
/// so that q_t(z) = sum_n qhat_t(n) exp(-i n z) with z = y - x.
class KernelCoefficients
{
public:
  KernelCoefficients(double t, long cutoff, std::vector<std::complex<double>> nonneg,
                     double tail_bound, double sup_tail_bound)
    : t_(t)
    , cutoff_(cutoff)
    , nonneg_(std::move(nonneg))
    , tail_bound_(tail_bound)
    , sup_tail_bound_(sup_tail_bound)
  {
  }

  double time() const { return t_; }
  long cutoff() const { return cutoff_; }
  std::complex<double> at(long n) const
  {
    if (std::abs(n) > cutoff_)
      return 0.0;
    return n >= 0 ? nonneg_[n] : std::conj(nonneg_[-n]);
  }
  /// Bound on the discarded L2 mass sum_{|n|>N} |qhat(n)|^2.
  double tail_bound() const { return tail_bound_; }
  /// Bound on sum_{|n|>N} |qhat(n)|, i.e. on the pointwise truncation error.
  double sup_tail_bound() const { return sup_tail_bound_; }

  /// Reconstructs q_t(z).
  double evaluate(double z) const;

private:
  double t_;
  long cutoff_;
  std::vector<std::complex<double>> nonneg_;
  double tail_bound_;
  double sup_tail_bound_;
};

KernelCoefficients kernel_coefficients(const LevyExponent& exponent, double t,
                                       double tol = kDefaultSeriesTol);

/// ||q_t||^2 = (1/4pi^2) sum_n exp(-2 t Re Phi(n)). The L2 norm is taken with
/// respect to the normalized measure dx/2pi on the torus; the Lebesgue-measure
/// norm is 2pi times this value.
SeriesResult kernel_l2_norm_sq(const LevyExponent& exponent, double t,
                               double tol = kDefaultSeriesTol);

/// int_0^t ||q_s||^2 ds, summed mode by mode in closed form.
SeriesResult integrated_l2_norm_sq(const LevyExponent& exponent, double t,
                                   double tol = kDefaultSeriesTol);

/// Walsh isometry for Lebesgue white noise on [0,t] x [0,2pi):
/// int_0^t int_T q_s(y)^2 dy ds = 2pi * integrated_l2_norm_sq.
SeriesResult walsh_variance(const LevyExponent& exponent, double t,
                            double tol = kDefaultSeriesTol);

/// Upsilon(rate) = (1/4pi^2) sum_n 1 / (rate + 2 Re Phi(n)).
SeriesResult upsilon(const LevyExponent& exponent, double rate,
                     double tol = kDefaultSeriesTol);

SpectralField apply_semigroup(const LevyExponent& exponent, double t,
                              const SpectralField& f);

/// sum_{|n| <= N} |Phi(-n)|^2 |fhat(n)|^2 over the field's modes.
double generator_domain_sum(const LevyExponent& exponent, const SpectralField& f);

bool in_generator_domain(const LevyExponent& exponent, const SpectralField& f,
                         double bound);

inline constexpr double kDefaultDomainBound = 1e12;

/// Mode n of the result is -Phi(-n) fhat(n). Throws DomainError when the
/// domain sum exceeds domain_bound.
SpectralField apply_generator(const LevyExponent& exponent, const SpectralField& f,
                              double domain_bound = kDefaultDomainBound);

/// lambda^{1/alpha} sum_{n>=1} exp(-n^alpha lambda).
SeriesResult limit_constant_probe(double alpha, double lambda,
                                  double tol = kDefaultSeriesTol);

/// Brownian torus kernel as a sum of translates of the Gaussian with
/// variance 2t: sum_{|m| <= terms} (4 pi t)^{-1/2} exp(-(x + 2 pi m)^2 / 4t).
double wrapped_kernel_oracle(double t, double x, long terms);

struct ExponentCheck
{
  double theta;
  double threshold; // 2 beta / (beta + 1)
  bool admissible;  // alpha >= threshold
  bool boundary;    // |alpha - threshold| within tolerance, theta = 0
};

inline constexpr double kExponentTolerance = 1e-12;

/// theta = 2 beta (alpha - 1) / (alpha (beta - 1)) - 1 and the admissibility
/// condition alpha >= 2 beta / (beta + 1). For alpha = beta the formula
/// simplifies to theta = 1. Requires 1 < alpha <= beta <= 2.
ExponentCheck check_exponent_condition(double alpha, double beta);

struct KernelBoundRow
{
  double t;
  double l2_norm_sq;
  double scaled_alpha; // t^{1/alpha} ||q_t||^2
  double scaled_beta;  // t^{1/beta} ||q_t||^2
  double cumulative;   // int_0^t ||q_s||^2 ds
  double weighted_cumulative; // exp(-rate t) * cumulative
  double tail_bound;
  double cumulative_tail_bound;
};

struct KernelBoundReport
{
  std::vector<KernelBoundRow> rows;
  double l2_slope;
  double l2_r2;
  double cumulative_slope;
  double cumulative_r2;
  double rate;
  SeriesResult upsilon_at_rate;
  bool supineq_holds; // every weighted_cumulative <= Upsilon(rate)
};

KernelBoundReport verify_kernel_bounds(const LevyExponent& exponent,
                                       std::span<const double> t_grid,
                                       double rate = 1.0,
                                       double tol = kDefaultSeriesTol);

} // namespace levyshe
