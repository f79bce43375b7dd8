#include "levyshe/levy_kernel.hpp"

#include "levyshe/errors.hpp"
#include "levyshe/fit.hpp"
#include "levyshe/summation.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace levyshe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPiSq = 4.0 * kPi * kPi;
constexpr long kMaxTerms = long{ 1 } << 22;
constexpr long kMaxCutoff = long{ 1 } << 26;

double power_abs(long n, double alpha)
{
  const double a = std::abs(static_cast<double>(n));
  return alpha == 2.0 ? a * a : std::pow(a, alpha);
}

void require_positive_time(double t)
{
  if (!(t > 0.0) || !std::isfinite(t))
    throw ConfigError("kernel time must be positive and finite (the t = 0 "
                      "kernel is a point mass)");
}

struct Bracket
{
  double lo;
  double hi;
};

// Sums term(n) for n = 1, 2, ... doubling the truncation N until the bracket
// [lo, hi] on sum_{n > N} term(n) is narrower than 2 tol. The reported value
// is the partial sum plus the bracket midpoint; tail_bound is the half width.
template <class Term, class TailBracket>
SeriesResult sum_positive_series(Term term, TailBracket bracket, double tol)
{
  CompensatedSum partial;
  long n = 0;
  long target = 64;
  for (;;) {
    for (; n < target; ) {
      ++n;
      partial.add(term(n));
    }
    const Bracket b = bracket(n);
    const double half = 0.5 * (b.hi - b.lo);
    if (half <= tol || n >= kMaxTerms)
      return { partial.value() + 0.5 * (b.lo + b.hi), half, n };
    target = std::min(2 * n, kMaxTerms);
  }
}

// int_N^inf exp(-a x^alpha) dx <= exp(-a N^alpha) / (a alpha N^{alpha-1}),
// from x^alpha >= N^alpha + alpha N^{alpha-1} (x - N).
double stretched_exp_tail(double a, double alpha, long N)
{
  const double nd = static_cast<double>(N);
  return std::exp(-a * std::pow(nd, alpha)) /
         (a * alpha * std::pow(nd, alpha - 1.0));
}

double tolerance_check(double tol)
{
  if (!(tol > 0.0))
    throw ConfigError("series tolerance must be positive");
  return tol;
}

} // namespace

LevyExponent::LevyExponent(std::string name, Function phi, PowerEnvelope envelope,
                           long validation_modes)
  : name_(std::move(name))
  , phi_(std::move(phi))
  , envelope_(envelope)
{
  const auto& e = envelope_;
  if (!(e.alpha > 1.0 && e.alpha <= 2.0) || !(e.beta > 1.0 && e.beta <= 2.0))
    throw ConfigError("envelope powers must lie in (1, 2]");
  if (e.alpha > e.beta)
    throw ConfigError("envelope requires alpha <= beta");
  if (!(e.c_lower > 0.0) || e.c_upper < e.c_lower)
    throw ConfigError("envelope requires 0 < C1 <= C2");
  if (std::abs(phi_(0)) > 1e-14)
    throw ConfigError("Levy exponent must vanish at n = 0");
  for (long n = 1; n <= validation_modes; ++n) {
    const auto p = phi_(n);
    const auto q = phi_(-n);
    const double scale = 1.0 + std::abs(p);
    if (std::abs(q - std::conj(p)) > 1e-12 * scale)
      throw ConfigError("Levy exponent must satisfy Phi(-n) = conj(Phi(n))");
    const double re = p.real();
    if (re < 0.0)
      throw ConfigError("Levy exponent must have nonnegative real part");
    const double lower = e.c_lower * power_abs(n, e.alpha);
    const double upper = e.c_upper * power_abs(n, e.beta);
    if (re < lower * (1.0 - 1e-12) || re > upper * (1.0 + 1e-12))
      throw ConfigError("Levy exponent violates its power-law envelope at n = " +
                        std::to_string(n));
  }
}

LevyExponent make_power_exponent(double c, double alpha, double drift)
{
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw ConfigError("power exponent requires 1 < alpha <= 2");
  if (!(c > 0.0))
    throw ConfigError("power exponent requires c > 0");
  if (!std::isfinite(drift))
    throw ConfigError("drift must be finite");
  return LevyExponent(
    "power",
    [c, alpha, drift](long n) {
      return std::complex<double>(c * power_abs(n, alpha),
                                  drift * static_cast<double>(n));
    },
    PowerEnvelope{ alpha, alpha, c, c });
}

LevyExponent make_mixed_exponent(double c_low, double alpha, double c_high,
                                 double beta)
{
  if (!(alpha > 1.0 && beta <= 2.0 && alpha < beta))
    throw ConfigError("mixed exponent requires 1 < alpha < beta <= 2");
  if (!(c_low > 0.0) || !(c_high > 0.0))
    throw ConfigError("mixed exponent requires positive coefficients");
  return LevyExponent(
    "mixed",
    [=](long n) {
      return std::complex<double>(c_low * power_abs(n, alpha) +
                                    c_high * power_abs(n, beta),
                                  0.0);
    },
    PowerEnvelope{ alpha, beta, c_low, c_low + c_high });
}

double KernelCoefficients::evaluate(double z) const
{
  CompensatedSum acc;
  for (long n = cutoff_; n >= 1; --n)
    acc.add(2.0 * (nonneg_[n] * std::polar(1.0, -static_cast<double>(n) * z)).real());
  acc.add(nonneg_[0].real());
  return acc.value();
}

KernelCoefficients kernel_coefficients(const LevyExponent& exponent, double t,
                                       double tol)
{
  require_positive_time(t);
  tolerance_check(tol);
  const auto& env = exponent.envelope();

  const auto l2_tail = [&](long N) {
    return 2.0 / kFourPiSq * stretched_exp_tail(2.0 * t * env.c_lower, env.alpha, N);
  };
  const auto sup_tail = [&](long N) {
    return 2.0 / (2.0 * kPi) * stretched_exp_tail(t * env.c_lower, env.alpha, N);
  };
  const auto good = [&](long N) { return l2_tail(N) < tol && sup_tail(N) < tol; };

  long hi = 1;
  while (!good(hi)) {
    if (hi >= kMaxCutoff)
      throw ConfigError("kernel time too small for the requested tolerance");
    hi *= 2;
  }
  long lo = hi / 2;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (good(mid) ? hi : lo) = mid;
  }
  const long N = hi;

  std::vector<std::complex<double>> coeffs(N + 1);
  for (long n = 0; n <= N; ++n)
    coeffs[n] = std::exp(-t * exponent(n)) / (2.0 * kPi);
  coeffs[0] = coeffs[0].real();
  return KernelCoefficients(t, N, std::move(coeffs), l2_tail(N), sup_tail(N));
}

SeriesResult kernel_l2_norm_sq(const LevyExponent& exponent, double t, double tol)
{
  require_positive_time(t);
  tolerance_check(tol);
  const auto& env = exponent.envelope();
  auto r = sum_positive_series(
    [&](long n) { return 2.0 * std::exp(-2.0 * t * exponent.real_part(n)); },
    [&](long N) {
      return Bracket{ 0.0, 2.0 * stretched_exp_tail(2.0 * t * env.c_lower,
                                                    env.alpha, N) };
    },
    tol * kFourPiSq);
  return { (1.0 + r.value) / kFourPiSq, r.tail_bound / kFourPiSq, 2 * r.terms + 1 };
}

SeriesResult integrated_l2_norm_sq(const LevyExponent& exponent, double t,
                                   double tol)
{
  require_positive_time(t);
  tolerance_check(tol);
  const auto& env = exponent.envelope();
  auto r = sum_positive_series(
    [&](long n) {
      const double a = exponent.real_part(n);
      return 2.0 * (-std::expm1(-2.0 * t * a)) / (2.0 * a);
    },
    [&](long N) {
      const double nd = static_cast<double>(N);
      const double hi = 2.0 * std::pow(nd, 1.0 - env.alpha) /
                        (2.0 * env.c_lower * (env.alpha - 1.0));
      const double n1 = nd + 1.0;
      const double lo = 2.0 * (-std::expm1(-2.0 * t * env.c_upper * std::pow(n1, env.beta))) *
                        std::pow(n1, 1.0 - env.beta) /
                        (2.0 * env.c_upper * (env.beta - 1.0));
      return Bracket{ lo, hi };
    },
    tol * kFourPiSq);
  return { (t + r.value) / kFourPiSq, r.tail_bound / kFourPiSq, 2 * r.terms + 1 };
}

SeriesResult walsh_variance(const LevyExponent& exponent, double t, double tol)
{
  auto r = integrated_l2_norm_sq(exponent, t, tol / (2.0 * kPi));
  return { 2.0 * kPi * r.value, 2.0 * kPi * r.tail_bound, r.terms };
}

SeriesResult upsilon(const LevyExponent& exponent, double rate, double tol)
{
  if (!(rate > 0.0))
    throw ConfigError("Upsilon requires a positive rate (the n = 0 term is 1/rate)");
  tolerance_check(tol);
  const auto& env = exponent.envelope();
  auto r = sum_positive_series(
    [&](long n) { return 2.0 / (rate + 2.0 * exponent.real_part(n)); },
    [&](long N) {
      const double nd = static_cast<double>(N);
      const double hi = 2.0 * std::pow(nd, 1.0 - env.alpha) /
                        (2.0 * env.c_lower * (env.alpha - 1.0));
      const double n1 = nd + 1.0;
      const double lo = 2.0 * std::pow(n1, 1.0 - env.beta) /
                        ((env.beta - 1.0) * (2.0 * env.c_upper + rate / std::pow(n1, env.beta)));
      return Bracket{ lo, hi };
    },
    tol * kFourPiSq);
  return { (1.0 / rate + r.value) / kFourPiSq, r.tail_bound / kFourPiSq,
           2 * r.terms + 1 };
}

SpectralField apply_semigroup(const LevyExponent& exponent, double t,
                              const SpectralField& f)
{
  if (!(t >= 0.0))
    throw ConfigError("semigroup time must be nonnegative");
  if (t == 0.0)
    return f;
  return f.with_multiplier([&](long n) { return std::exp(-t * exponent(-n)); });
}

double generator_domain_sum(const LevyExponent& exponent, const SpectralField& f)
{
  CompensatedSum acc;
  const long N = f.cutoff();
  for (long n = -N; n <= N; ++n)
    acc.add(std::norm(exponent(-n)) * std::norm(f.mode(n)));
  return acc.value();
}

bool in_generator_domain(const LevyExponent& exponent, const SpectralField& f,
                         double bound)
{
  return generator_domain_sum(exponent, f) <= bound;
}

SpectralField apply_generator(const LevyExponent& exponent, const SpectralField& f,
                              double domain_bound)
{
  const double s = generator_domain_sum(exponent, f);
  if (!(s <= domain_bound))
    throw DomainError("field fails the generator domain test: sum " +
                      std::to_string(s) + " exceeds " + std::to_string(domain_bound));
  return f.with_multiplier([&](long n) { return -exponent(-n); });
}

SeriesResult limit_constant_probe(double alpha, double lambda, double tol)
{
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw ConfigError("limit constant probe requires 1 < alpha <= 2");
  if (!(lambda > 0.0))
    throw ConfigError("limit constant probe requires lambda > 0");
  tolerance_check(tol);
  const double scale = std::pow(lambda, 1.0 / alpha);
  auto r = sum_positive_series(
    [&](long n) { return std::exp(-lambda * power_abs(n, alpha)); },
    [&](long N) { return Bracket{ 0.0, stretched_exp_tail(lambda, alpha, N) }; },
    tol / scale);
  return { scale * r.value, scale * r.tail_bound, r.terms };
}

double wrapped_kernel_oracle(double t, double x, long terms)
{
  require_positive_time(t);
  CompensatedSum acc;
  const double norm = 1.0 / std::sqrt(4.0 * kPi * t);
  for (long m = -terms; m <= terms; ++m) {
    const double z = x + 2.0 * kPi * static_cast<double>(m);
    acc.add(norm * std::exp(-z * z / (4.0 * t)));
  }
  return acc.value();
}

ExponentCheck check_exponent_condition(double alpha, double beta)
{
  if (!(alpha > 1.0 && alpha <= 2.0) || !(beta > 1.0 && beta <= 2.0))
    throw ConfigError("exponents must lie in (1, 2]");
  if (alpha > beta + kExponentTolerance)
    throw ConfigError("exponent condition requires alpha <= beta");
  ExponentCheck out{};
  out.theta = 2.0 * beta * (alpha - 1.0) / (alpha * (beta - 1.0)) - 1.0;
  out.threshold = 2.0 * beta / (beta + 1.0);
  out.boundary = std::abs(alpha - out.threshold) <= kExponentTolerance;
  out.admissible = alpha >= out.threshold - kExponentTolerance;
  return out;
}

KernelBoundReport verify_kernel_bounds(const LevyExponent& exponent,
                                       std::span<const double> t_grid, double rate,
                                       double tol)
{
  const auto& env = exponent.envelope();
  KernelBoundReport report{};
  report.rate = rate;
  report.upsilon_at_rate = upsilon(exponent, rate, tol);
  report.supineq_holds = true;

  std::vector<double> ts, l2s, cums;
  for (double t : t_grid) {
    const auto l2 = kernel_l2_norm_sq(exponent, t, tol);
    const auto cum = integrated_l2_norm_sq(exponent, t, tol);
    KernelBoundRow row{};
    row.t = t;
    row.l2_norm_sq = l2.value;
    row.scaled_alpha = std::pow(t, 1.0 / env.alpha) * l2.value;
    row.scaled_beta = std::pow(t, 1.0 / env.beta) * l2.value;
    row.cumulative = cum.value;
    row.weighted_cumulative = std::exp(-rate * t) * cum.value;
    row.tail_bound = l2.tail_bound;
    row.cumulative_tail_bound = cum.tail_bound;
    if (row.weighted_cumulative - cum.tail_bound >
        report.upsilon_at_rate.value + report.upsilon_at_rate.tail_bound)
      report.supineq_holds = false;
    report.rows.push_back(row);
    ts.push_back(t);
    l2s.push_back(l2.value);
    cums.push_back(cum.value);
  }
  if (ts.size() >= 3) {
    const auto f1 = fit_slope(ts, l2s);
    const auto f2 = fit_slope(ts, cums);
    report.l2_slope = f1.slope;
    report.l2_r2 = f1.r2;
    report.cumulative_slope = f2.slope;
    report.cumulative_r2 = f2.r2;
  } else {
    report.l2_slope = report.l2_r2 = std::nan("");
    report.cumulative_slope = report.cumulative_r2 = std::nan("");
  }
  return report;
}

} // namespace levyshe
