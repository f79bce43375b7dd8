#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "levyshe/errors.hpp"
#include "levyshe/levy_kernel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace levyshe;
using std::numbers::pi;

namespace {

const double kInvFourPiSq = 1.0 / (4.0 * pi * pi);

// Direct partial sum of sum_{|n|<=N} exp(-2 t n^2) / 4pi^2 plus an integral tail.
double brownian_l2_oracle(double t, long N)
{
  double s = 1.0;
  for (long n = 1; n <= N; ++n)
    s += 2.0 * std::exp(-2.0 * t * double(n) * double(n));
  return s * kInvFourPiSq;
}

double trapezoid_periodic(const std::vector<double>& f)
{
  double s = 0.0;
  for (double v : f)
    s += v;
  return s * 2.0 * pi / double(f.size());
}

} // namespace

TEST_CASE("power exponent arithmetic and symmetry")
{
  const auto e = make_power_exponent(1.0, 2.0, 0.0);
  CHECK(e(3) == std::complex<double>(9.0, 0.0));
  CHECK(e(0) == std::complex<double>(0.0, 0.0));
  const auto d = make_power_exponent(0.5, 1.5, 0.7);
  for (long n = -50; n <= 50; ++n)
    CHECK(d(-n) == std::conj(d(n)));
  CHECK(d(2).imag() == doctest::Approx(1.4));
  CHECK(d.envelope().alpha == 1.5);
  CHECK(d.envelope().beta == 1.5);
  CHECK(d.envelope().c_lower == 0.5);
  CHECK(d.envelope().c_upper == 0.5);
}

TEST_CASE("power exponent rejects invalid parameters")
{
  CHECK_THROWS_AS(make_power_exponent(1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(make_power_exponent(1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(make_power_exponent(1.0, 2.1), ConfigError);
  CHECK_THROWS_AS(make_power_exponent(0.0, 1.5), ConfigError);
  CHECK_NOTHROW(make_power_exponent(1.0, 4.0 / 3.0 + 0.1));
}

TEST_CASE("exponent validation catches each invariant")
{
  const PowerEnvelope env{ 2.0, 2.0, 1.0, 1.0 };
  CHECK_THROWS_AS(LevyExponent("shifted", [](long n) { return std::complex<double>(n * n + 1.0); },
                               env),
                  ConfigError);
  CHECK_THROWS_AS(LevyExponent("asym",
                               [](long n) { return std::complex<double>(n * n, n * n * 0.1); },
                               env),
                  ConfigError);
  CHECK_THROWS_AS(LevyExponent("too small", [](long n) { return std::complex<double>(0.5 * n * n); },
                               env),
                  ConfigError);
  CHECK_THROWS_AS(LevyExponent("ok", [](long n) { return std::complex<double>(n * n); },
                               PowerEnvelope{ 2.0, 1.5, 1.0, 1.0 }),
                  ConfigError);
  CHECK_NOTHROW(make_mixed_exponent(1.0, 1.5, 0.5, 2.0));
  CHECK_THROWS_AS(make_mixed_exponent(1.0, 2.0, 0.5, 1.5), ConfigError);
}

TEST_CASE("kernel coefficients: long time, symmetry, monotone modulus")
{
  const auto e = make_power_exponent(1.0, 1.5, 0.3);
  const auto late = kernel_coefficients(e, 1e4);
  CHECK(late.at(0).real() == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-15));
  for (long n = 1; n <= late.cutoff(); ++n)
    CHECK(std::abs(late.at(n)) < 1e-300);

  const auto k = kernel_coefficients(e, 0.01);
  CHECK(k.cutoff() > 10);
  double prev = 1.0 / (2.0 * pi) * (1 + 1e-15);
  for (long n = 0; n <= k.cutoff(); ++n) {
    CHECK(k.at(-n) == std::conj(k.at(n)));
    CHECK(std::abs(k.at(n)) <= prev);
    prev = std::abs(k.at(n));
  }
  CHECK(k.tail_bound() < 1e-10);
  CHECK(k.sup_tail_bound() < 1e-10);
}

TEST_CASE("kernel coefficients reject t <= 0 and tol <= 0")
{
  const auto e = make_power_exponent(1.0, 2.0);
  CHECK_THROWS_AS(kernel_coefficients(e, 0.0), ConfigError);
  CHECK_THROWS_AS(kernel_coefficients(e, -1.0), ConfigError);
  CHECK_THROWS_AS(kernel_coefficients(e, 0.1, 0.0), ConfigError);
  CHECK_THROWS_AS(kernel_l2_norm_sq(e, 0.0), ConfigError);
}

TEST_CASE("Brownian spectral kernel equals the wrapped Gaussian")
{
  const auto e = make_power_exponent(1.0, 2.0);
  {
    const auto k = kernel_coefficients(e, 0.01, 1e-10);
    CHECK(std::abs(k.evaluate(0.0) - wrapped_kernel_oracle(0.01, 0.0, 10)) < 1e-9);
  }
  const auto k = kernel_coefficients(e, 0.05, 1e-10);
  double worst = 0.0;
  for (int j = 0; j < 64; ++j) {
    const double z = 2.0 * pi * j / 64.0;
    worst = std::max(worst, std::abs(k.evaluate(z) - wrapped_kernel_oracle(0.05, z, 10)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("reconstructed kernel is real for a drifted exponent")
{
  const auto e = make_power_exponent(1.0, 1.5, 2.0);
  const auto k = kernel_coefficients(e, 0.02);
  for (double z : { 0.0, 0.4, 2.0, 5.5 }) {
    std::complex<double> s = 0.0;
    for (long n = -k.cutoff(); n <= k.cutoff(); ++n)
      s += k.at(n) * std::polar(1.0, -double(n) * z);
    CHECK(std::abs(s.imag()) < 1e-12);
    CHECK(s.real() == doctest::Approx(k.evaluate(z)).epsilon(1e-12));
  }
}

TEST_CASE("Chapman-Kolmogorov in spectral and physical form")
{
  const auto e = make_power_exponent(1.0, 1.5, 0.4);
  const double s = 0.03, t = 0.05;
  const auto ks = kernel_coefficients(e, s);
  const auto kt = kernel_coefficients(e, t);
  const auto kst = kernel_coefficients(e, s + t);
  for (long n = 0; n <= 20; ++n) {
    const auto lhs = 2.0 * pi * ks.at(n) * 2.0 * pi * kt.at(n);
    const auto rhs = 2.0 * pi * kst.at(n);
    CHECK(std::abs(lhs - rhs) <= 1e-15 * (1.0 + std::abs(rhs)));
  }
  const int m = 512;
  std::vector<double> qs(m), qt(m);
  for (int j = 0; j < m; ++j) {
    qs[j] = ks.evaluate(2.0 * pi * j / m);
    qt[j] = kt.evaluate(2.0 * pi * j / m);
  }
  for (int jz : { 0, 37, 200 }) {
    double conv = 0.0;
    for (int j = 0; j < m; ++j)
      conv += qs[(jz - j + m) % m] * qt[j];
    conv *= 2.0 * pi / m;
    CHECK(conv == doctest::Approx(kst.evaluate(2.0 * pi * jz / m)).epsilon(1e-10));
  }
}

TEST_CASE("kernel L2 norm: limits, brute-force oracle and Parseval")
{
  const auto e = make_power_exponent(1.0, 2.0);
  CHECK(kernel_l2_norm_sq(e, 1e6).value == doctest::Approx(kInvFourPiSq).epsilon(1e-15));
  const auto r = kernel_l2_norm_sq(e, 0.01);
  CHECK(std::abs(r.value - brownian_l2_oracle(0.01, 10000)) < 1e-10);
  CHECK(r.value >= kInvFourPiSq);
  CHECK(r.tail_bound < 1e-10);

  const auto k = kernel_coefficients(e, 0.01);
  std::vector<double> q2(1024);
  for (int j = 0; j < 1024; ++j) {
    const double q = k.evaluate(2.0 * pi * j / 1024.0);
    q2[j] = q * q;
  }
  CHECK(trapezoid_periodic(q2) / (2.0 * pi) == doctest::Approx(r.value).epsilon(1e-9));
}

TEST_CASE("kernel L2 norm scaling for alpha = beta = 1.5")
{
  const auto e = make_power_exponent(1.0, 1.5);
  std::vector<double> ts, vs;
  for (int j = 0; j <= 8; ++j) {
    const double t = 1e-5 * std::pow(100.0, j / 8.0);
    ts.push_back(t);
    vs.push_back(kernel_l2_norm_sq(e, t).value);
  }
  const auto rep = verify_kernel_bounds(e, ts);
  CHECK(rep.l2_slope == doctest::Approx(-2.0 / 3.0).epsilon(0.03));
  CHECK(rep.l2_r2 > 0.999);
  CHECK(rep.cumulative_slope == doctest::Approx(1.0 / 3.0).epsilon(0.03));
  double lo = 1e300, hi = 0.0;
  for (const auto& row : rep.rows) {
    lo = std::min(lo, row.scaled_alpha);
    hi = std::max(hi, row.scaled_alpha);
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo < 1.1);
}

TEST_CASE("integrated norm is the time integral of the norm")
{
  const auto e = make_power_exponent(1.0, 1.5, 0.2);
  const double t = 0.02, h = 1e-5;
  const double deriv =
    (integrated_l2_norm_sq(e, t + h).value - integrated_l2_norm_sq(e, t - h).value) / (2 * h);
  CHECK(deriv == doctest::Approx(kernel_l2_norm_sq(e, t).value).epsilon(1e-6));

  const auto b = make_power_exponent(1.0, 2.0);
  double direct = 0.1;
  for (long n = 1; n <= 2000000; ++n) {
    const double a = double(n) * double(n);
    direct += 2.0 * (-std::expm1(-0.2 * a)) / (2.0 * a);
  }
  direct += 2.0 / 2000000.0 / 2.0;
  CHECK(integrated_l2_norm_sq(b, 0.1).value == doctest::Approx(direct * kInvFourPiSq).epsilon(1e-8));
  CHECK(walsh_variance(b, 0.1).value ==
        doctest::Approx(2.0 * pi * integrated_l2_norm_sq(b, 0.1).value).epsilon(1e-14));
}

TEST_CASE("Upsilon: oracle, monotonicity, decay and Laplace identity")
{
  const auto e = make_power_exponent(1.0, 2.0);
  CHECK_THROWS_AS(upsilon(e, 0.0), ConfigError);
  CHECK_THROWS_AS(upsilon(e, -1.0), ConfigError);

  double direct = 1.0;
  const long N = 1000000;
  for (long n = 1; n <= N; ++n)
    direct += 2.0 / (1.0 + 2.0 * double(n) * double(n));
  direct += 2.0 / (2.0 * double(N));
  CHECK(upsilon(e, 1.0).value == doctest::Approx(direct * kInvFourPiSq).epsilon(1e-10));

  double prev = 1e300;
  for (double r : { 0.1, 1.0, 10.0, 100.0, 1e4, 1e6 }) {
    const double v = upsilon(e, r).value;
    CHECK(v < prev);
    prev = v;
  }
  // for alpha = 2 the series behaves like a rate^{-1/2} for large rates
  const double u5 = upsilon(e, 1e5).value;
  const double u6 = upsilon(e, 1e6).value;
  CHECK(u6 / u5 == doctest::Approx(std::pow(10.0, -0.5)).epsilon(0.01));
  CHECK(u6 < 1e-3);

  const auto f = make_power_exponent(1.0, 1.5);
  const double rate = 2.0;
  double lap = 0.0;
  const double u_lo = -18.0, u_hi = std::log(40.0);
  const int steps = 800;
  const double du = (u_hi - u_lo) / steps;
  for (int j = 0; j <= steps; ++j) {
    const double s = std::exp(u_lo + j * du);
    const double w = (j == 0 || j == steps) ? 0.5 : 1.0;
    lap += w * du * s * std::exp(-rate * s) * kernel_l2_norm_sq(f, s).value;
  }
  lap += integrated_l2_norm_sq(f, std::exp(u_lo)).value;
  CHECK(lap == doctest::Approx(upsilon(f, rate).value).epsilon(1e-5));
}

TEST_CASE("semigroup action")
{
  const auto e = make_power_exponent(1.0, 2.0);
  const auto f = sample_field(32, [](double x) { return std::cos(x) + 0.3 * std::sin(3 * x); });
  const auto same = apply_semigroup(e, 0.0, f);
  for (std::size_t j = 0; j < f.size(); ++j)
    CHECK(same.values()[j] == f.values()[j]);

  const auto one = SpectralField::from_values(std::vector<double>(16, 1.0));
  const auto t_one = apply_semigroup(e, 3.0, one);
  for (double v : t_one.values())
    CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

  const auto c = sample_field(16, [](double x) { return std::cos(x); });
  const auto tc = apply_semigroup(e, 0.7, c);
  for (std::size_t j = 0; j < 16; ++j)
    CHECK(std::abs(tc.values()[j] - std::exp(-0.7) * std::cos(2 * pi * j / 16.0)) < 1e-15);

  const auto d = make_power_exponent(1.0, 1.5, 1.3);
  const auto ab = apply_semigroup(d, 0.2, apply_semigroup(d, 0.3, f));
  const auto direct = apply_semigroup(d, 0.5, f);
  for (std::size_t j = 0; j < f.size(); ++j)
    CHECK(std::abs(ab.values()[j] - direct.values()[j]) < 1e-14);
  CHECK_THROWS_AS(apply_semigroup(e, -0.1, f), ConfigError);
}

TEST_CASE("drift translates the field")
{
  // Phi(n) = i v n translates f to f(x - v t)
  const auto d = make_power_exponent(1e-9, 2.0, 1.0);
  const auto f = sample_field(64, [](double x) { return std::cos(x); });
  const auto g = apply_semigroup(d, 0.5, f);
  for (std::size_t j = 0; j < 64; ++j)
    CHECK(std::abs(g.values()[j] - std::cos(2 * pi * j / 64.0 - 0.5)) < 1e-8);
}

TEST_CASE("generator: constants, cosine and the difference quotient")
{
  const auto e = make_power_exponent(1.0, 2.0);
  const auto one = SpectralField::from_values(std::vector<double>(8, 2.5));
  for (double v : apply_generator(e, one).values())
    CHECK(std::abs(v) < 1e-15);
  const auto c = sample_field(16, [](double x) { return std::cos(x); });
  const auto lc = apply_generator(e, c);
  for (std::size_t j = 0; j < 16; ++j)
    CHECK(std::abs(lc.values()[j] + std::cos(2 * pi * j / 16.0)) < 1e-14);

  const auto d = make_power_exponent(1.0, 1.5, 0.5);
  const auto f = sample_field(32, [](double x) { return std::sin(2 * x) + std::cos(5 * x); });
  const auto lf = apply_generator(d, f);
  std::vector<double> errs;
  for (double h : { 1e-3, 5e-4, 2.5e-4 }) {
    const auto th = apply_semigroup(d, h, f);
    double worst = 0.0;
    for (std::size_t j = 0; j < 32; ++j)
      worst = std::max(worst, std::abs((th.values()[j] - f.values()[j]) / h - lf.values()[j]));
    errs.push_back(worst);
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(errs[1] / errs[2] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("generator domain test")
{
  const auto e = make_power_exponent(1.0, 2.0);
  const auto zero = SpectralField::from_values(std::vector<double>(16, 0.0));
  CHECK(in_generator_domain(e, zero, 1e-300));
  const auto c = sample_field(16, [](double x) { return std::cos(x); });
  CHECK(in_generator_domain(e, c, generator_domain_sum(e, c) * 1.01));

  std::vector<double> sums;
  for (long N : { 16, 64, 256 }) {
    std::vector<std::complex<double>> modes(2 * N + 1);
    for (long n = -N; n <= N; ++n)
      modes[n + N] = n == 0 ? 0.0 : 1.0 / std::abs(double(n));
    const auto f = SpectralField::from_modes(modes);
    sums.push_back(generator_domain_sum(e, f));
    if (N == 256) {
      CHECK_FALSE(in_generator_domain(e, f, 1e6));
      CHECK_THROWS_AS(apply_generator(e, f, 1e6), DomainError);
    }
  }
  CHECK(sums[1] > 3.5 * sums[0]);
  CHECK(sums[2] > 3.5 * sums[1]);
}

TEST_CASE("limit constant probe")
{
  const auto r = limit_constant_probe(2.0, 1e-6);
  CHECK(std::abs(r.value - std::tgamma(1.5)) < 1e-3);
  // Riemann-sum oracle lambda^{1/a} (int_0^inf e^{-lambda x^a} dx - 1/2)
  CHECK(std::abs(r.value - (std::tgamma(1.5) - 0.5 * std::sqrt(1e-6))) < 1e-9);
  for (double lam : { 1.0, 0.1, 1e-2, 1e-4 }) {
    const double v = limit_constant_probe(1.5, lam).value;
    CHECK(v > 0.0);
    CHECK(v < 2.0);
  }
  const double a = limit_constant_probe(1.5, 1e-8).value;
  const double b = limit_constant_probe(1.5, 0.5e-8).value;
  const double c = limit_constant_probe(1.5, 0.25e-8).value;
  CHECK(std::abs(a - b) / b < 0.01);
  CHECK(std::abs(b - c) / c < 0.01);
  CHECK_THROWS_AS(limit_constant_probe(1.0, 0.1), ConfigError);
  CHECK_THROWS_AS(limit_constant_probe(2.0, 0.0), ConfigError);
}

TEST_CASE("wrapped kernel oracle: density, symmetry")
{
  std::vector<double> q(256);
  for (int j = 0; j < 256; ++j)
    q[j] = wrapped_kernel_oracle(0.05, 2 * pi * j / 256.0, 10);
  CHECK(std::abs(trapezoid_periodic(q) - 1.0) < 1e-8);
  for (double x : { 0.1, 1.0, 2.5 }) {
    CHECK(wrapped_kernel_oracle(0.05, x, 10) ==
          doctest::Approx(wrapped_kernel_oracle(0.05, 2 * pi - x, 10)).epsilon(1e-14));
    CHECK(wrapped_kernel_oracle(0.05, x, 10) >= 0.0);
  }
}

TEST_CASE("exponent condition")
{
  const auto a = check_exponent_condition(2.0, 2.0);
  CHECK(a.theta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.admissible);
  const auto b = check_exponent_condition(4.0 / 3.0, 2.0);
  CHECK(std::abs(b.theta) < 1e-12);
  CHECK(b.admissible);
  CHECK(b.boundary);
  const auto c = check_exponent_condition(1.2, 2.0);
  CHECK_FALSE(c.admissible);
  CHECK(c.theta < 0.0);
  for (double al = 1.05; al <= 2.0; al += 0.05) {
    const auto s = check_exponent_condition(al, al);
    CHECK(s.admissible);
    CHECK(s.theta == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (double al = 1.05; al < 1.95; al += 0.05)
    for (double be = al + 0.03; be <= 2.0; be += 0.07) {
      const auto s = check_exponent_condition(al, be);
      if (!s.boundary)
        CHECK((s.theta > 0.0) == s.admissible);
    }
  CHECK_THROWS_AS(check_exponent_condition(1.0, 2.0), ConfigError);
  CHECK_THROWS_AS(check_exponent_condition(1.5, 2.5), ConfigError);
  CHECK_THROWS_AS(check_exponent_condition(1.8, 1.5), ConfigError);
}

TEST_CASE("kernel bound report: supremum inequality")
{
  const auto e = make_power_exponent(1.0, 1.5);
  const std::vector<double> ts{ 0.01, 0.1, 0.5, 1.0, 2.0, 5.0 };
  for (double rate : { 0.5, 1.0, 4.0 }) {
    const auto rep = verify_kernel_bounds(e, ts, rate);
    CHECK(rep.supineq_holds);
    for (const auto& row : rep.rows)
      CHECK(row.weighted_cumulative <= rep.upsilon_at_rate.value);
  }
  const auto mixed = make_mixed_exponent(1.0, 1.5, 1.0, 2.0);
  const auto rep = verify_kernel_bounds(mixed, ts, 1.0, 1e-8);
  CHECK(rep.supineq_holds);
  CHECK(rep.rows.size() == ts.size());
}
