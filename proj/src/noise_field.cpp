#include "levyshe/noise_field.hpp"

#include "levyshe/errors.hpp"
#include "levyshe/philox.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace levyshe {

double GridSpec::dx() const
{
  return 2.0 * std::numbers::pi / static_cast<double>(m_space);
}

void GridSpec::validate() const
{
  if (m_space < 2)
    throw ConfigError("m_space must be at least 2");
  if (k_time < 1)
    throw ConfigError("k_time must be at least 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ConfigError("horizon must be positive and finite");
}

namespace {

double poly(const double (&c)[8], double x)
{
  double r = c[7];
  for (int j = 6; j >= 0; --j)
    r = r * x + c[j];
  return r;
}

} // namespace

double inverse_normal_cdf(double p)
{
  static constexpr double a[8] = { 3.3871328727963666080e0, 1.3314166789178437745e2,
                                   1.9715909503065514427e3, 1.3731693765509461125e4,
                                   4.5921953931549871457e4, 6.7265770927008700853e4,
                                   3.3430575583588128105e4, 2.5090809287301226727e3 };
  static constexpr double b[8] = { 1.0,
                                   4.2313330701600911252e1, 6.8718700749205790830e2,
                                   5.3941960214247511077e3, 2.1213794301586595867e4,
                                   3.9307895800092710610e4, 2.8729085735721942674e4,
                                   5.2264952788528545610e3 };
  static constexpr double c[8] = { 1.42343711074968357734e0, 4.63033784615654529590e0,
                                   5.76949722146069140550e0, 3.64784832476320460504e0,
                                   1.27045825245236838258e0, 2.41780725177450611770e-1,
                                   2.27238449892691845833e-2, 7.74545014278341407640e-4 };
  static constexpr double d[8] = { 1.0,
                                   2.05319162663775882187e0, 1.67638483018380384940e0,
                                   6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                   1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                   1.05075007164441684324e-9 };
  static constexpr double e[8] = { 6.65790464350110377720e0, 5.46378491116411436990e0,
                                   1.78482653991729133580e0, 2.96560571828504891230e-1,
                                   2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                   2.71155556874348757815e-5, 2.01033439929228813265e-7 };
  static constexpr double f[8] = { 1.0,
                                   5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                   1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                   1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                   2.04426310338993978564e-15 };

  if (!(p > 0.0 && p < 1.0))
    throw DomainError("inverse normal CDF needs 0 < p < 1");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(a, r) / poly(b, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    z = poly(c, r) / poly(d, r);
  } else {
    r -= 5.0;
    z = poly(e, r) / poly(f, r);
  }
  return q < 0.0 ? -z : z;
}

double normal_variate(std::uint64_t seed, std::uint64_t replica, std::uint64_t k,
                      std::uint64_t i)
{
  const PhiloxKey key{ static_cast<std::uint32_t>(seed),
                       static_cast<std::uint32_t>(seed >> 32) };
  const PhiloxCounter ctr{ static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k),
                           static_cast<std::uint32_t>(replica),
                           static_cast<std::uint32_t>(replica >> 32) };
  const auto w = philox4x32_10(ctr, key);
  const std::uint64_t bits = (std::uint64_t{ w[1] } << 32) | w[0];
  const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
  return inverse_normal_cdf(u);
}

NoiseField::NoiseField(GridSpec grid, std::uint64_t seed, std::uint64_t replica,
                       std::vector<double> xi)
  : grid_(grid)
  , seed_(seed)
  , replica_(replica)
  , xi_(std::move(xi))
{
  if (xi_.size() != grid_.k_time * grid_.m_space)
    throw ConfigError("noise field size does not match the grid");
}

void NoiseField::check(std::size_t k, std::size_t i) const
{
  if (k >= grid_.k_time || i >= grid_.m_space)
    throw std::out_of_range("noise cell (" + std::to_string(k) + ", " +
                            std::to_string(i) + ") outside the grid");
}

double NoiseField::xi(std::size_t k, std::size_t i) const
{
  check(k, i);
  return xi_[k * grid_.m_space + i];
}

std::span<const double> NoiseField::row(std::size_t k) const
{
  check(k, 0);
  return std::span<const double>(xi_).subspan(k * grid_.m_space, grid_.m_space);
}

double NoiseField::increment(std::size_t k, std::size_t i) const
{
  return xi(k, i) * std::sqrt(grid_.dt() * grid_.dx());
}

NoiseField NoiseField::perturbed(std::size_t k, std::size_t i, double delta) const
{
  check(k, i);
  NoiseField out = *this;
  out.xi_[k * grid_.m_space + i] += delta;
  return out;
}

NoiseField sample_noise(const GridSpec& grid, std::uint64_t seed, std::uint64_t replica)
{
  grid.validate();
  std::vector<double> xi(grid.k_time * grid.m_space);
  for (std::size_t k = 0; k < grid.k_time; ++k)
    for (std::size_t i = 0; i < grid.m_space; ++i)
      xi[k * grid.m_space + i] = normal_variate(seed, replica, k, i);
  return NoiseField(grid, seed, replica, std::move(xi));
}

} // namespace levyshe
