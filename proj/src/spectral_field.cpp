#include "levyshe/spectral_field.hpp"

#include "levyshe/errors.hpp"
#include "levyshe/fft.hpp"

#include <cmath>
#include <numbers>

namespace levyshe {

SpectralField SpectralField::from_values(std::vector<double> values)
{
  if (values.size() < 2)
    throw ConfigError("spectral field needs at least 2 points");
  RealFft fft(values.size());
  std::vector<std::complex<double>> spectrum(fft.spectrum_size());
  fft.forward(values, spectrum);
  return SpectralField(std::move(values), std::move(spectrum));
}

SpectralField SpectralField::from_modes(std::span<const std::complex<double>> modes,
                                        std::size_t m)
{
  if (modes.size() % 2 == 0)
    throw ConfigError("mode vector must hold n = -N..N (odd length)");
  const long N = static_cast<long>(modes.size() / 2);
  if (m == 0)
    m = static_cast<std::size_t>(2 * N + 1);
  if (m < static_cast<std::size_t>(2 * N + 1) || m < 2)
    throw ConfigError("grid too coarse for the requested modes");

  double scale = 0.0;
  for (const auto& c : modes)
    scale = std::max(scale, std::abs(c));
  for (long n = 1; n <= N; ++n) {
    const auto d = modes[N + n] - std::conj(modes[N - n]);
    if (std::abs(d) > 1e-12 * std::max(scale, 1.0))
      throw ConfigError("modes are not Hermitian; field would not be real");
  }
  if (std::abs(modes[N].imag()) > 1e-12 * std::max(scale, 1.0))
    throw ConfigError("zero mode must be real");

  const double md = static_cast<double>(m);
  std::vector<std::complex<double>> spectrum(m / 2 + 1);
  for (long k = 0; k <= N; ++k)
    spectrum[k] = md * modes[N - k]; // X_k = m * fhat(-k)
  spectrum[0] = spectrum[0].real();

  RealFft fft(m);
  std::vector<double> values(m);
  fft.inverse(spectrum, values);
  for (double& v : values)
    v /= md;
  // Re-derive the spectrum from the values so both views agree exactly.
  fft.forward(values, spectrum);
  return SpectralField(std::move(values), std::move(spectrum));
}

std::complex<double> SpectralField::mode(long n) const
{
  const long m = static_cast<long>(values_.size());
  const long k = std::abs(n);
  if (k > cutoff())
    return 0.0;
  const double md = static_cast<double>(m);
  if (m % 2 == 0 && k == m / 2)
    return spectrum_[k].real() / (2.0 * md);
  if (n <= 0)
    return spectrum_[k] / md;
  return std::conj(spectrum_[k]) / md;
}

double SpectralField::evaluate(double x) const
{
  double acc = mode(0).real();
  for (long n = 1; n <= cutoff(); ++n) {
    const auto e = std::polar(1.0, -static_cast<double>(n) * x);
    acc += (mode(n) * e).real() + (mode(-n) * std::conj(e)).real();
  }
  return acc;
}

SpectralField SpectralField::with_multiplier(const Multiplier& mult) const
{
  const std::size_t m = values_.size();
  std::vector<std::complex<double>> spectrum(spectrum_.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const long n = static_cast<long>(k);
    if (m % 2 == 0 && k == m / 2) {
      // Both halves of the Nyquist pair: (mult(N) + mult(-N)) / 2.
      spectrum[k] = spectrum_[k].real() * 0.5 * (mult(n) + mult(-n));
    } else {
      spectrum[k] = mult(-n) * spectrum_[k]; // index k carries fhat(-k)
    }
  }
  spectrum[0] = spectrum[0].real();

  RealFft fft(m);
  std::vector<double> values(m);
  fft.inverse(spectrum, values);
  for (double& v : values)
    v /= static_cast<double>(m);
  fft.forward(values, spectrum);
  return SpectralField(std::move(values), std::move(spectrum));
}

SpectralField sample_field(std::size_t m, const std::function<double(double)>& f)
{
  std::vector<double> values(m);
  const double dx = 2.0 * std::numbers::pi / static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j)
    values[j] = f(static_cast<double>(j) * dx);
  return SpectralField::from_values(std::move(values));
}

} // namespace levyshe
