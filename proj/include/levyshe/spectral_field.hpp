#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace levyshe {

/// A real field on m equispaced torus points x_j = 2 pi j / m together with
/// its Fourier coefficients in the convention
///
///   f(x) = sum_n fhat(n) exp(-i n x),   fhat(n) = (1/2pi) int exp(i n x) f(x) dx,
///
/// for |n| <= cutoff() = m/2. For even m the Nyquist content is split evenly
/// between n = +m/2 and n = -m/2, which keeps the coefficients Hermitian and
/// makes the values <-> modes map exact at the grid points.
class SpectralField
{
public:
  using Multiplier = std::function<std::complex<double>(long)>;

  static SpectralField from_values(std::vector<double> values);

  /// Coefficients for n = -N..N (2N+1 entries, must be Hermitian) sampled on
  /// m >= 2N+1 points. With m = 0 the smallest odd grid 2N+1 is used.
  static SpectralField from_modes(std::span<const std::complex<double>> modes,
                                  std::size_t m = 0);

  std::size_t size() const { return values_.size(); }
  long cutoff() const { return static_cast<long>(values_.size() / 2); }
  std::span<const double> values() const { return values_; }

  std::complex<double> mode(long n) const;

  /// Trigonometric interpolant at an arbitrary point.
  double evaluate(double x) const;

  /// Returns the field whose mode n is mult(n) * fhat(n). mult must be
  /// Hermitian (mult(-n) = conj(mult(n))) for the result to be real.
  SpectralField with_multiplier(const Multiplier& mult) const;

  /// Raw r2c spectrum X_k, k = 0..m/2, with fhat(-k) = X_k / m off Nyquist.
  std::span<const std::complex<double>> spectrum() const { return spectrum_; }

private:
  SpectralField(std::vector<double> values,
                std::vector<std::complex<double>> spectrum)
    : values_(std::move(values))
    , spectrum_(std::move(spectrum))
  {
  }

  std::vector<double> values_;
  std::vector<std::complex<double>> spectrum_;
};

/// Samples f at the m grid points.
SpectralField sample_field(std::size_t m, const std::function<double(double)>& f);

} // namespace levyshe
