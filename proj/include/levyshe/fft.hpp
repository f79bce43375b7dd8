#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace levyshe {

/// Real-to-complex FFT of fixed length on the torus grid, backed by FFTW.
///
/// forward: X_k = sum_j v_j exp(-2 pi i j k / m), k = 0..m/2
/// inverse: v_j = sum_k X_k exp(+2 pi i j k / m) over the Hermitian extension
/// (unnormalized; divide by m to invert forward).
///
/// Plan creation is serialized internally; execution on distinct instances
/// is safe from concurrent threads. Instances own their buffers and plans.
class RealFft
{
public:
  explicit RealFft(std::size_t m);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&& other) noexcept;
  RealFft& operator=(RealFft&& other) noexcept;

  std::size_t size() const { return m_; }
  std::size_t spectrum_size() const { return m_ / 2 + 1; }

  void forward(std::span<const double> values,
               std::span<std::complex<double>> spectrum);
  void inverse(std::span<const std::complex<double>> spectrum,
               std::span<double> values);

private:
  void release() noexcept;

  std::size_t m_ = 0;
  double* real_ = nullptr;
  void* complex_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

} // namespace levyshe
