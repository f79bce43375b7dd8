#include "levyshe/fft.hpp"

#include "levyshe/errors.hpp"

#include <algorithm>
#include <cstring>
#include <fftw3.h>
#include <mutex>
#include <utility>

namespace levyshe {

namespace {
std::mutex& planner_mutex()
{
  static std::mutex m;
  return m;
}
} // namespace

RealFft::RealFft(std::size_t m)
  : m_(m)
{
  if (m < 2)
    throw ConfigError("fft length must be at least 2");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(m_);
  auto* cplx = fftw_alloc_complex(m_ / 2 + 1);
  complex_ = cplx;
  // FFTW_ESTIMATE selects the algorithm without timing, so plans (and hence
  // output bits) are reproducible run to run.
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(m_), real_, cplx,
                                       FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(m_), cplx, real_,
                                       FFTW_ESTIMATE);
}

RealFft::~RealFft()
{
  release();
}

RealFft::RealFft(RealFft&& other) noexcept
  : m_(std::exchange(other.m_, 0))
  , real_(std::exchange(other.real_, nullptr))
  , complex_(std::exchange(other.complex_, nullptr))
  , forward_plan_(std::exchange(other.forward_plan_, nullptr))
  , inverse_plan_(std::exchange(other.inverse_plan_, nullptr))
{
}

RealFft& RealFft::operator=(RealFft&& other) noexcept
{
  if (this != &other) {
    release();
    m_ = std::exchange(other.m_, 0);
    real_ = std::exchange(other.real_, nullptr);
    complex_ = std::exchange(other.complex_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void RealFft::release() noexcept
{
  if (!real_)
    return;
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(complex_);
  real_ = nullptr;
  complex_ = nullptr;
}

void RealFft::forward(std::span<const double> values,
                      std::span<std::complex<double>> spectrum)
{
  std::copy(values.begin(), values.end(), real_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::memcpy(static_cast<void*>(spectrum.data()), complex_,
              spectrum_size() * sizeof(std::complex<double>));
}

void RealFft::inverse(std::span<const std::complex<double>> spectrum,
                      std::span<double> values)
{
  // c2r destroys its input, so it always runs on the internal copy.
  std::memcpy(complex_, static_cast<const void*>(spectrum.data()),
              spectrum_size() * sizeof(std::complex<double>));
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  std::copy(real_, real_ + m_, values.begin());
}

} // namespace levyshe
