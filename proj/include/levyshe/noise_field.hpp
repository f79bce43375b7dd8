#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace levyshe {

/// Discretization of [0,T] x [0,2pi): x_i = i dx, t_k = k dt.
struct GridSpec
{
  std::size_t m_space = 0;
  std::size_t k_time = 0;
  double horizon = 0.0;

  double dt() const { return horizon / static_cast<double>(k_time); }
  double dx() const;
  double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
  double t(std::size_t k) const { return static_cast<double>(k) * dt(); }

  /// Throws ConfigError unless m_space >= 2, k_time >= 1 and horizon > 0.
  void validate() const;
};

inline constexpr const char* kRngDescription =
  "philox4x32-10; key = (seed lo, seed hi); counter = (i, k, replica lo, "
  "replica hi); uniform = ((w1:w0 >> 11) + 0.5) * 2^-53; "
  "normal = Wichura AS241 inverse CDF";

/// Inverse of the standard normal CDF (Wichura, AS241; about 1e-16 relative).
double inverse_normal_cdf(double p);

/// Standard normal variate of cell (k, i) of replica `replica` under `seed`.
double normal_variate(std::uint64_t seed, std::uint64_t replica, std::uint64_t k,
                      std::uint64_t i);

/// K x M i.i.d. standard normals driving one replica. Row k feeds the step
/// from t_k to t_{k+1}.
class NoiseField
{
public:
  NoiseField(GridSpec grid, std::uint64_t seed, std::uint64_t replica,
             std::vector<double> xi);

  const GridSpec& grid() const { return grid_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t replica() const { return replica_; }

  double xi(std::size_t k, std::size_t i) const;
  std::span<const double> row(std::size_t k) const;

  /// xi(k, i) * sqrt(dt dx): the white-noise mass of cell (k, i).
  double increment(std::size_t k, std::size_t i) const;

  /// Copy with xi(k, i) shifted by delta.
  NoiseField perturbed(std::size_t k, std::size_t i, double delta) const;

private:
  void check(std::size_t k, std::size_t i) const;

  GridSpec grid_;
  std::uint64_t seed_;
  std::uint64_t replica_;
  std::vector<double> xi_;
};

NoiseField sample_noise(const GridSpec& grid, std::uint64_t seed,
                        std::uint64_t replica);

} // namespace levyshe
