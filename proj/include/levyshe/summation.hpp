#pragma once

#include <cmath>
#include <span>

namespace levyshe {

// Neumaier's variant of Kahan summation.
class CompensatedSum
{
public:
  void add(double x)
  {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }

  void add(const CompensatedSum& other)
  {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs)
{
  CompensatedSum s;
  for (double x : xs)
    s.add(x);
  return s.value();
}

} // namespace levyshe
