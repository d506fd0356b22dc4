#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mmimo {

/// Compensated (Neumaier) running sum.
class NeumaierSum {
 public:
  void add(double v);
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Smallest sample x with at least ceil(p/100 * n) samples <= x.
double percentile_nearest_rank(std::span<const double> samples, double percent);

struct CdfPoint {
  double value = 0.0;
  double cdf = 0.0;   // P(X <= value)
  double ccdf = 0.0;  // P(X > value)
};

/// One point per distinct sample value, ascending.
std::vector<CdfPoint> compute_cdf(std::span<const double> samples);

}  // namespace mmimo
