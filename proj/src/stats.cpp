#include "mmimo/stats.hpp"

#include <algorithm>
#include <cmath>

#include "mmimo/errors.hpp"

namespace mmimo {

void NeumaierSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

double percentile_nearest_rank(std::span<const double> samples, double percent) {
  if (samples.empty()) throw ContractViolation("percentile of an empty sample");
  if (!(percent > 0.0 && percent <= 100.0)) throw DomainError("percentile must lie in (0, 100]");
  std::vector<double> s(samples.begin(), samples.end());
  const auto n = static_cast<double>(s.size());
  auto rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, s.size());
  auto it = s.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(s.begin(), it, s.end());
  return *it;
}

std::vector<CdfPoint> compute_cdf(std::span<const double> samples) {
  if (samples.empty()) throw ContractViolation("CDF of an empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const auto n = static_cast<double>(s.size());
  std::vector<CdfPoint> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 1 < s.size() && s[i + 1] == s[i]) continue;
    const double f = static_cast<double>(i + 1) / n;
    out.push_back({s[i], f, 1.0 - f});
  }
  return out;
}

}  // namespace mmimo
