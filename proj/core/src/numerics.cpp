#include "noisewalk/numerics.hpp"

#include <algorithm>

#include "noisewalk/error.hpp"

namespace noisewalk {

double median(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("median of an empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double lil_scale(double t) {
  if (t < 3.0) throw DomainError("log log normalization needs t >= 3");
  return std::sqrt(2.0 * t * std::log(std::log(t)));
}

}  // namespace noisewalk
