#include "levyk/quadrature.hpp"

namespace levyk::quad {

Accelerated iterated_average(std::span<const double> partial_sums) {
  std::vector<double> s(partial_sums.begin(), partial_sums.end());
  if (s.empty()) return {0.0, 0.0};
  if (s.size() == 1) return {s[0], 0.0};
  while (s.size() > 2) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) s[i] = 0.5 * (s[i] + s[i + 1]);
    s.pop_back();
  }
  // The two survivors straddle the limit; their half-gap bounds the error.
  return {0.5 * (s[0] + s[1]), 0.5 * std::abs(s[0] - s[1])};
}

}  // namespace levyk::quad
