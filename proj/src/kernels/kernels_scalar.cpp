#include <algorithm>
#include <cstddef>

#include "noveldetect/kernels.hpp"

namespace noveldetect::kernels::scalar {

double sum(std::span<const double> values) {
  const std::size_t n = values.size();
  const std::size_t blocks = n / 4 * 4;
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  for (std::size_t j = 0; j < blocks; j += 4) {
    l0 += values[j];
    l1 += values[j + 1];
    l2 += values[j + 2];
    l3 += values[j + 3];
  }
  double total = (l0 + l2) + (l1 + l3);
  for (std::size_t j = blocks; j < n; ++j) total += values[j];
  return total;
}

double gather_min_sum(const double* dense, std::span<const TermId> ids, std::span<const double> weights) {
  const std::size_t n = ids.size();
  const std::size_t blocks = n / 4 * 4;
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  for (std::size_t j = 0; j < blocks; j += 4) {
    l0 += std::min(dense[ids[j]], weights[j]);
    l1 += std::min(dense[ids[j + 1]], weights[j + 1]);
    l2 += std::min(dense[ids[j + 2]], weights[j + 2]);
    l3 += std::min(dense[ids[j + 3]], weights[j + 3]);
  }
  double total = (l0 + l2) + (l1 + l3);
  for (std::size_t j = blocks; j < n; ++j) total += std::min(dense[ids[j]], weights[j]);
  return total;
}

}  // namespace noveldetect::kernels::scalar
