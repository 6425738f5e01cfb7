#include "momlasso/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace momlasso {

BlockPartition::BlockPartition(std::size_t n_total, std::size_t k, std::vector<std::size_t> order)
    : n_total_(n_total), k_(k), block_size_(k == 0 ? 0 : n_total / k), order_(std::move(order)) {
  if (k_ == 0 || k_ > n_total_) {
    throw std::invalid_argument("block count must satisfy 1 <= k <= n (k=" + std::to_string(k) +
                                ", n=" + std::to_string(n_total) + ")");
  }
  if (order_.size() != n_total_) {
    throw std::invalid_argument("index order must be a permutation of the sample indices");
  }
}

BlockPartition make_partition(std::size_t n, std::size_t k, std::optional<std::uint64_t> shuffle_seed) {
  if (k == 0 || k > n) {
    throw std::invalid_argument("block count must satisfy 1 <= k <= n (k=" + std::to_string(k) +
                                ", n=" + std::to_string(n) + ")");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle_seed) {
    // Hand-rolled Fisher-Yates: std::shuffle's draw sequence is
    // implementation-defined and partitions must be reproducible.
    std::mt19937_64 rng(*shuffle_seed);
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
  }
  return BlockPartition(n, k, std::move(order));
}

std::vector<double> block_means(std::span<const double> values, const BlockPartition& p) {
  if (values.size() != p.n_total()) {
    throw std::invalid_argument("values length " + std::to_string(values.size()) +
                                " does not match partition size " + std::to_string(p.n_total()));
  }
  std::vector<double> means(p.k());
  const double m = static_cast<double>(p.block_size());
  for (std::size_t j = 0; j < p.k(); ++j) {
    double sum = 0.0;
    for (std::size_t i : p.block(j)) sum += values[i];
    means[j] = sum / m;
  }
  return means;
}

QuantileInterval quantile_interval(std::span<const double> list, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  if (list.empty()) {
    throw std::invalid_argument("quantiles of an empty list");
  }
  std::vector<double> sorted(list.begin(), list.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t k = sorted.size();
  const double kd = static_cast<double>(k);

  // #{m <= x} >= alpha k  <=>  x >= m_(a), a = ceil(alpha k) (1-based).
  // #{m >= x} >= (1-alpha) k  <=>  x <= m_(k+1-b), b = ceil((1-alpha) k).
  const auto a = static_cast<std::size_t>(std::ceil(alpha * kd));
  auto b = static_cast<std::size_t>(std::ceil((1.0 - alpha) * kd));
  // ceil(x) + ceil(k - x) <= k + 1; rounding in (1 - alpha) can break it.
  if (a + b > k + 1) b = k + 1 - a;
  const double inf = std::numeric_limits<double>::infinity();
  QuantileInterval q{};
  q.alpha = alpha;
  q.lo = a == 0 ? -inf : sorted[a - 1];
  q.hi = b == 0 ? inf : sorted[k - b];
  return q;
}

QuantileInterval quantile_of_means(std::span<const double> values, const BlockPartition& p,
                                   double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  const auto means = block_means(values, p);
  return quantile_interval(means, alpha);
}

double midpoint_median(std::span<const double> list) {
  return quantile_interval(list, 0.5).midpoint();
}

double mom(std::span<const double> values, const BlockPartition& p) {
  return quantile_of_means(values, p, 0.5).midpoint();
}

}  // namespace momlasso
