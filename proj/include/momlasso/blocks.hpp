#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace momlasso {

/// Equipartition of sample indices {0..n-1} into k blocks of size floor(n/k).
/// When k does not divide n, the trailing n mod k indices of the (possibly
/// shuffled) order are dropped.
class BlockPartition {
 public:
  BlockPartition(std::size_t n_total, std::size_t k, std::vector<std::size_t> order);

  std::size_t k() const noexcept { return k_; }
  std::size_t block_size() const noexcept { return block_size_; }
  std::size_t n_total() const noexcept { return n_total_; }
  std::size_t n_used() const noexcept { return k_ * block_size_; }

  std::span<const std::size_t> block(std::size_t j) const {
    return {order_.data() + j * block_size_, block_size_};
  }
  /// Retained indices, block after block.
  std::span<const std::size_t> indices() const { return {order_.data(), n_used()}; }

 private:
  std::size_t n_total_;
  std::size_t k_;
  std::size_t block_size_;
  std::vector<std::size_t> order_;
};

/// Closed interval [lo, hi] of alpha-quantiles of a list of block means.
struct QuantileInterval {
  double lo;
  double hi;
  double alpha;

  double midpoint() const { return 0.5 * (lo + hi); }
};

/// Consecutive slicing when no seed is given, otherwise a seeded uniform
/// shuffle before slicing. Throws std::invalid_argument unless 1 <= k <= n.
BlockPartition make_partition(std::size_t n, std::size_t k,
                              std::optional<std::uint64_t> shuffle_seed = std::nullopt);

std::vector<double> block_means(std::span<const double> values, const BlockPartition& p);

/// Quantile set of an arbitrary list; for alpha in {0, 1} the open side is
/// reported as -inf / +inf.
QuantileInterval quantile_interval(std::span<const double> list, double alpha);

QuantileInterval quantile_of_means(std::span<const double> values, const BlockPartition& p,
                                   double alpha);

/// Median of block means, taken as the midpoint of the 1/2-quantile interval
/// so that mom(-v) == -mom(v) holds exactly.
double mom(std::span<const double> values, const BlockPartition& p);

/// Midpoint median of an arbitrary list (same convention as mom()).
double midpoint_median(std::span<const double> list);

}  // namespace momlasso
