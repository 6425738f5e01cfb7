#include "momlasso/metrics.hpp"

#include <stdexcept>

namespace momlasso {

EstimateErrors estimate_errors(const Coef& estimate, const Coef& truth) {
  if (estimate.size() != truth.size()) throw std::invalid_argument("dimension mismatch");
  EstimateErrors e;
  const Coef diff = estimate - truth;
  e.l1 = diff.lpNorm<1>();
  e.l2 = diff.norm();
  std::size_t est_support = 0, true_support = 0, both = 0;
  for (Eigen::Index j = 0; j < truth.size(); ++j) {
    const bool a = estimate[j] != 0.0;
    const bool b = truth[j] != 0.0;
    est_support += a;
    true_support += b;
    both += a && b;
  }
  e.support_precision = est_support ? static_cast<double>(both) / static_cast<double>(est_support) : 1.0;
  e.support_recall = true_support ? static_cast<double>(both) / static_cast<double>(true_support) : 1.0;
  return e;
}

}  // namespace momlasso
