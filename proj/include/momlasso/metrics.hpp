#pragma once

#include "momlasso/linear_model.hpp"

namespace momlasso {

struct EstimateErrors {
  double l1 = 0.0;
  double l2 = 0.0;
  double support_precision = 0.0;  ///< 1 when the estimate has empty support
  double support_recall = 0.0;     ///< 1 when the truth has empty support
};

/// Support means exactly nonzero entries.
EstimateErrors estimate_errors(const Coef& estimate, const Coef& truth);

}  // namespace momlasso
