#pragma once

#include <cstddef>
#include <optional>

#include "momlasso/linear_model.hpp"

namespace momlasso {

struct LassoOptions {
  std::size_t max_iters = 20000;
  double tol = 1e-10;  ///< l2 movement of the iterate
};

struct LassoResult {
  Coef t;
  std::size_t iters = 0;
  bool converged = false;
};

/// Full-sample proximal gradient for (1/N) sum (y_i - <x_i, t>)^2 + lambda |t|_1
/// with step 1/L, L = 2 lambda_max(X^T X / N). Throws NumericFailure on
/// non-finite iterates.
LassoResult fit_lasso(const Dataset& ds, double lambda, const LassoOptions& opts = {},
                      const std::optional<Coef>& init = std::nullopt);

inline Coef fit_lasso_baseline(const Dataset& ds, double lambda, const LassoOptions& opts = {}) {
  return fit_lasso(ds, lambda, opts).t;
}

}  // namespace momlasso
