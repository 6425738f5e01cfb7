#include "momlasso/baseline.hpp"

#include <stdexcept>

#include "momlasso/error.hpp"
#include "momlasso/solver.hpp"

namespace momlasso {

LassoResult fit_lasso(const Dataset& ds, double lambda, const LassoOptions& opts,
                      const std::optional<Coef>& init) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  if (ds.n() == 0) throw std::invalid_argument("empty dataset");
  if (init) require_dimension(ds, *init);

  // One block holding every sample: the block Lipschitz estimate is the full one.
  const double lip = block_lipschitz(ds, make_partition(ds.n(), 1), 50);
  const double step = lip > 0.0 ? 1.0 / (1.01 * lip) : 1.0;
  const double scale = 2.0 / static_cast<double>(ds.n());

  LassoResult res;
  res.t = init ? *init : Coef(Coef::Zero(static_cast<Eigen::Index>(ds.d())));
  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    const Vector grad = -scale * (ds.xs().transpose() * (ds.ys() - ds.xs() * res.t));
    Coef next = soft_threshold(res.t - step * grad, step * lambda);
    if (!next.allFinite()) throw NumericFailure("non-finite LASSO iterate", it);
    const double move = (next - res.t).norm();
    res.t = std::move(next);
    res.iters = it + 1;
    if (move < opts.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace momlasso
