#pragma once

#include <functional>

#include "momlasso/blocks.hpp"
#include "momlasso/linear_model.hpp"

namespace momlasso {

/// Data, block partition and regularization level shared by a family of
/// MOM tests. The dataset must outlive the context.
class TestContext {
 public:
  TestContext(const Dataset& ds, BlockPartition partition, double lambda);

  const Dataset& dataset() const noexcept { return ds_.get(); }
  const BlockPartition& partition() const noexcept { return partition_; }
  double lambda() const noexcept { return lambda_; }

 private:
  std::reference_wrapper<const Dataset> ds_;
  BlockPartition partition_;
  double lambda_;
};

/// T(g, f) = MOM_K[l_f - l_g] + lambda (|f|_1 - |g|_1); the loss difference is
/// formed per sample before block averaging, so T(f, g) == -T(g, f) exactly.
double test_stat(const TestContext& ctx, const Coef& g, const Coef& f);

/// g beats f iff T(g, f) >= 0.
bool beats(const TestContext& ctx, const Coef& g, const Coef& f);

/// MOM_K |<x, g - f>|.
double mom_distance(const TestContext& ctx, const Coef& g, const Coef& f);

}  // namespace momlasso
