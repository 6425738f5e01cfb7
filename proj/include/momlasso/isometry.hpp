#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "momlasso/mom_tests.hpp"

namespace momlasso {

struct IsometrySample {
  double mom_distance;
  double true_l2;
  double ratio;  ///< mom_distance / true_l2, reported as 1 when v = 0
};

/// MOM_K |<x, v>| against ||v||_2 for one direction (isotropic design:
/// the population L2 norm of <., v> is ||v||_2).
IsometrySample isometry_sample(const TestContext& ctx, const Coef& v);

/// Random unit directions on a seeded partition of ds into k blocks.
std::vector<IsometrySample> diagnose_isometry(const Dataset& ds, std::size_t k, std::size_t directions,
                                              std::uint64_t seed);

}  // namespace momlasso
