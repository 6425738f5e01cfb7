#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace momlasso {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Coefficient vector t of the linear functional x -> <x, t>.
using Coef = Vector;

/// Simulation ground truth carried alongside the data it describes.
struct GroundTruth {
  Coef t_star;
  std::vector<bool> outlier_mask;
};

/// N design rows in R^d with scalar responses.
class Dataset {
 public:
  Dataset(Matrix xs, Vector ys, std::optional<GroundTruth> meta = std::nullopt);

  std::size_t n() const noexcept { return static_cast<std::size_t>(xs_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(xs_.cols()); }

  const Matrix& xs() const noexcept { return xs_; }
  const Vector& ys() const noexcept { return ys_; }
  const std::optional<GroundTruth>& meta() const noexcept { return meta_; }

  std::size_t outlier_count() const;

 private:
  Matrix xs_;
  Vector ys_;
  std::optional<GroundTruth> meta_;
};

/// Per-sample squared residuals (y_i - <x_i, t>)^2.
std::vector<double> loss_values(const Dataset& ds, const Coef& t);

/// l_p norm for p in [1, inf]; pass std::numeric_limits<double>::infinity()
/// for the sup norm.
double lp_norm(const Coef& t, double p);

inline double l1_norm(const Coef& t) { return t.lpNorm<1>(); }

/// Proximal map of tau * ||.||_1.
Coef soft_threshold(const Coef& t, double tau);

void require_dimension(const Dataset& ds, const Coef& t);

}  // namespace momlasso
