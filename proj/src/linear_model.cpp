#include "momlasso/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace momlasso {

Dataset::Dataset(Matrix xs, Vector ys, std::optional<GroundTruth> meta)
    : xs_(std::move(xs)), ys_(std::move(ys)), meta_(std::move(meta)) {
  if (xs_.rows() != ys_.size()) {
    throw std::invalid_argument("design has " + std::to_string(xs_.rows()) + " rows but " +
                                std::to_string(ys_.size()) + " responses");
  }
  if (meta_) {
    if (!meta_->outlier_mask.empty() && meta_->outlier_mask.size() != n()) {
      throw std::invalid_argument("outlier mask length does not match sample size");
    }
    if (meta_->outlier_mask.empty()) meta_->outlier_mask.assign(n(), false);
    if (meta_->t_star.size() != 0 && static_cast<std::size_t>(meta_->t_star.size()) != d()) {
      throw std::invalid_argument("ground-truth coefficient has wrong dimension");
    }
  }
}

std::size_t Dataset::outlier_count() const {
  if (!meta_) return 0;
  return static_cast<std::size_t>(
      std::count(meta_->outlier_mask.begin(), meta_->outlier_mask.end(), true));
}

void require_dimension(const Dataset& ds, const Coef& t) {
  if (static_cast<std::size_t>(t.size()) != ds.d()) {
    throw std::invalid_argument("coefficient dimension " + std::to_string(t.size()) +
                                " does not match design dimension " + std::to_string(ds.d()));
  }
}

std::vector<double> loss_values(const Dataset& ds, const Coef& t) {
  require_dimension(ds, t);
  const Vector residual = ds.ys() - ds.xs() * t;
  std::vector<double> out(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double r = residual[static_cast<Eigen::Index>(i)];
    out[i] = r * r;
  }
  return out;
}

double lp_norm(const Coef& t, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("l_p norm requires p >= 1");
  if (std::isinf(p)) return t.size() == 0 ? 0.0 : t.cwiseAbs().maxCoeff();
  if (p == 1.0) return t.lpNorm<1>();
  if (p == 2.0) return t.norm();
  double sum = 0.0;
  for (double v : t) sum += std::pow(std::abs(v), p);
  return std::pow(sum, 1.0 / p);
}

Coef soft_threshold(const Coef& t, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("soft threshold level must be nonnegative");
  Coef out(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    const double a = std::abs(t[j]) - tau;
    out[j] = a > 0.0 ? std::copysign(a, t[j]) : 0.0;
  }
  return out;
}

}  // namespace momlasso
