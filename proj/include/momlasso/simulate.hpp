#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "momlasso/kv_config.hpp"
#include "momlasso/linear_model.hpp"

namespace momlasso {

enum class DesignKind { gaussian, student_t };
enum class NoiseKind { gaussian, student_t };
enum class SignalKind { sparse, near_sparse };
enum class OutlierKind { none, response_blowup, leverage, sign_flip, adversarial_cluster };
enum class Placement { uniform, adversarial };

struct DesignSpec {
  DesignKind kind = DesignKind::gaussian;
  double df = 3.0;  ///< student-t entries are rescaled to unit variance
};

struct NoiseSpec {
  NoiseKind kind = NoiseKind::gaussian;
  double df = 3.0;
  double scale = 1.0;  ///< gaussian standard deviation or student-t scale
};

struct OutlierModel {
  OutlierKind kind = OutlierKind::none;
  double magnitude = 1e6;
  std::optional<Coef> target;  ///< adversarial-cluster target, defaults to -t*
  /// uniform: seeded random indices; adversarial: evenly spread indices so
  /// that consecutive blocks each receive at most one outlier.
  Placement placement = Placement::uniform;
};

struct GenSpec {
  std::size_t n = 200;
  std::size_t d = 10;
  std::size_t s = 3;
  DesignSpec design;
  NoiseSpec noise;
  double amplitude = 1.0;
  SignalKind signal = SignalKind::sparse;
  std::size_t outlier_count = 0;
  OutlierModel outliers;
  std::uint64_t seed = 0;

  void validate() const;
  static GenSpec from_kv(const KeyValues& kv, GenSpec base);
  static GenSpec from_kv(const KeyValues& kv);
  void to_kv(KeyValues& kv) const;
};

/// Deterministic given spec.seed. Signal, design, noise and outliers draw
/// from independent streams, so a spec and its outlier-free twin share every
/// informative sample.
Dataset generate(const GenSpec& spec);

/// (E|noise|^q)^(1/q); +inf when the moment does not exist.
double noise_moment_norm(const NoiseSpec& noise, double q);

/// ||<X, e_j>||_L2 / ||<X, e_j>||_L1 for one design coordinate.
double design_l2_l1_ratio(const DesignSpec& design);

std::string to_string(DesignKind k);
std::string to_string(NoiseKind k);
std::string to_string(SignalKind k);
std::string to_string(OutlierKind k);
std::string to_string(Placement p);
DesignKind parse_design_kind(const std::string& s);
NoiseKind parse_noise_kind(const std::string& s);
SignalKind parse_signal_kind(const std::string& s);
OutlierKind parse_outlier_kind(const std::string& s);
Placement parse_placement(const std::string& s);

}  // namespace momlasso
