#pragma once

#include <filesystem>

#include "momlasso/linear_model.hpp"

namespace momlasso {

// Dataset CSV: header "y,x1,...,xd", one sample per line, LF line endings.
//
// Optional sidecar "<csv>.meta" in the key-value format:
//   n = <samples>
//   d = <dimension>
//   t_star = <d comma-separated reals>
//   outliers = <comma-separated 0-based sample indices>   (may be empty)

std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Reads the CSV and, if present, its sidecar.
Dataset load_dataset(const std::filesystem::path& csv);

/// Writes the CSV and, when the dataset carries ground truth, the sidecar.
void save_dataset(const Dataset& ds, const std::filesystem::path& csv);

}  // namespace momlasso
