#include "momlasso/dataset_io.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "momlasso/error.hpp"
#include "momlasso/kv_config.hpp"

namespace momlasso {

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".meta");
}

Dataset load_dataset(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot open dataset " + csv.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(csv.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_list(line);
  if (header.size() < 2 || header[0] != "y") {
    throw ConfigError(csv.string() + ": header must be y,x1,...,xd");
  }
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != "x" + std::to_string(j)) {
      throw ConfigError(csv.string() + ": unexpected header column '" + header[j] + "'");
    }
  }
  const std::size_t d = header.size() - 1;

  std::vector<double> ys;
  std::vector<double> flat;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_list(line);
    if (cells.size() != d + 1) {
      throw ConfigError(csv.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(d + 1) + " columns");
    }
    ys.push_back(parse_double(cells[0], "y"));
    for (std::size_t j = 1; j <= d; ++j) flat.push_back(parse_double(cells[j], header[j]));
  }
  const auto n = static_cast<Eigen::Index>(ys.size());
  Matrix xs = Eigen::Map<Matrix>(flat.data(), n, static_cast<Eigen::Index>(d));
  Vector y = Eigen::Map<Vector>(ys.data(), n);

  std::optional<GroundTruth> meta;
  if (const auto side = sidecar_path(csv); std::filesystem::exists(side)) {
    const KeyValues kv = KeyValues::load(side);
    GroundTruth gt;
    const auto t = kv.get_double_list("t_star");
    if (!t.empty()) gt.t_star = Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size()));
    gt.outlier_mask.assign(ys.size(), false);
    for (const auto& idx : kv.get_list("outliers")) {
      const auto i = parse_int(idx, "outliers");
      if (i < 0 || static_cast<std::size_t>(i) >= ys.size()) {
        throw ConfigError(side.string() + ": outlier index out of range");
      }
      gt.outlier_mask[static_cast<std::size_t>(i)] = true;
    }
    meta = std::move(gt);
  }
  return Dataset(std::move(xs), std::move(y), std::move(meta));
}

void save_dataset(const Dataset& ds, const std::filesystem::path& csv) {
  std::ofstream out(csv, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + csv.string());
  out << "y";
  for (std::size_t j = 1; j <= ds.d(); ++j) out << ",x" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < ds.xs().rows(); ++i) {
    out << format_double(ds.ys()[i]);
    for (Eigen::Index j = 0; j < ds.xs().cols(); ++j) out << ',' << format_double(ds.xs()(i, j));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + csv.string());

  if (ds.meta()) {
    KeyValues kv;
    kv.set("n", static_cast<std::int64_t>(ds.n()));
    kv.set("d", static_cast<std::int64_t>(ds.d()));
    std::string t;
    for (Eigen::Index j = 0; j < ds.meta()->t_star.size(); ++j) {
      if (j) t += ",";
      t += format_double(ds.meta()->t_star[j]);
    }
    kv.set("t_star", t);
    std::string outliers;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (!ds.meta()->outlier_mask[i]) continue;
      if (!outliers.empty()) outliers += ",";
      outliers += std::to_string(i);
    }
    kv.set("outliers", outliers);
    kv.save(sidecar_path(csv));
  }
}

}  // namespace momlasso
