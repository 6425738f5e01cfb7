#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "momlasso/dataset_io.hpp"
#include "momlasso/error.hpp"
#include "momlasso/kv_config.hpp"
#include "momlasso/rates.hpp"
#include "momlasso/simulate.hpp"
#include "momlasso/solver.hpp"

using namespace momlasso;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "momlasso_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("key-value parsing") {
  const auto kv = KeyValues::parse(
      "# comment\n"
      "n = 100\n"
      "\n"
      "noise-df = 3.5   # trailing comment\n"
      "list = 1, 2 ,3\n"
      "n = 200\n");
  CHECK(kv.get_uint("n", 0) == 200);
  CHECK(kv.get_double("noise_df", 0.0) == 3.5);
  CHECK(kv.get_double_list("list") == std::vector<double>{1, 2, 3});
  CHECK(kv.get_double("missing", -1.0) == -1.0);
  CHECK_THROWS_AS(KeyValues::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(KeyValues::parse("Bad_Key = 1\n"), ConfigError);
  CHECK_THROWS_AS(KeyValues::parse("x = abc\n").get_double("x", 0.0), ConfigError);
  CHECK_THROWS_AS(KeyValues::parse("x = -1\n").get_uint("x", 0), ConfigError);
}

TEST_CASE("doubles round-trip through text") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, std::numeric_limits<double>::denorm_min()}) {
    CHECK(parse_double(format_double(v), "v") == v);
  }
  CHECK(parse_double("inf", "v") == std::numeric_limits<double>::infinity());
}

TEST_CASE("config structs round-trip") {
  RateConfig rc;
  rc.sigma = 2.5;
  rc.c_kstar = 2.0;
  rc.eps = 0.001;
  rc.n = 321;
  KeyValues kv;
  rc.to_kv(kv);
  const auto back = RateConfig::from_kv(KeyValues::parse(kv.dump()));
  CHECK(back.sigma == 2.5);
  CHECK(back.c_kstar == 2.0);
  CHECK(back.eps.value() == 0.001);
  CHECK(back.n == 321);

  SolverOptions so;
  so.step_size = 0.25;
  so.shuffle = false;
  so.seed = 99;
  KeyValues skv;
  so.to_kv(skv);
  const auto sback = SolverOptions::from_kv(KeyValues::parse(skv.dump()));
  CHECK(sback.step_size.value() == 0.25);
  CHECK_FALSE(sback.shuffle);
  CHECK(sback.seed == 99);

  GenSpec g;
  g.n = 77;
  g.noise.kind = NoiseKind::student_t;
  g.outlier_count = 4;
  g.outliers.kind = OutlierKind::sign_flip;
  KeyValues gkv;
  g.to_kv(gkv);
  const auto gback = GenSpec::from_kv(KeyValues::parse(gkv.dump()));
  CHECK(gback.n == 77);
  CHECK(gback.noise.kind == NoiseKind::student_t);
  CHECK(gback.outliers.kind == OutlierKind::sign_flip);
  CHECK(gback.outlier_count == 4);
}

TEST_CASE("dataset csv and sidecar round-trip") {
  GenSpec spec;
  spec.n = 40;
  spec.d = 3;
  spec.s = 2;
  spec.outlier_count = 3;
  spec.outliers.kind = OutlierKind::response_blowup;
  spec.seed = 5;
  const Dataset ds = generate(spec);
  const fs::path csv = scratch("roundtrip.csv");
  save_dataset(ds, csv);
  CHECK(fs::exists(sidecar_path(csv)));

  const Dataset back = load_dataset(csv);
  CHECK(back.xs() == ds.xs());
  CHECK(back.ys() == ds.ys());
  REQUIRE(back.meta());
  CHECK(back.meta()->t_star == ds.meta()->t_star);
  CHECK(back.meta()->outlier_mask == ds.meta()->outlier_mask);

  std::ifstream in(csv, std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(header == "y,x1,x2,x3");
}

TEST_CASE("dataset without sidecar and malformed files") {
  const fs::path csv = scratch("plain.csv");
  fs::remove(sidecar_path(csv));
  {
    std::ofstream out(csv);
    out << "y,x1\n1,2\n3,4\n";
  }
  const Dataset ds = load_dataset(csv);
  CHECK(ds.n() == 2);
  CHECK_FALSE(ds.meta());

  const fs::path bad = scratch("bad.csv");
  {
    std::ofstream out(bad);
    out << "y,x1,x2\n1,2\n";
  }
  CHECK_THROWS_AS(load_dataset(bad), ConfigError);
  CHECK_THROWS_AS(load_dataset(scratch("does_not_exist.csv")), ConfigError);
}
