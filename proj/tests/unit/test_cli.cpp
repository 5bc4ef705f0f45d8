#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tei/commands.hpp"
#include "tei/error.hpp"

using namespace tei;
namespace fs = std::filesystem;

namespace {

const std::string kData = TEI_DATA_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tei_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing is strict") {
  Json j = {{"command", "validate"}, {"seed", 7}};
  const RunConfig c = config_from_json(j);
  CHECK(c.seed == 7);
  CHECK(c.command == "validate");
  j["sed"] = 3;
  try {
    config_from_json(j);
    FAIL("unknown key accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InputParse);
  }
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"seed": "one"})")), Error);
  const RunConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  std::ostringstream out, err;
  RunConfig cfg;
  cfg.output_dir = dir.string();
  cfg.instance = kData + "/two_point.json";
  cfg.command = "frobnicate";
  CHECK(run(cfg, out, err) == kExitInput);
  cfg.command = "validate";
  CHECK(run(cfg, out, err) == kExitOk);
  CHECK(fs::exists(dir / "validate.json"));
  cfg.instance = kData + "/missing.json";
  CHECK(run(cfg, out, err) == kExitInput);
}

TEST_CASE("reports are deterministic apart from metadata") {
  RunConfig cfg;
  cfg.command = "transport";
  cfg.instance = kData + "/two_point.json";
  const auto a = execute(cfg);
  const auto b = execute(cfg);
  CHECK(a.report.dump() == b.report.dump());
  REQUIRE(a.side_files.size() == 1);
  CHECK(a.side_files[0].second == b.side_files[0].second);

  const auto d1 = scratch("det1"), d2 = scratch("det2");
  std::ostringstream out, err;
  cfg.output_dir = d1.string();
  REQUIRE(run(cfg, out, err) == kExitOk);
  cfg.output_dir = d2.string();
  REQUIRE(run(cfg, out, err) == kExitOk);
  Json j1 = read_json(d1 / "transport.json"), j2 = read_json(d2 / "transport.json");
  j1.erase("metadata");
  j2.erase("metadata");
  j1["config"].erase("output_dir");
  j2["config"].erase("output_dir");
  CHECK(j1.dump() == j2.dump());
  CHECK(slurp(d1 / "plan.csv") == slurp(d2 / "plan.csv"));
}

TEST_CASE("minimize above the T2 bracket returns mu") {
  RunConfig cfg;
  cfg.command = "minimize";
  cfg.instance = kData + "/two_point.json";
  cfg.slack = 0.5;
  cfg.a = 1.0;
  cfg.multistarts = 8;
  const auto res = execute(cfg);
  const auto& r = res.report["result"]["result"];
  CHECK(r["value"].get<double>() == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
  CHECK(r["tv_from_mu"].get<double>() <= 1e-6);
}

TEST_CASE("atomic writes replace the target") {
  const auto dir = scratch("atomic");
  const fs::path p = dir / "x.txt";
  write_atomic(p, "first\n");
  write_atomic(p, "second\n");
  CHECK(slurp(p) == "second\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
}
