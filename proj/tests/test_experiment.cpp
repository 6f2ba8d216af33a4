#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "zygmund/experiment.hpp"

using namespace zyg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json cos_phi(int d) {
  json terms = json::array();
  for (int i = 0; i < d; ++i)
    for (int s : {1, -1}) {
      std::vector<int> k(static_cast<std::size_t>(d), 0);
      k[static_cast<std::size_t>(i)] = s;
      terms.push_back({{"k", k}, {"re", 0.5}, {"im", 0.0}});
    }
  return {{"d", d}, {"terms", terms}};
}

json base_config(int d) {
  return {{"field", {{"phi", cos_phi(d)}, {"b", 2}, {"tail_tol", 1e-12}}},
          {"lattice", {{"N", 2}, {"J_max", 6}, {"m", 4}}},
          {"stopping", {{"R", "auto"}, {"K", 2}, {"calibration_depth", 3}}},
          {"qr", {{"N", 2}, {"depth", 2}, {"m", 8}}},
          {"sampling",
           {{"seed", 3},
            {"bloch_samples", 512},
            {"zygmund_samples", 2000},
            {"x_samples", 100},
            {"increment_residual_samples", 500},
            {"oscillation_pairs", 500}}}};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("zyg_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run(const std::string& cmd, const json& cfg, const fs::path& dir,
              const std::string& points = "") {
  RunOptions o;
  o.out_dir = dir.string();
  o.threads = 1;
  o.points_path = points;
  return run_experiment(cmd, cfg.dump(), o);
}

}  // namespace

TEST_CASE("config parsing is strict") {
  const json good = base_config(1);
  CHECK_NOTHROW(parse_config(good));
  json bad = good;
  bad["lattice"]["Jmax"] = 3;
  CHECK_THROWS_AS(parse_config(bad), Error);
  bad = good;
  bad["unknown"] = true;
  CHECK_THROWS_AS(parse_config(bad), Error);
  bad = good;
  bad["lattice"]["N"] = 1;
  CHECK_THROWS_AS(parse_config(bad), Error);
  bad = good;
  bad["stopping"]["theta"] = 0.5;
  CHECK_THROWS_AS(parse_config(bad), Error);
  bad = good;
  bad["lattice"]["m"] = "eight";
  CHECK_THROWS_AS(parse_config(bad), Error);
}

TEST_CASE("config hash ignores run-only keys and tracks the seed") {
  json a = base_config(1);
  json b = a;
  b["threads"] = 7;
  b["output_dir"] = "elsewhere";
  CHECK(config_hash(a, 3) == config_hash(b, 3));
  CHECK(config_hash(a, 3) != config_hash(a, 4));
  json c = a;
  c["lattice"]["m"] = 6;
  CHECK(config_hash(a, 3) != config_hash(c, 3));
}

TEST_CASE("eval writes one row per point") {
  const auto dir = scratch("eval");
  const json cfg = base_config(1);
  {
    std::ofstream(dir / "pts.txt") << "# x y\n0 0.5\n\n0.25, 0.1\n";
  }
  const auto r = run("eval", cfg, dir / "out", (dir / "pts.txt").string());
  CHECK(r.summary["result"]["points"] == 2);
  const std::string csv = slurp(dir / "out" / "jets.csv");
  std::istringstream ls(csv);
  std::string line;
  std::getline(ls, line);
  CHECK(line.rfind("# config_hash=", 0) == 0);
  std::getline(ls, line);
  CHECK(line == "x1,y,value,g1,g2,h1_1,h1_2,h2_2,trace");
  std::getline(ls, line);
  const double trace = std::stod(line.substr(line.rfind(',') + 1));
  CHECK(std::abs(trace) <= 1e-9);

  // Replays are byte-identical.
  run("eval", cfg, dir / "again", (dir / "pts.txt").string());
  CHECK(slurp(dir / "again" / "jets.csv") == csv);

  SUBCASE("empty points file") {
    std::ofstream(dir / "empty.txt").close();
    run("eval", cfg, dir / "empty", (dir / "empty.txt").string());
    std::istringstream es(slurp(dir / "empty" / "jets.csv"));
    std::size_t lines = 0;
    while (std::getline(es, line)) ++lines;
    CHECK(lines == 2);
  }
  SUBCASE("malformed rows name their line") {
    std::ofstream(dir / "bad.txt") << "0 0.5\n0.1 abc\n";
    try {
      run("eval", cfg, dir / "bad", (dir / "bad.txt").string());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::ofstream(dir / "short.txt") << "0.5\n";
    CHECK_THROWS_AS(run("eval", cfg, dir / "bad", (dir / "short.txt").string()), Error);
  }
}

TEST_CASE("cantor on a constant gradient reports no escape") {
  const auto dir = scratch("cantor_linear");
  json cfg = base_config(1);
  cfg["field"] = {{"kind", "linear"}, {"d", 1}, {"slope", 1.0}};
  const auto r = run("cantor", cfg, dir);
  const json bound = json::parse(slurp(dir / "bound.json"));
  CHECK(bound["no_escape"] == true);
  CHECK(bound["hungerford"].is_null());
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("qr, condh and manifest on the d = 1 field") {
  const auto dir = scratch("qr");
  const json cfg = base_config(1);
  run("qr", cfg, dir);
  const json s = json::parse(slurp(dir / "qr_summary.json"));
  CHECK(s["max_gamma_sq"].get<double>() <= 1.02);
  CHECK(s["min_gamma_sq"].get<double>() >= 1.0 - 1e-9);

  run("condh", cfg, dir);
  const json ch = json::parse(slurp(dir / "condh_summary.json"));
  CHECK(ch["all_hold"] == true);

  const json m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["commands"].contains("qr"));
  CHECK(m["commands"].contains("condh"));
  for (const auto& [cmd, entry] : m["commands"].items()) {
    for (const auto& f : entry["files"]) {
      const std::string text = slurp(dir / f.get<std::string>());
      CHECK(text.find(m["config_hash"].get<std::string>()) != std::string::npos);
    }
  }
}

TEST_CASE("survey with doubled samples stays within binomial intervals") {
  const auto dir = scratch("survey");
  json cfg = base_config(2);
  cfg["sampling"]["x_samples"] = 200;
  cfg["sampling"]["floors"] = {1.0 / 32, 1.0 / 1024};
  cfg["sampling"]["thresholds"] = {5.0};
  run("survey", cfg, dir / "a");
  cfg["sampling"]["x_samples"] = 400;
  run("survey", cfg, dir / "b");
  const json a = json::parse(slurp(dir / "a" / "survey_summary.json"));
  const json b = json::parse(slurp(dir / "b" / "survey_summary.json"));
  CHECK(a["monotone"] == true);
  for (std::size_t i = 0; i < a["rows"].size(); ++i) {
    const double p = a["rows"][i]["exceedance_fraction"];
    const double q = b["rows"][i]["exceedance_fraction"];
    const double half_width = 1.96 * std::sqrt(std::max(p * (1 - p), 1.0 / 200) / 200.0);
    CHECK(std::abs(p - q) <= half_width);
  }
}

TEST_CASE("unknown commands and kinds are argument errors") {
  const auto dir = scratch("unknown");
  try {
    run("plot", base_config(1), dir);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_argument);
  }
  json cfg = base_config(1);
  cfg["field"]["kind"] = "spline";
  CHECK_THROWS_AS(run("qr", cfg, dir), Error);
  CHECK_THROWS_AS(run_experiment("qr", "{not json", RunOptions{}), Error);
}
