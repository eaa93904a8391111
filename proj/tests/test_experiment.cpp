#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rwrp/experiment.hpp"

using namespace rwrp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("rwrp_experiment_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const json kPair = {{"d", 2}, {"steps", {{1, 0}, {0, 1}}}};
const json kLine = {{"d", 1}, {"steps", {{1}, {-1}}}};
const json kConstOne = {{"kind", "constant"}, {"distribution", {{"type", "constant"}, {"c", 1.0}}}};
const json kUniform = {{"kind", "iid-site"}, {"per_step", true}, {"seed", 11},
                       {"distribution", {{"type", "uniform"}, {"a", 0.0}, {"b", 1.0}}}};

std::string schema_message(const json& j) {
  try {
    ExperimentConfig::from_json(j);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

// Samples an environment into dir/name and returns the prefix.
std::string make_env(const fs::path& dir, const json& steps, const json& spec, const std::string& box,
                     const std::string& name = "env") {
  ExperimentConfig c = ExperimentConfig::from_json(
      {{"experiment", "env"}, {"steps", steps}, {"environment", spec}, {"params", {{"box", box}, {"out", name}}},
       {"out_dir", dir.string()}});
  run(c);
  return (dir / name).string();
}

int cli(const std::string& args) {
  const int rc = std::system((std::string(RWRP_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("schema errors name the offending field") {
  CHECK(schema_message({{"experiment", "nope"}}).rfind("experiment", 0) == 0);
  CHECK(schema_message({{"experiment", "env"}, {"colour", 3}}).rfind("colour", 0) == 0);
  CHECK(schema_message({{"experiment", "env"}, {"replicas", 0}}).rfind("replicas", 0) == 0);
  const json bad_kernel = {{"d", 2}, {"steps", {{1, 0}, {0, 1}}}, {"kernel", {0.5, 0.6}}};
  const std::string m = schema_message({{"experiment", "env"}, {"steps", bad_kernel}});
  CHECK(m.find("kernel") != std::string::npos);
  const json bad_env = {{"kind", "iid-site"}};
  CHECK(schema_message({{"experiment", "env"}, {"steps", kPair}, {"environment", bad_env}}).rfind("distribution", 0) ==
        0);
}

TEST_CASE("config round trip and hash ignore threads and output location") {
  ExperimentConfig a = ExperimentConfig::from_json(
      {{"experiment", "env"}, {"steps", kPair}, {"environment", kConstOne}, {"threads", 1}, {"out_dir", "x"}});
  ExperimentConfig b = a;
  b.threads = 8;
  b.out_dir = "y";
  CHECK(a.hash() == b.hash());
  b.seed = 5;
  CHECK(a.hash() != b.hash());
  CHECK(ExperimentConfig::from_json(a.to_json()).to_json() == a.to_json());
}

TEST_CASE("real formatting") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(2.0) == "2");
  CHECK(format_real(INFINITY) == "inf");
  CHECK(format_real(-INFINITY) == "-inf");
}

TEST_CASE("csv cells with separators are quoted") {
  const fs::path p = scratch("csv") / "q.csv";
  {
    CsvWriter csv(p.string(), {"steps", "value"});
    csv.row({"e1,e2", "say \"hi\""});
    csv.row({"plain", "1"});
    CHECK_THROWS_AS(csv.row({"one"}), Error);
  }
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "steps,value\n\"e1,e2\",\"say \"\"hi\"\"\"\nplain,1\n");
}

TEST_CASE("env and passage experiments") {
  const fs::path dir = scratch("passage");
  const std::string env = make_env(dir, kPair, kConstOne, "0:6,0:6");
  CHECK(fs::exists(env + ".json"));
  CHECK(fs::exists(env + ".bin"));
  std::ofstream(dir / "targets.txt") << "1 1\n# comment\n3,0\n";
  ExperimentConfig c = ExperimentConfig::from_json(
      {{"experiment", "passage"},
       {"params", {{"env", env}, {"mode", "a"}, {"targets", (dir / "targets.txt").string()}, {"out", "a.csv"}}},
       {"out_dir", dir.string()}});
  RunResult r = run(c);
  auto rows = read_csv(dir / "a.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"site", "value", "tol_achieved"});
  CHECK(rows[1][0] == "1 1");
  CHECK(std::stod(rows[1][1]) == doctest::Approx(2 + std::log(2.0)).epsilon(1e-14));
  json manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["artifacts"] == json::array({"a.csv"}));
  CHECK(manifest["config_hash"] == c.hash());
  CHECK(fs::exists(dir / "timing.json"));

  ExperimentConfig g = c;
  g.params["mode"] = "green";
  g.params["out"] = "g.csv";
  run(g);
  auto grows = read_csv(dir / "g.csv");
  CHECK(std::stod(grows[1][1]) == doctest::Approx(-(2 + std::log(2.0))).epsilon(1e-12));

  ExperimentConfig bad = c;
  bad.params["mode"] = "sideways";
  CHECK_THROWS_AS(run(bad), SchemaError);
}

TEST_CASE("downstream failures carry the experiment name") {
  const fs::path dir = scratch("failure");
  const std::string env = make_env(dir, kPair, kConstOne, "0:4,0:4");
  std::ofstream(dir / "t.txt") << "-1 0\n";
  ExperimentConfig c = ExperimentConfig::from_json(
      {{"experiment", "passage"},
       {"params", {{"env", env}, {"mode", "a-inf"}, {"origin", "2,2"}, {"targets", (dir / "t.txt").string()}}},
       {"out_dir", dir.string()}});
  try {
    run(c);
    FAIL("expected an error");
  } catch (const ExperimentError& e) {
    CHECK(std::string(e.what()).rfind("passage: ", 0) == 0);
  }
}

TEST_CASE("polymer, lyapunov and corrector experiments") {
  const fs::path dir = scratch("kinds");
  const std::string env = make_env(dir, kPair, kConstOne, "0:40,0:40");
  run(ExperimentConfig::from_json({{"experiment", "polymer"},
                                   {"params", {{"env", env}, {"n", 2}, {"h", "0,0"}, {"out", "poly.csv"}}},
                                   {"out_dir", dir.string()}}));
  auto rows = read_csv(dir / "poly.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[2][0] == "1 1");
  CHECK(std::stod(rows[2][1]) == doctest::Approx(-2 - std::log(2.0)).epsilon(1e-14));
  auto level = read_csv(dir / "poly.level.csv");
  CHECK(std::stod(level[1][2]) == doctest::Approx(-1.0).epsilon(1e-14));

  run(ExperimentConfig::from_json({{"experiment", "lyapunov"},
                                   {"params", {{"env", env}, {"xi", "1/2,1/2"}, {"t_grid", "8,16,32"}, {"out", "ly.csv"}}},
                                   {"out_dir", dir.string()}}));
  json summary = json::parse(slurp(dir / "ly.json"));
  CHECK(summary["estimate"].get<double>() <= summary["upper_bound"].get<double>());
  CHECK(read_csv(dir / "ly.csv").size() == 4);

  run(ExperimentConfig::from_json({{"experiment", "corrector"},
                                   {"params", {{"env", env}, {"xi", "1/2,1/2"}, {"h", "1,1"}, {"j", 1}, {"out", "c.json"}}},
                                   {"out_dir", dir.string()}}));
  json corr = json::parse(slurp(dir / "c.json"));
  CHECK(corr["alpha_hat"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(corr["hB_dot_xi"].get<double>() <= corr["alpha_hat"].get<double>() + 1e-9);
  CHECK(corr["feasibility_slack"].get<double>() <= 1e-12);
}

TEST_CASE("shape scan experiment writes rows and profile") {
  const fs::path dir = scratch("scan");
  ExperimentConfig c = ExperimentConfig::from_json({{"experiment", "shape-scan"},
                                                    {"steps", kPair},
                                                    {"environment", kUniform},
                                                    {"replicas", 2},
                                                    {"seed", 3},
                                                    {"params",
                                                     {{"radii", "16,32"},
                                                      {"band", 4},
                                                      {"dirs", 9},
                                                      {"fan_scale", 64},
                                                      {"out", "scan.csv"}}},
                                                    {"out_dir", dir.string()}});
  run(c);
  auto rows = read_csv(dir / "scan.csv");
  CHECK(rows[0] == std::vector<std::string>{"direction", "radius", "a_over_r", "alpha_hat", "abs_err_over_r"});
  CHECK(rows.size() == 5);
  CHECK(read_csv(dir / "scan.profile.csv").size() == 5);
}

TEST_CASE("reruns and thread counts give identical bytes") {
  const fs::path base = scratch("replay");
  auto config = [&](const std::string& sub, int threads) {
    return ExperimentConfig::from_json({{"experiment", "shape-scan"},
                                        {"steps", kPair},
                                        {"environment", kUniform},
                                        {"replicas", 3},
                                        {"threads", threads},
                                        {"seed", 9},
                                        {"params", {{"radii", "16,32"}, {"band", 4}, {"dirs", 9}, {"fan_scale", 64}}},
                                        {"out_dir", (base / sub).string()}});
  };
  run(config("a", 1));
  run(config("b", 1));
  run(config("c", 4));
  for (const char* f : {"shape_scan.csv", "shape_scan.profile.csv", "manifest.json"}) {
    const std::string ref = slurp(base / "a" / f);
    CHECK(!ref.empty());
    CHECK(slurp(base / "b" / f) == ref);
    CHECK(slurp(base / "c" / f) == ref);
  }
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  std::ofstream(dir / "steps.json") << kLine.dump();
  std::ofstream(dir / "spec.json") << kConstOne.dump();
  const std::string d = " --out-dir " + dir.string() + " ";
  CHECK(cli(d + "env gen --spec " + (dir / "spec.json").string() + " --steps " + (dir / "steps.json").string() +
            " --box -30:30 --out line") == 0);
  const std::string env = (dir / "line").string();
  std::ofstream(dir / "t.txt") << "1\n";
  CHECK(cli(d + "passage --mode a --env " + env + " --targets " + (dir / "t.txt").string() + " --out a.csv") == 0);
  auto rows = read_csv(dir / "a.csv");
  REQUIRE(rows.size() == 2);
  const double s = std::exp(-1.0);
  CHECK(std::stod(rows[1][1]) == doctest::Approx(-std::log((1 - std::sqrt(1 - s * s)) / s)).epsilon(1e-9));
  CHECK(cli(d + "passage --mode sideways --env " + env) == 2);
  CHECK(cli(d + "passage --mode a --env " + (dir / "missing").string()) == 2);
  std::ofstream(dir / "far.txt") << "500\n";
  CHECK(cli(d + "passage --mode a --env " + env + " --targets " + (dir / "far.txt").string()) == 1);
  std::ofstream(dir / "cfg.json") << json{{"experiment", "lyapunov"}, {"bogus", 1}}.dump();
  CHECK(cli(d + "run --config " + (dir / "cfg.json").string()) == 2);
  CHECK(cli("--help") == 0);
}

TEST_CASE("companion artifacts stay inside a relative output directory") {
  const fs::path dir = scratch("relative");
  const std::string env = make_env(dir, kPair, kConstOne, "0:8,0:8");
  const fs::path cwd = fs::current_path();
  fs::current_path(dir);
  RunResult r = run(ExperimentConfig::from_json({{"experiment", "polymer"},
                                                 {"steps", kPair},
                                                 {"environment", kConstOne},
                                                 {"params", {{"env", env}, {"n", 4}, {"h", "0,0"}, {"out", "p.csv"}}},
                                                 {"out_dir", "sub"}}));
  fs::current_path(cwd);
  CHECK(fs::exists(dir / "sub" / "p.csv"));
  CHECK(fs::exists(dir / "sub" / "p.level.csv"));
  CHECK_FALSE(fs::exists(dir / "sub" / "sub"));
  for (const auto& a : r.artifacts) CHECK(a.rfind("sub/", 0) == 0);
}
