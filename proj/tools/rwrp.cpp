#include <CLI11.hpp>

#include <iostream>

#include "rwrp/experiment.hpp"

using nlohmann::json;

namespace {

struct Globals {
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

rwrp::ExperimentConfig base(const std::string& kind, const Globals& g) {
  rwrp::ExperimentConfig c;
  c.experiment = kind;
  c.threads = g.threads;
  c.seed = g.seed;
  c.out_dir = g.out_dir;
  return c;
}

void set_if(json& p, const std::string& key, const std::string& value) {
  if (!value.empty()) p[key] = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walk in random potential: numerical lab"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "OpenMP threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed override (0 keeps the spec seeds)");
  app.add_option("--out-dir", g.out_dir, "Directory for artifacts");

  rwrp::ExperimentConfig cfg;
  std::string config_path;

  // env gen
  auto* env = app.add_subcommand("env", "Environment tools");
  env->require_subcommand(1);
  auto* gen = env->add_subcommand("gen", "Sample an environment and save prefix.json/prefix.bin");
  std::string spec_path, steps_path, box, prefix = "env";
  gen->add_option("--spec", spec_path, "Environment spec JSON")->required();
  gen->add_option("--steps", steps_path, "Step set JSON")->required();
  gen->add_option("--box", box, "Box, e.g. 0:63,0:63")->required();
  gen->add_option("--out", prefix, "Output prefix");

  // passage
  auto* passage = app.add_subcommand("passage", "Passage times and Green's function");
  std::string mode = "a", env_prefix, origin, targets = "grid", pbox, out;
  double tol = 1e-12;
  passage->add_option("--mode", mode, "a, a-inf, lpp or green")
      ->check(CLI::IsMember({"a", "a-inf", "lpp", "green"}));
  passage->add_option("--env", env_prefix, "Environment prefix")->required();
  passage->add_option("--origin", origin, "Origin, e.g. 0,0");
  passage->add_option("--targets", targets, "Target file (one site per line) or 'grid'");
  passage->add_option("--box", pbox, "Solve box (default: environment box)");
  passage->add_option("--tol", tol, "Iteration tolerance");
  passage->add_option("--out", out, "CSV path");

  // polymer
  auto* polymer = app.add_subcommand("polymer", "Restricted-length partition functions");
  polymer->set_help_flag("--help", "Print this help message and exit");
  int n = 0;
  std::string temp = "finite", h;
  polymer->add_option("--env", env_prefix, "Environment prefix")->required();
  polymer->add_option("--n", n, "Path length")->required();
  polymer->add_option("--temp", temp, "finite, zero-max or zero-min")
      ->check(CLI::IsMember({"finite", "zero-max", "zero-min"}));
  polymer->add_option("--h", h, "Tilt for the point-to-level value");
  polymer->add_option("--origin", origin, "Origin");
  polymer->add_option("--out", out, "CSV path");

  // shape-scan
  auto* scan = app.add_subcommand("shape-scan", "A_delta shape error profile");
  std::string face = "auto", radii = "64,128,256", scan_temp = "finite";
  double delta = 0.2;
  int dirs = 64, replicas = 1, fan_replicas = 0;
  std::int64_t band = 8, fan_scale = 0;
  scan->add_option("--env-spec", spec_path, "Environment spec JSON")->required();
  scan->add_option("--steps", steps_path, "Step set JSON")->required();
  scan->add_option("--face", face, "'auto' or generator indices");
  scan->add_option("--delta", delta, "A_delta margin");
  scan->add_option("--radii", radii, "Comma-separated radii");
  scan->add_option("--band", band, "Radius band width");
  scan->add_option("--dirs", dirs, "Fan directions");
  scan->add_option("--replicas", replicas, "Scanned environments");
  scan->add_option("--fan-scale", fan_scale, "Scale T of the fan estimate (default 4 x max radius)");
  scan->add_option("--fan-replicas", fan_replicas, "Environments averaged in the fan (default: replicas)");
  scan->add_option("--temp", scan_temp, "finite or zero")->check(CLI::IsMember({"finite", "zero"}));
  scan->add_option("--out", out, "CSV path");

  // lyapunov
  auto* lyap = app.add_subcommand("lyapunov", "Finite-t Lyapunov exponent estimates");
  std::string xi, tgrid = "64,128,256", method;
  lyap->add_option("--env", env_prefix, "Environment prefix")->required();
  lyap->add_option("--xi", xi, "Direction, e.g. 1/2,1/2")->required();
  lyap->add_option("--t-grid", tgrid, "Increasing t values");
  lyap->add_option("--method", method, "directed-dp, value-iteration or zero-temp");
  lyap->add_option("--tol", tol, "Iteration tolerance");
  lyap->add_option("--out", out, "CSV path");

  // corrector
  auto* corr = app.add_subcommand("corrector", "Corrector cocycles and the variational bound");
  corr->set_help_flag("--help", "Print this help message and exit");
  std::string htilt = "auto", corr_temp = "finite";
  int j = 4;
  double alpha_hat = std::nan("");
  corr->add_option("--env", env_prefix, "Environment prefix")->required();
  corr->add_option("--h", htilt, "Tilt vector or 'auto'");
  corr->add_option("--j", j, "Resolvent index j")->check(CLI::PositiveNumber);
  corr->add_option("--temp", corr_temp, "finite or zero")->check(CLI::IsMember({"finite", "zero"}));
  corr->add_option("--xi", xi, "Direction")->required();
  corr->add_option("--alpha-hat", alpha_hat, "Reference estimate of alpha(xi)");
  corr->add_option("--out", out, "JSON path");

  auto* accept = app.add_subcommand("accept", "Write the acceptance tables");
  auto* runc = app.add_subcommand("run", "Run an experiment config");
  runc->add_option("--config", config_path, "Experiment config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage errors share the schema-error exit code
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      cfg = base("env", g);
      cfg.steps = steps_path;
      cfg.environment = spec_path;
      cfg.params = {{"box", box}, {"out", prefix}};
    } else if (*passage) {
      cfg = base("passage", g);
      cfg.params = {{"env", env_prefix}, {"mode", mode}, {"targets", targets}, {"tol", tol}};
      set_if(cfg.params, "origin", origin);
      set_if(cfg.params, "passage_box", pbox);
      set_if(cfg.params, "out", out);
    } else if (*polymer) {
      cfg = base("polymer", g);
      cfg.params = {{"env", env_prefix}, {"n", n}, {"temp", temp}};
      set_if(cfg.params, "h", h);
      set_if(cfg.params, "origin", origin);
      set_if(cfg.params, "out", out);
    } else if (*scan) {
      cfg = base("shape-scan", g);
      cfg.steps = steps_path;
      cfg.environment = spec_path;
      cfg.replicas = replicas;
      cfg.params = {{"face", face}, {"delta", delta}, {"radii", radii}, {"band", band}, {"dirs", dirs},
                    {"temp", scan_temp}};
      if (fan_scale > 0) cfg.params["fan_scale"] = fan_scale;
      if (fan_replicas > 0) cfg.params["fan_replicas"] = fan_replicas;
      set_if(cfg.params, "out", out);
    } else if (*lyap) {
      cfg = base("lyapunov", g);
      cfg.params = {{"env", env_prefix}, {"xi", xi}, {"t_grid", tgrid}, {"tol", tol}};
      set_if(cfg.params, "method", method);
      set_if(cfg.params, "out", out);
    } else if (*corr) {
      cfg = base("corrector", g);
      cfg.params = {{"env", env_prefix}, {"h", htilt}, {"j", j}, {"temp", corr_temp}, {"xi", xi}};
      if (!std::isnan(alpha_hat)) cfg.params["alpha_hat"] = alpha_hat;
      set_if(cfg.params, "out", out);
    } else if (*accept) {
      cfg = base("accept", g);
    } else {
      cfg = rwrp::ExperimentConfig::load(config_path);
      if (app.get_option("--threads")->count()) cfg.threads = g.threads;
      if (app.get_option("--seed")->count()) cfg.seed = g.seed;
      if (app.get_option("--out-dir")->count()) cfg.out_dir = g.out_dir;
    }
    rwrp::RunResult r = rwrp::run(cfg);
    for (const auto& a : r.artifacts) std::cout << a << '\n';
    return r.status;
  } catch (const rwrp::SchemaError& e) {
    std::cerr << "rwrp: schema error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rwrp: " << e.what() << '\n';
    return 1;
  }
}
