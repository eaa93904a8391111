#pragma once

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "rwrp/environment.hpp"
#include "rwrp/step_set.hpp"

namespace rwrp {

// A downstream failure, prefixed with the experiment that raised it.
class ExperimentError : public Error {
 public:
  using Error::Error;
};

// 17 significant digits; "inf", "-inf" and "nan" spelled out.
std::string format_real(double x);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t columns_;
};

struct ExperimentConfig {
  std::string experiment;  // env, passage, polymer, shape-scan, lyapunov, corrector, accept
  nlohmann::json steps;        // step-set document or path to one
  nlohmann::json environment;  // environment spec or path to one
  nlohmann::json params = nlohmann::json::object();
  int replicas = 1;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out_dir = ".";

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;
  // Parses every referenced document; SchemaError names the offending field.
  void validate() const;
  // FNV-1a of the canonical JSON dump, as 16 hex digits.
  std::string hash() const;

  StepSet step_set() const;
  EnvironmentSpec env_spec() const;
};

struct RunResult {
  int status = 0;
  std::vector<std::string> artifacts;
  nlohmann::json manifest;
};

// Executes one experiment. Writes the artifacts plus manifest.json into
// out_dir; wall time goes to timing.json so that everything else replays
// byte for byte.
RunResult run(const ExperimentConfig& config);

}  // namespace rwrp
