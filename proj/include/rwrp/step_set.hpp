#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "rwrp/types.hpp"

namespace rwrp {

// Admissible steps R with transition kernel p. Immutable after construction.
class StepSet {
 public:
  StepSet() = default;
  // Uniform kernel when `kernel` is empty.
  StepSet(std::vector<IntVec> steps, RealVec kernel = {});

  static StepSet from_json(const nlohmann::json& j);
  static StepSet load(const std::string& path);
  nlohmann::json to_json() const;

  // {e_1, ..., e_d}
  static StepSet unit_directed(int d);
  // {+-e_1, ..., +-e_d}
  static StepSet simple_random_walk(int d);

  int dim() const { return d_; }
  std::size_t size() const { return steps_.size(); }
  const std::vector<IntVec>& steps() const { return steps_; }
  const IntVec& step(std::size_t k) const { return steps_[k]; }
  const RealVec& kernel() const { return kernel_; }
  double p(std::size_t k) const { return kernel_[k]; }
  double log_p(std::size_t k) const { return log_kernel_[k]; }
  int index_of(const IntVec& z) const;  // -1 when z is not a step
  bool is_directed() const { return directed_; }
  // Integer vector u with u.z >= 1 on every step; empty unless directed.
  const IntVec& direction() const { return direction_; }
  std::int64_t max_step_l1() const;

 private:
  int d_ = 0;
  std::vector<IntVec> steps_;
  RealVec kernel_;
  RealVec log_kernel_;
  bool directed_ = false;
  IntVec direction_;
};

}  // namespace rwrp
