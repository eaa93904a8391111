#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rwrp/lattice.hpp"
#include "rwrp/step_set.hpp"

namespace rwrp {

enum class EnvKind { iid_site, iid_edge, moving_average, periodic, constant, rwre };
enum class DistKind { constant, uniform, exponential, bernoulli_levels };
enum class BoundaryPolicy { periodic_wrap, reject };

struct Distribution {
  DistKind kind = DistKind::constant;
  // constant: a=c; uniform: [a,b]; exponential: a=rate;
  // bernoulli-levels: v0=a, v1=b, q=q (probability of v1)
  double a = 0, b = 0, q = 0;

  double quantile(double u) const;
  double mean() const;
  nlohmann::json to_json() const;
  static Distribution from_json(const nlohmann::json& j);
};

struct EnvironmentSpec {
  EnvKind kind = EnvKind::constant;
  Distribution distribution;
  int window = 0;
  IntVec period;
  bool per_step = false;
  std::uint64_t seed = 0;
  BoundaryPolicy boundary = BoundaryPolicy::reject;
  // periodic kind: optional explicit values, one row per cell in row-major
  // cell order, each row either one value or one value per step
  std::vector<RealVec> cell_values;
  // constant kind: optional per-step constants
  RealVec step_values;

  void validate(const StepSet& steps) const;
  nlohmann::json to_json() const;
  static EnvironmentSpec from_json(const nlohmann::json& j);
  static EnvironmentSpec load(const std::string& path);

  static EnvironmentSpec constant_value(double c);
  static EnvironmentSpec iid(Distribution dist, std::uint64_t seed, bool per_step = false);
};

std::string kind_name(EnvKind k);
std::string policy_name(BoundaryPolicy p);

struct REpsilon {
  std::int64_t value = 0;
  bool box_exhausted = false;
  bool zero_face_empty = false;
};

// Realized potential V(T_x w, z) on a box. Immutable after construction.
class Environment {
 public:
  // Largest number of stored values (sites x steps).
  static constexpr std::int64_t kMaxValues = 100'000'000;

  static Environment sample(const EnvironmentSpec& spec, const StepSet& steps, const Box& box);
  static Environment constant(const StepSet& steps, const Box& box, double c);

  const EnvironmentSpec& spec() const { return spec_; }
  const StepSet& steps() const { return steps_; }
  const Box& box() const { return box_; }
  BoundaryPolicy policy() const { return spec_.boundary; }
  std::size_t K() const { return steps_.size(); }
  const std::vector<double>& values() const { return values_; }
  // Transition probabilities per site (rwre kind only).
  const std::vector<double>& rwre_probabilities() const { return pi_; }

  // The underlying field at any site, ignoring box and policy (shifts apply).
  double evaluate(const IntVec& x, std::size_t k) const;
  // Accumulated shift; empty when unshifted.
  const IntVec& offset() const { return offset_; }
  // Stored value with boundary semantics; OutOfBox under reject.
  double potential(const IntVec& x, std::size_t k) const;
  double potential(const IntVec& x, const IntVec& z) const;
  // Dense site x step array over another box, with boundary semantics.
  std::vector<double> values_on(const Box& b) const;
  // Environment seen from x+u: potential(shift(u), x) == potential(x+u).
  Environment shift(const IntVec& u) const;

  double min_value() const;
  bool is_constant() const;

  REpsilon r_epsilon(double eps) const;

  void save(const std::string& prefix) const;
  static Environment load(const std::string& prefix);

 private:
  double underlying(const IntVec& y, std::size_t k) const;
  double field(const IntVec& x, std::size_t k) const;
  void fill();

  EnvironmentSpec spec_;
  StepSet steps_;
  Box box_;
  std::vector<double> values_;
  std::vector<double> pi_;
  std::vector<IntVec> ball_;  // moving-average offsets
  IntVec offset_;
};

}  // namespace rwrp
