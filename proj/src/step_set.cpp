#include "rwrp/step_set.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <set>

#include "rwrp/lp.hpp"

namespace rwrp {

namespace {

IntVec integer_direction(const std::vector<IntVec>& steps, int d) {
  LinearProgram lp;
  std::vector<int> u(d);
  for (int i = 0; i < d; ++i) u[i] = lp.add_var(true);
  for (const auto& z : steps) {
    LinearProgram::Terms t;
    for (int i = 0; i < d; ++i)
      if (z[i] != 0) t.emplace_back(u[i], Rational(z[i]));
    lp.add_constraint(t, LinearProgram::Sense::ge, 1);
  }
  // minimize the l1-ish size to keep the vector small: maximize -sum(z.u)
  LinearProgram::Terms obj;
  for (const auto& z : steps)
    for (int i = 0; i < d; ++i)
      if (z[i] != 0) obj.emplace_back(u[i], Rational(-z[i]));
  lp.maximize(obj);
  auto res = lp.solve();
  if (res.status == LpStatus::infeasible) return {};
  if (res.status == LpStatus::unbounded) {
    // objective unbounded cannot happen (sum z.u >= |R|), kept for completeness
    return {};
  }
  Integer den = 1;
  for (const auto& x : res.x) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(x));
  IntVec out(d);
  for (int i = 0; i < d; ++i) {
    Rational v = res.x[i] * den;
    out[i] = boost::multiprecision::numerator(v).convert_to<std::int64_t>();
  }
  return out;
}

}  // namespace

StepSet::StepSet(std::vector<IntVec> steps, RealVec kernel) : steps_(std::move(steps)), kernel_(std::move(kernel)) {
  if (steps_.empty()) throw SchemaError("steps: step set is empty");
  d_ = static_cast<int>(steps_[0].size());
  if (d_ < 1) throw SchemaError("steps: dimension must be at least 1");
  std::set<IntVec> seen;
  for (const auto& z : steps_) {
    if (static_cast<int>(z.size()) != d_) throw SchemaError("steps: inconsistent dimensions");
    if (!seen.insert(z).second) throw SchemaError("steps: duplicate step " + format_vec(z));
    if (l1_norm(z) == 0) throw SchemaError("steps: zero step is not admissible");
  }
  if (kernel_.empty()) kernel_.assign(steps_.size(), 1.0 / static_cast<double>(steps_.size()));
  if (kernel_.size() != steps_.size()) throw SchemaError("kernel: length differs from steps");
  double sum = 0;
  for (double w : kernel_) {
    if (!(w > 0) || w > 1 || (w == 1 && steps_.size() > 1))
      throw SchemaError("kernel: weights must lie in (0,1)");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw SchemaError("kernel: weights must sum to 1");
  for (double w : kernel_) log_kernel_.push_back(std::log(w));
  direction_ = integer_direction(steps_, d_);
  directed_ = !direction_.empty();
}

StepSet StepSet::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("step set: expected a JSON object");
  if (!j.contains("steps") || !j["steps"].is_array()) throw SchemaError("steps: missing or not an array");
  std::vector<IntVec> steps;
  for (const auto& s : j["steps"]) {
    if (!s.is_array()) throw SchemaError("steps: each step must be an integer array");
    IntVec z;
    for (const auto& c : s) {
      if (!c.is_number_integer()) throw SchemaError("steps: non-integer coordinate");
      z.push_back(c.get<std::int64_t>());
    }
    steps.push_back(z);
  }
  RealVec kernel;
  if (j.contains("kernel")) {
    if (!j["kernel"].is_array()) throw SchemaError("kernel: expected an array");
    for (const auto& w : j["kernel"]) {
      if (!w.is_number()) throw SchemaError("kernel: non-numeric weight");
      kernel.push_back(w.get<double>());
    }
  }
  StepSet out(std::move(steps), std::move(kernel));
  if (j.contains("d")) {
    if (!j["d"].is_number_integer() || j["d"].get<int>() != out.dim())
      throw SchemaError("d: does not match step dimension");
  }
  return out;
}

StepSet StepSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open step set file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("step set: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json StepSet::to_json() const {
  nlohmann::json j;
  j["d"] = d_;
  j["steps"] = steps_;
  j["kernel"] = kernel_;
  return j;
}

StepSet StepSet::unit_directed(int d) {
  std::vector<IntVec> s;
  for (int i = 0; i < d; ++i) {
    IntVec z(d, 0);
    z[i] = 1;
    s.push_back(z);
  }
  return StepSet(s);
}

StepSet StepSet::simple_random_walk(int d) {
  std::vector<IntVec> s;
  for (int i = 0; i < d; ++i) {
    IntVec z(d, 0);
    z[i] = 1;
    s.push_back(z);
    z[i] = -1;
    s.push_back(z);
  }
  return StepSet(s);
}

int StepSet::index_of(const IntVec& z) const {
  for (std::size_t k = 0; k < steps_.size(); ++k)
    if (steps_[k] == z) return static_cast<int>(k);
  return -1;
}

std::int64_t StepSet::max_step_l1() const {
  std::int64_t m = 0;
  for (const auto& z : steps_) m = std::max(m, l1_norm(z));
  return m;
}

}  // namespace rwrp
