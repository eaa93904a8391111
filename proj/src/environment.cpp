#include "rwrp/environment.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>

#include "rwrp/cone_geometry.hpp"
#include "rwrp/counter_rng.hpp"

namespace rwrp {

namespace {

const std::pair<EnvKind, const char*> kKindNames[] = {
    {EnvKind::iid_site, "iid-site"},     {EnvKind::iid_edge, "iid-edge"},
    {EnvKind::moving_average, "finite-range-moving-average"},
    {EnvKind::periodic, "periodic"},     {EnvKind::constant, "constant"},
    {EnvKind::rwre, "rwre"}};

double number_field(const nlohmann::json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number()) throw SchemaError(ctx + "." + key + ": missing or not a number");
  double v = j[key].get<double>();
  if (!std::isfinite(v)) throw SchemaError(ctx + "." + key + ": not finite");
  return v;
}

}  // namespace

std::string kind_name(EnvKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "unknown";
}

std::string policy_name(BoundaryPolicy p) { return p == BoundaryPolicy::reject ? "reject" : "periodic-wrap"; }

double Distribution::quantile(double u) const {
  switch (kind) {
    case DistKind::constant:
      return a;
    case DistKind::uniform:
      return a + (b - a) * u;
    case DistKind::exponential:
      return -std::log(u) / a;
    case DistKind::bernoulli_levels:
      return u < 1 - q ? a : b;
  }
  return a;
}

double Distribution::mean() const {
  switch (kind) {
    case DistKind::constant:
      return a;
    case DistKind::uniform:
      return 0.5 * (a + b);
    case DistKind::exponential:
      return 1.0 / a;
    case DistKind::bernoulli_levels:
      return (1 - q) * a + q * b;
  }
  return a;
}

nlohmann::json Distribution::to_json() const {
  switch (kind) {
    case DistKind::constant:
      return {{"type", "constant"}, {"c", a}};
    case DistKind::uniform:
      return {{"type", "uniform"}, {"a", a}, {"b", b}};
    case DistKind::exponential:
      return {{"type", "exponential"}, {"rate", a}};
    case DistKind::bernoulli_levels:
      return {{"type", "bernoulli-levels"}, {"v0", a}, {"v1", b}, {"q", q}};
  }
  return {};
}

Distribution Distribution::from_json(const nlohmann::json& j) {
  const std::string ctx = "distribution";
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw SchemaError("distribution.type: missing or not a string");
  const auto type = j["type"].get<std::string>();
  Distribution d;
  if (type == "constant") {
    d.kind = DistKind::constant;
    d.a = number_field(j, "c", ctx);
  } else if (type == "uniform") {
    d.kind = DistKind::uniform;
    d.a = number_field(j, "a", ctx);
    d.b = number_field(j, "b", ctx);
    if (d.b < d.a) throw SchemaError("distribution.b: must be >= a");
  } else if (type == "exponential") {
    d.kind = DistKind::exponential;
    d.a = number_field(j, "rate", ctx);
    if (!(d.a > 0)) throw SchemaError("distribution.rate: must be positive");
  } else if (type == "bernoulli-levels") {
    d.kind = DistKind::bernoulli_levels;
    d.a = number_field(j, "v0", ctx);
    d.b = number_field(j, "v1", ctx);
    d.q = number_field(j, "q", ctx);
    if (d.q < 0 || d.q > 1) throw SchemaError("distribution.q: must lie in [0,1]");
  } else {
    throw SchemaError("distribution.type: unknown type '" + type + "'");
  }
  return d;
}

void EnvironmentSpec::validate(const StepSet& steps) const {
  const int d = steps.dim();
  if (window < 0) throw SchemaError("window: must be nonnegative");
  if (kind != EnvKind::moving_average && window != 0) throw SchemaError("window: must be 0 for this kind");
  if (kind == EnvKind::periodic) {
    if (static_cast<int>(period.size()) != d) throw SchemaError("period: length must equal the dimension");
    std::int64_t cells = 1;
    for (auto p : period) {
      if (p < 1) throw SchemaError("period: entries must be >= 1");
      cells *= p;
    }
    if (!cell_values.empty()) {
      if (static_cast<std::int64_t>(cell_values.size()) != cells)
        throw SchemaError("cell_values: expected one row per period cell");
      for (const auto& row : cell_values) {
        if (row.size() != 1 && row.size() != steps.size())
          throw SchemaError("cell_values: each row needs 1 or |R| values");
        for (double v : row)
          if (!std::isfinite(v)) throw SchemaError("cell_values: non-finite value");
      }
    }
  }
  if (kind == EnvKind::constant) {
    if (!step_values.empty() && step_values.size() != steps.size())
      throw SchemaError("step_values: expected one value per step");
    if (step_values.empty() && distribution.kind != DistKind::constant)
      throw SchemaError("distribution: constant kind needs a constant distribution or step_values");
  }
  if (kind == EnvKind::rwre) {
    const auto& D = distribution;
    bool positive = (D.kind == DistKind::constant && D.a > 0) || (D.kind == DistKind::uniform && D.a > 0) ||
                    D.kind == DistKind::exponential || (D.kind == DistKind::bernoulli_levels && D.a > 0 && D.b > 0);
    if (!positive) throw SchemaError("distribution: rwre weights must be strictly positive");
  }
}

nlohmann::json EnvironmentSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name(kind);
  j["distribution"] = distribution.to_json();
  j["window"] = window;
  j["period"] = period;
  j["per_step"] = per_step;
  j["seed"] = seed;
  j["boundary"] = policy_name(boundary);
  if (!cell_values.empty()) j["cell_values"] = cell_values;
  if (!step_values.empty()) j["step_values"] = step_values;
  return j;
}

EnvironmentSpec EnvironmentSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("environment spec: expected a JSON object");
  EnvironmentSpec s;
  if (!j.contains("kind") || !j["kind"].is_string()) throw SchemaError("kind: missing or not a string");
  const auto kind = j["kind"].get<std::string>();
  bool found = false;
  for (const auto& [k, name] : kKindNames)
    if (kind == name) {
      s.kind = k;
      found = true;
    }
  if (!found) throw SchemaError("kind: unknown environment kind '" + kind + "'");
  if (j.contains("distribution")) {
    s.distribution = Distribution::from_json(j["distribution"]);
  } else if (s.kind != EnvKind::constant && s.kind != EnvKind::periodic) {
    throw SchemaError("distribution: missing");
  }
  if (j.contains("window")) {
    if (!j["window"].is_number_integer()) throw SchemaError("window: not an integer");
    s.window = j["window"].get<int>();
  }
  if (j.contains("period")) {
    if (!j["period"].is_array()) throw SchemaError("period: not an array");
    for (const auto& p : j["period"]) {
      if (!p.is_number_integer()) throw SchemaError("period: non-integer entry");
      s.period.push_back(p.get<std::int64_t>());
    }
  }
  if (j.contains("per_step")) {
    if (!j["per_step"].is_boolean()) throw SchemaError("per_step: not a boolean");
    s.per_step = j["per_step"].get<bool>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw SchemaError("seed: not an integer");
    s.seed = j["seed"].is_number_unsigned() ? j["seed"].get<std::uint64_t>()
                                            : static_cast<std::uint64_t>(j["seed"].get<std::int64_t>());
  }
  s.boundary = s.kind == EnvKind::periodic ? BoundaryPolicy::periodic_wrap : BoundaryPolicy::reject;
  if (j.contains("boundary")) {
    const auto b = j["boundary"].is_string() ? j["boundary"].get<std::string>() : "";
    if (b == "reject") s.boundary = BoundaryPolicy::reject;
    else if (b == "periodic-wrap") s.boundary = BoundaryPolicy::periodic_wrap;
    else throw SchemaError("boundary: expected 'reject' or 'periodic-wrap'");
  }
  if (j.contains("cell_values")) {
    if (!j["cell_values"].is_array()) throw SchemaError("cell_values: not an array");
    for (const auto& row : j["cell_values"]) {
      RealVec r;
      if (row.is_number()) r.push_back(row.get<double>());
      else if (row.is_array())
        for (const auto& v : row) {
          if (!v.is_number()) throw SchemaError("cell_values: non-numeric entry");
          r.push_back(v.get<double>());
        }
      else throw SchemaError("cell_values: rows must be numbers or arrays");
      s.cell_values.push_back(r);
    }
  }
  if (j.contains("step_values")) {
    if (!j["step_values"].is_array()) throw SchemaError("step_values: not an array");
    for (const auto& v : j["step_values"]) {
      if (!v.is_number()) throw SchemaError("step_values: non-numeric entry");
      s.step_values.push_back(v.get<double>());
    }
  }
  if (s.kind == EnvKind::periodic && s.cell_values.empty() && !j.contains("distribution"))
    throw SchemaError("distribution: periodic kind needs a distribution or cell_values");
  return s;
}

EnvironmentSpec EnvironmentSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open environment spec " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("environment spec: ") + e.what());
  }
  return from_json(j);
}

EnvironmentSpec EnvironmentSpec::constant_value(double c) {
  EnvironmentSpec s;
  s.kind = EnvKind::constant;
  s.distribution.kind = DistKind::constant;
  s.distribution.a = c;
  return s;
}

EnvironmentSpec EnvironmentSpec::iid(Distribution dist, std::uint64_t seed, bool per_step) {
  EnvironmentSpec s;
  s.kind = EnvKind::iid_site;
  s.distribution = dist;
  s.seed = seed;
  s.per_step = per_step;
  return s;
}

double Environment::underlying(const IntVec& y, std::size_t k) const {
  return spec_.distribution.quantile(uniform_at(spec_.seed, y, spec_.per_step ? k : 0));
}

double Environment::evaluate(const IntVec& x, std::size_t k) const {
  return offset_.empty() ? field(x, k) : field(add(x, offset_), k);
}

double Environment::field(const IntVec& x, std::size_t k) const {
  switch (spec_.kind) {
    case EnvKind::constant:
      return spec_.step_values.empty() ? spec_.distribution.a : spec_.step_values[k];
    case EnvKind::iid_site:
      return underlying(x, k);
    case EnvKind::iid_edge: {
      const IntVec& z = steps_.step(k);
      int back = steps_.index_of(scale(z, -1));
      IntVec y = add(x, z);
      if (back >= 0 && y < x)
        return spec_.distribution.quantile(uniform_at(spec_.seed, y, static_cast<std::uint64_t>(back)));
      return spec_.distribution.quantile(uniform_at(spec_.seed, x, k));
    }
    case EnvKind::moving_average: {
      double s = 0;
      for (const auto& off : ball_) s += underlying(add(x, off), k);
      return s / static_cast<double>(ball_.size());
    }
    case EnvKind::periodic: {
      const int d = static_cast<int>(x.size());
      IntVec cell(d);
      std::int64_t idx = 0;
      for (int i = 0; i < d; ++i) {
        std::int64_t p = spec_.period[i];
        cell[i] = ((x[i] % p) + p) % p;
        idx = idx * p + cell[i];
      }
      if (!spec_.cell_values.empty()) {
        const auto& row = spec_.cell_values[idx];
        return row.size() == 1 ? row[0] : row[k];
      }
      return underlying(cell, k);
    }
    case EnvKind::rwre: {
      double total = 0;
      for (std::size_t s = 0; s < steps_.size(); ++s)
        total += spec_.distribution.quantile(uniform_at(spec_.seed, x, s));
      double pi = spec_.distribution.quantile(uniform_at(spec_.seed, x, k)) / total;
      return -std::log(pi) + steps_.log_p(k);
    }
  }
  return 0;
}

void Environment::fill() {
  const std::int64_t n = box_.size();
  const std::size_t K = steps_.size();
  if (n > kMaxValues / static_cast<std::int64_t>(K))
    throw CapacityError("box " + box_.str() + " needs " + std::to_string(n) + " sites x " + std::to_string(K) +
                        " steps, above the budget of " + std::to_string(kMaxValues) + " values");
  if (spec_.kind == EnvKind::moving_average) {
    const int d = box_.dim();
    const int M = spec_.window;
    Box ball = Box::cube(d, -M, M);
    for (std::int64_t i = 0; i < ball.size(); ++i) {
      IntVec off = ball.point(i);
      if (l1_norm(off) <= M) ball_.push_back(off);
    }
  }
  values_.assign(n * K, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < n; ++s) {
    IntVec x = box_.point(s);
    for (std::size_t k = 0; k < K; ++k) values_[s * K + k] = evaluate(x, k);
  }
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("environment produced a non-finite potential");
  if (spec_.kind == EnvKind::rwre) {
    pi_.resize(values_.size());
    for (std::int64_t s = 0; s < n; ++s)
      for (std::size_t k = 0; k < K; ++k) pi_[s * K + k] = steps_.p(k) * std::exp(-values_[s * K + k]);
  }
}

Environment Environment::sample(const EnvironmentSpec& spec, const StepSet& steps, const Box& box) {
  if (box.dim() != steps.dim()) throw SchemaError("box: dimension differs from the step set");
  spec.validate(steps);
  if (spec.kind == EnvKind::periodic && spec.boundary == BoundaryPolicy::periodic_wrap)
    for (int i = 0; i < box.dim(); ++i)
      if (box.extent(i) % spec.period[i] != 0)
        throw SchemaError("box: extents must be multiples of the period under periodic-wrap");
  Environment env;
  env.spec_ = spec;
  env.steps_ = steps;
  env.box_ = box;
  env.fill();
  return env;
}

Environment Environment::constant(const StepSet& steps, const Box& box, double c) {
  return sample(EnvironmentSpec::constant_value(c), steps, box);
}

double Environment::potential(const IntVec& x, std::size_t k) const {
  std::int64_t idx = box_.index(x);
  if (idx < 0) {
    if (spec_.boundary == BoundaryPolicy::reject)
      throw OutOfBox("site " + format_vec(x) + " is outside the environment box " + box_.str());
    idx = box_.index(box_.wrap(x));
  }
  return values_[idx * K() + k];
}

double Environment::potential(const IntVec& x, const IntVec& z) const {
  int k = steps_.index_of(z);
  if (k < 0) throw DomainError(format_vec(z) + " is not a step");
  return potential(x, static_cast<std::size_t>(k));
}

std::vector<double> Environment::values_on(const Box& b) const {
  if (b == box_) return values_;
  if (spec_.boundary == BoundaryPolicy::reject)
    for (int i = 0; i < b.dim(); ++i)
      if (b.lo[i] < box_.lo[i] || b.hi[i] > box_.hi[i])
        throw OutOfBox("box " + b.str() + " exceeds the environment box " + box_.str());
  const std::int64_t n = b.size();
  const std::size_t K = this->K();
  std::vector<double> out(n * K);
  for (std::int64_t s = 0; s < n; ++s) {
    IntVec x = b.point(s);
    for (std::size_t k = 0; k < K; ++k) out[s * K + k] = potential(x, k);
  }
  return out;
}

Environment Environment::shift(const IntVec& u) const {
  Environment env = *this;
  env.offset_ = offset_.empty() ? u : add(offset_, u);
  const std::int64_t n = box_.size();
  const std::size_t K = this->K();
  for (std::int64_t s = 0; s < n; ++s) {
    IntVec y = add(box_.point(s), u);
    for (std::size_t k = 0; k < K; ++k)
      env.values_[s * K + k] = spec_.boundary == BoundaryPolicy::periodic_wrap ? potential(y, k) : evaluate(y, k);
  }
  if (!pi_.empty())
    for (std::int64_t i = 0; i < n * static_cast<std::int64_t>(K); ++i)
      env.pi_[i] = steps_.p(i % K) * std::exp(-env.values_[i]);
  return env;
}

double Environment::min_value() const {
  double m = values_.empty() ? 0 : values_[0];
  for (double v : values_) m = std::min(m, v);
  return m;
}

bool Environment::is_constant() const {
  for (std::size_t i = K(); i < values_.size(); ++i)
    if (values_[i] != values_[i % K()]) return false;
  return true;
}

REpsilon Environment::r_epsilon(double eps) const {
  REpsilon r;
  Face zf = zero_face(steps_);
  if (zf.empty()) {
    r.zero_face_empty = true;
    return r;
  }
  IntVec origin(box_.dim(), 0);
  if (!box_.contains(origin)) throw DomainError("r_epsilon needs the origin inside the box");
  std::vector<IntVec> moves;
  for (int k : zf.generators) {
    moves.push_back(steps_.step(k));
    moves.push_back(scale(steps_.step(k), -1));
  }
  std::vector<char> seen(box_.size(), 0);
  std::deque<IntVec> queue{origin};
  seen[box_.index(origin)] = 1;
  std::int64_t best = -1;
  while (!queue.empty()) {
    IntVec x = queue.front();
    queue.pop_front();
    const std::int64_t idx = box_.index(x);
    for (int k : zf.generators)
      if (values_[idx * K() + k] >= eps) {
        std::int64_t n1 = l1_norm(x);
        if (best < 0 || n1 < best) best = n1;
        break;
      }
    for (const auto& m : moves) {
      IntVec y = add(x, m);
      std::int64_t j = box_.index(y);
      if (j >= 0 && !seen[j]) {
        seen[j] = 1;
        queue.push_back(y);
      }
    }
  }
  if (best < 0) {
    r.box_exhausted = true;
    r.value = -1;
  } else {
    r.value = best;
  }
  return r;
}

void Environment::save(const std::string& prefix) const {
  static_assert(std::endian::native == std::endian::little, "payload is written little-endian");
  nlohmann::json header;
  header["version"] = 1;
  header["spec"] = spec_.to_json();
  header["steps"] = steps_.to_json();
  header["box"] = {{"lo", box_.lo}, {"hi", box_.hi}};
  header["sites"] = box_.size();
  header["values_per_site"] = K();
  if (!offset_.empty()) header["shift"] = offset_;
  std::ofstream hj(prefix + ".json");
  if (!hj) throw SchemaError("cannot write " + prefix + ".json");
  hj << header.dump(2) << '\n';
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw SchemaError("cannot write " + prefix + ".bin");
  bin.write(reinterpret_cast<const char*>(values_.data()), static_cast<std::streamsize>(values_.size() * sizeof(double)));
}

Environment Environment::load(const std::string& prefix) {
  std::ifstream hj(prefix + ".json");
  if (!hj) throw SchemaError("cannot open " + prefix + ".json");
  nlohmann::json header;
  try {
    hj >> header;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("environment header: ") + e.what());
  }
  if (!header.contains("version") || header["version"] != 1) throw SchemaError("version: unsupported header version");
  if (!header.contains("box")) throw SchemaError("box: missing from header");
  Environment env;
  env.spec_ = EnvironmentSpec::from_json(header.at("spec"));
  env.steps_ = StepSet::from_json(header.at("steps"));
  env.box_ = Box(header["box"].at("lo").get<IntVec>(), header["box"].at("hi").get<IntVec>());
  if (header.contains("shift")) env.offset_ = header["shift"].get<IntVec>();
  const std::size_t count = static_cast<std::size_t>(env.box_.size()) * env.K();
  env.values_.resize(count);
  std::ifstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw SchemaError("cannot open " + prefix + ".bin");
  bin.read(reinterpret_cast<char*>(env.values_.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (bin.gcount() != static_cast<std::streamsize>(count * sizeof(double)))
    throw SchemaError("values: payload shorter than the header declares");
  if (env.spec_.kind == EnvKind::moving_average) {
    const int M = env.spec_.window;
    Box ball = Box::cube(env.box_.dim(), -M, M);
    for (std::int64_t i = 0; i < ball.size(); ++i)
      if (l1_norm(ball.point(i)) <= M) env.ball_.push_back(ball.point(i));
  }
  if (env.spec_.kind == EnvKind::rwre) {
    env.pi_.resize(count);
    for (std::size_t i = 0; i < count; ++i) env.pi_[i] = env.steps_.p(i % env.K()) * std::exp(-env.values_[i]);
  }
  return env;
}

}  // namespace rwrp
