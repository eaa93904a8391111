#include "rwrp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "rwrp/acceptance.hpp"
#include "rwrp/cone_geometry.hpp"
#include "rwrp/corrector.hpp"
#include "rwrp/counter_rng.hpp"
#include "rwrp/kernels.hpp"
#include "rwrp/limit_lab.hpp"
#include "rwrp/passage.hpp"
#include "rwrp/polymer.hpp"

namespace rwrp {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw Error("cannot write " + path);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                                            std::to_string(columns_));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out_ << c;
      continue;
    }
    out_ << '"';
    for (char ch : c) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
    out_ << '"';
  }
  out_ << '\n';
}

namespace {

const std::vector<std::string> kExperiments{"env", "passage", "polymer", "shape-scan", "lyapunov", "corrector", "accept"};

json load_json(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw SchemaError(field + ": cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError(field + ": " + e.what());
  }
}

// A document given inline or as a path string.
json resolve(const json& j, const std::string& field) { return j.is_string() ? load_json(j.get<std::string>(), field) : j; }

template <class T>
T param(const json& p, const std::string& key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError("params." + key + ": wrong type");
  }
}

std::string param_text(const json& p, const std::string& key, const std::string& fallback) {
  if (!p.contains(key)) return fallback;
  const json& v = p.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) {
      if (!s.empty()) s += ',';
      s += e.is_string() ? e.get<std::string>() : e.dump();
    }
    return s;
  }
  return v.dump();
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const std::string& field) {
  try {
    return parse_int_vec(text);
  } catch (const Error& e) {
    throw SchemaError(field + ": " + e.what());
  }
}

RealVec parse_real_vec(const std::string& text) {
  RealVec out;
  for (const auto& r : parse_rational_vec(text)) out.push_back(r.convert_to<double>());
  return out;
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Context {
  const ExperimentConfig& cfg;
  fs::path dir;
  std::vector<std::string> artifacts;
  json seeds = json::array();
  json tolerances = json::object();

  std::string out(const std::string& name) {
    fs::path p = (fs::path(name).is_absolute() ? fs::path(name) : dir / name).lexically_normal();
    artifacts.push_back(p.string());
    return p.string();
  }
  // Companion artifact next to an already resolved path: out.csv -> out<suffix>.
  std::string sibling(const std::string& resolved, const std::string& suffix) {
    fs::path p(resolved);
    std::string s = (p.parent_path() / p.stem()).string() + suffix;
    artifacts.push_back(s);
    return s;
  }
};

// Environment from a saved prefix (params.env) or sampled from the spec on params.box.
Environment environment(Context& ctx) {
  const json& p = ctx.cfg.params;
  if (p.contains("env")) return Environment::load(param<std::string>(p, "env", ""));
  if (ctx.cfg.environment.is_null()) throw SchemaError("environment: required (or params.env)");
  if (!p.contains("box")) throw SchemaError("params.box: required to sample an environment");
  EnvironmentSpec spec = ctx.cfg.env_spec();
  ctx.seeds.push_back(spec.seed);
  return Environment::sample(spec, ctx.cfg.step_set(), Box::parse(param<std::string>(p, "box", "")));
}

void run_env(Context& ctx) {
  const json& p = ctx.cfg.params;
  if (!p.contains("box")) throw SchemaError("params.box: required");
  EnvironmentSpec spec = ctx.cfg.env_spec();
  Environment env = Environment::sample(spec, ctx.cfg.step_set(), Box::parse(param<std::string>(p, "box", "")));
  ctx.seeds.push_back(spec.seed);
  std::string prefix = param<std::string>(p, "out", "env");
  fs::path full = fs::path(prefix).is_absolute() ? fs::path(prefix) : ctx.dir / prefix;
  env.save(full.string());
  ctx.artifacts.push_back(full.string() + ".json");
  ctx.artifacts.push_back(full.string() + ".bin");
}

std::vector<IntVec> read_targets(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw SchemaError("params.targets: cannot open '" + path + "'");
  std::vector<IntVec> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (auto& c : line)
      if (c == ' ' || c == '\t') c = ',';
    IntVec x = parse_int_vec(line);
    if (static_cast<int>(x.size()) != d) throw SchemaError("params.targets: '" + line + "' has the wrong dimension");
    out.push_back(x);
  }
  return out;
}

void run_passage(Context& ctx) {
  const json& p = ctx.cfg.params;
  Environment env = environment(ctx);
  const int d = env.steps().dim();
  const std::string mode = param<std::string>(p, "mode", "a");
  const IntVec origin = p.contains("origin") ? parse_int_vec(param_text(p, "origin", "")) : IntVec(d, 0);
  const Box box = p.contains("passage_box") ? Box::parse(param<std::string>(p, "passage_box", "")) : env.box();
  SolveOptions opt;
  opt.tol = param<double>(p, "tol", opt.tol);
  opt.max_iter = param<std::int64_t>(p, "max_iter", opt.max_iter);
  const std::string tsrc = param<std::string>(p, "targets", "grid");
  std::vector<IntVec> targets;
  if (tsrc == "grid") box.for_each([&](std::int64_t, const IntVec& x) { targets.push_back(x); });
  else targets = read_targets(tsrc, d);

  CsvWriter csv(ctx.out(param<std::string>(p, "out", "passage.csv")), {"site", "value", "tol_achieved"});
  double worst_tol = 0;
  auto emit = [&](const IntVec& y, double v, double tol) {
    worst_tol = std::max(worst_tol, tol);
    csv.row({format_vec(y), format_real(v), format_real(tol)});
  };
  if (mode == "a") {
    if (env.steps().is_directed()) {
      PassageField f = a_directed(env, origin, {}, box);
      for (const auto& y : targets) emit(y, f.value_at(y), 0.0);
    } else {
      for (const auto& y : targets) {
        if (y == origin) {
          emit(y, 0.0, 0.0);
          continue;
        }
        PassageField f = a_general(env, origin, y, box, opt);
        emit(y, f.value_at(origin), f.tolerance_achieved);
      }
    }
  } else if (mode == "a-inf" || mode == "lpp") {
    PassageField f = a_infty(env, origin, {}, box, mode == "lpp");
    for (const auto& y : targets) emit(y, f.value_at(y), 0.0);
  } else if (mode == "green") {
    for (const auto& y : targets) {
      PassageField f = green(env, y, box, opt);
      emit(y, f.value_at(origin), f.tolerance_achieved);
    }
  } else {
    throw SchemaError("params.mode: expected a, a-inf, lpp or green, got '" + mode + "'");
  }
  ctx.tolerances["passage"] = worst_tol;
}

void run_polymer(Context& ctx) {
  const json& p = ctx.cfg.params;
  Environment env = environment(ctx);
  const int d = env.steps().dim();
  const int n = param<int>(p, "n", 0);
  if (n < 1) throw SchemaError("params.n: must be a positive integer");
  const Temperature temp = parse_temperature(param<std::string>(p, "temp", "finite"));
  const IntVec origin = p.contains("origin") ? parse_int_vec(param_text(p, "origin", "")) : IntVec(d, 0);
  auto slices = polymer_dp(env, origin, n, temp);
  const std::string path = ctx.out(param<std::string>(p, "out", "polymer.csv"));
  {
    CsvWriter csv(path, {"site", "value"});
    slices[n].box.for_each([&](std::int64_t, const IntVec& x) {
      if (slices[n].in_support(x)) csv.row({format_vec(x), format_real(slices[n].value_at(x))});
    });
  }
  if (p.contains("h")) {
    RealVec h = parse_real_vec(param_text(p, "h", ""));
    if (static_cast<int>(h.size()) != d) throw SchemaError("params.h: wrong dimension");
    CsvWriter csv(ctx.sibling(path, ".level.csv"), {"n", "h", "point_to_level", "summed_point_to_level"});
    csv.row({std::to_string(n), format_vec(h), format_real(point_to_level(slices[n], h)),
             format_real(summed_point_to_level(slices, n, h))});
  }
}

Face select_face(const StepSet& steps, const std::string& text) {
  if (text == "auto" || text.empty()) return whole_cone(steps);
  IntVec gens = parse_int_vec(text);
  for (const Face& f : cone_faces(steps)) {
    IntVec g(f.generators.begin(), f.generators.end());
    if (g == gens) return f;
  }
  throw SchemaError("params.face: '" + text + "' is not a face of the step cone");
}

Box scan_region_box(const StepSet& steps, std::int64_t reach) {
  const int d = steps.dim();
  Box b = Box::cube(d, 0, 0);
  for (int i = 0; i < d; ++i)
    for (const auto& z : steps.steps()) {
      if (z[i] < 0) b.lo[i] = -reach;
      if (z[i] > 0) b.hi[i] = reach;
    }
  return b;
}

void run_shape_scan(Context& ctx) {
  const json& p = ctx.cfg.params;
  const StepSet steps = ctx.cfg.step_set();
  const EnvironmentSpec spec = ctx.cfg.env_spec();
  const bool zero = param<std::string>(p, "temp", "finite") == "zero";
  const Face face = select_face(steps, param_text(p, "face", "auto"));
  const double delta = param<double>(p, "delta", 0.2);
  const std::vector<std::int64_t> radii = parse_int_list(param_text(p, "radii", "64,128,256"), "params.radii");
  if (radii.empty()) throw SchemaError("params.radii: empty");
  const std::int64_t band = param<std::int64_t>(p, "band", 8);
  const int dirs = param<int>(p, "dirs", 64);
  const std::int64_t T = param<std::int64_t>(p, "fan_scale", 4 * radii.back());
  const int fan_replicas = param<int>(p, "fan_replicas", ctx.cfg.replicas);

  const std::uint64_t fan_seed = mix64(ctx.cfg.seed ^ 0xfa0000ull);
  DirectionFan fan = estimate_fan(spec, steps, face, dirs, T, fan_replicas, fan_seed, zero);
  for (int r = 0; r < fan_replicas; ++r) ctx.seeds.push_back(mix64(fan_seed + r));
  ADeltaRegion region(steps, face, delta);
  const Box box = scan_region_box(steps, radii.back() + band);
  ScanGeometry geom = ScanGeometry::build(box, region, radii, band);

  const std::string path = ctx.out(param<std::string>(p, "out", "shape_scan.csv"));
  CsvWriter csv(path, {"direction", "radius", "a_over_r", "alpha_hat", "abs_err_over_r"});
  CsvWriter prof(ctx.sibling(path, ".profile.csv"), {"replica", "radius", "max_abs_err_over_r", "sites"});
  const IntVec origin(steps.dim(), 0);
  for (int r = 0; r < ctx.cfg.replicas; ++r) {
    EnvironmentSpec s = spec;
    s.seed = mix64(ctx.cfg.seed + static_cast<std::uint64_t>(r));
    ctx.seeds.push_back(s.seed);
    Environment env = Environment::sample(s, steps, box);
    auto rows = shape_scan(env, geom, fan, zero);
    PassageField f = zero ? a_infty(env, origin, {}, box) : a_directed(env, origin, {}, box);
    for (const auto& row : rows) {
      const double n1 = static_cast<double>(l1_norm(row.argmax));
      const double a = f.value_at(row.argmax) / n1;
      const double al = fan(row.argmax) / n1;
      csv.row({format_vec(row.argmax), std::to_string(row.radius), format_real(a), format_real(al),
               format_real(std::fabs(a - al))});
      prof.row({std::to_string(r), std::to_string(row.radius), format_real(row.max_err), std::to_string(row.count)});
    }
  }
}

void run_lyapunov(Context& ctx) {
  const json& p = ctx.cfg.params;
  Environment env = environment(ctx);
  if (!p.contains("xi")) throw SchemaError("params.xi: required");
  const RatVec xi = parse_rational_vec(param_text(p, "xi", ""));
  const std::vector<std::int64_t> grid = parse_int_list(param_text(p, "t_grid", "64,128,256"), "params.t_grid");
  const std::string def = env.steps().is_directed() ? "directed-dp" : "value-iteration";
  const AlphaMethod method = parse_alpha_method(param<std::string>(p, "method", def));
  SolveOptions opt;
  opt.tol = param<double>(p, "tol", opt.tol);
  LyapunovEstimate est = estimate_alpha(env, xi, grid, method, opt);
  const std::string path = ctx.out(param<std::string>(p, "out", "lyapunov.csv"));
  {
    CsvWriter csv(path, {"t", "point", "a_over_t", "running_min"});
    for (std::size_t i = 0; i < est.t.size(); ++i)
      csv.row({std::to_string(est.t[i]), format_vec(est.points[i]), format_real(est.values[i]),
               format_real(est.running_min[i])});
  }
  json summary{{"direction", format_vec(xi)},
               {"method", alpha_method_name(method)},
               {"estimate", est.estimate},
               {"upper_bound", est.upper_bound}};
  std::ofstream(ctx.sibling(path, ".json")) << summary.dump(2) << '\n';
}

// Largest power of two t with xhat_t(xi) inside the box.
std::int64_t fitting_scale(const Environment& env, const RatVec& xi) {
  std::int64_t t = 0;
  for (std::int64_t c = 1; c <= (1 << 20); c *= 2) {
    if (!env.box().contains(xhat(env.steps(), xi, Rational(c)))) break;
    t = c;
  }
  if (t == 0) throw DomainError("no multiple of the direction fits the environment box");
  return t;
}

void run_corrector(Context& ctx) {
  const json& p = ctx.cfg.params;
  Environment env = environment(ctx);
  const StepSet& steps = env.steps();
  const int j = param<int>(p, "j", 4);
  const bool zero = param<std::string>(p, "temp", "finite") == "zero";
  if (!p.contains("xi")) throw SchemaError("params.xi: required");
  const RatVec xi = parse_rational_vec(param_text(p, "xi", ""));
  const std::string htext = param_text(p, "h", "auto");
  std::optional<DirectionFan> fan;
  RealVec h;
  if (htext == "auto") {
    const std::int64_t T = fitting_scale(env, RatVec(steps.dim(), Rational(1)));
    fan = fan_on(env, whole_cone(steps), param<int>(p, "dirs", 17), T, zero);
    h = select_tilt(*fan, xi);
  } else {
    h = parse_real_vec(htext);
  }
  double alpha_hat = 0;
  if (p.contains("alpha_hat")) {
    alpha_hat = param<double>(p, "alpha_hat", 0.0);
  } else if (env.is_constant() && !zero) {
    RealVec vbar(steps.size());
    for (std::size_t k = 0; k < steps.size(); ++k) vbar[k] = env.values()[k];
    alpha_hat = optimize_deterministic_corrector(steps, vbar, xi).value;
  } else {
    const std::int64_t t = fitting_scale(env, xi);
    std::vector<std::int64_t> grid;
    for (std::int64_t c : {t / 4, t / 2, t})
      if (c >= 1 && (grid.empty() || c > grid.back())) grid.push_back(c);
    AlphaMethod m = zero ? AlphaMethod::zero_temp
                         : (steps.is_directed() ? AlphaMethod::directed_dp : AlphaMethod::value_iteration);
    alpha_hat = estimate_alpha(env, xi, grid, m).estimate;
  }
  CorrectorSolution sol = build_corrector_shrinking(env, h, j, zero);
  VariationalBound vb = variational_lower_bound(env, sol.cocycle, xi, alpha_hat, zero, 1.0 / j, 1e-12);
  json out{{"h", sol.h},
           {"j", j},
           {"temp", zero ? "zero" : "finite"},
           {"feasibility_slack", sol.feasibility_slack},
           {"hB_dot_xi", vb.hB_dot_xi},
           {"alpha_hat", vb.alpha_hat},
           {"margin", vb.margin},
           {"closure_error", sol.cocycle.closure_error},
           {"iterations", sol.iterations}};
  ctx.tolerances["corrector_closure"] = sol.cocycle.closure_error;
  std::ofstream(ctx.out(param<std::string>(p, "out", "corrector.json"))) << out.dump(2) << '\n';
}

void run_accept(Context& ctx) {
  const std::uint64_t seed = ctx.cfg.seed ? ctx.cfg.seed : acceptance::kDefaultSeed;
  ctx.seeds.push_back(seed);
  for (auto& a : acceptance::write_tables(ctx.dir.string(), seed)) ctx.artifacts.push_back(a);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("config: expected a JSON object");
  ExperimentConfig c;
  try {
    if (!j.contains("experiment")) throw SchemaError("experiment: required");
    c.experiment = j.at("experiment").get<std::string>();
    if (j.contains("steps")) c.steps = j.at("steps");
    if (j.contains("environment")) c.environment = j.at("environment");
    if (j.contains("params")) c.params = j.at("params");
    if (j.contains("replicas")) c.replicas = j.at("replicas").get<int>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  for (const auto& [key, _] : j.items())
    if (key != "experiment" && key != "steps" && key != "environment" && key != "params" && key != "replicas" &&
        key != "threads" && key != "seed" && key != "out_dir")
      throw SchemaError(key + ": unknown config field");
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) { return from_json(load_json(path, "config")); }

json ExperimentConfig::to_json() const {
  return json{{"experiment", experiment}, {"steps", steps},     {"environment", environment}, {"params", params},
              {"replicas", replicas},     {"threads", threads}, {"seed", seed},               {"out_dir", out_dir}};
}

StepSet ExperimentConfig::step_set() const {
  if (steps.is_null()) throw SchemaError("steps: required");
  return StepSet::from_json(resolve(steps, "steps"));
}

EnvironmentSpec ExperimentConfig::env_spec() const {
  if (environment.is_null()) throw SchemaError("environment: required");
  EnvironmentSpec s = EnvironmentSpec::from_json(resolve(environment, "environment"));
  if (seed != 0) s.seed = seed;
  return s;
}

void ExperimentConfig::validate() const {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
    throw SchemaError("experiment: unknown kind '" + experiment + "'");
  if (replicas < 1) throw SchemaError("replicas: must be at least 1");
  if (threads < 1) throw SchemaError("threads: must be at least 1");
  if (!params.is_object()) throw SchemaError("params: expected an object");
  std::optional<StepSet> st;
  if (!steps.is_null()) st = step_set();
  if (!environment.is_null()) {
    EnvironmentSpec s = env_spec();
    if (st) s.validate(*st);
  }
}

std::string ExperimentConfig::hash() const {
  // threads and out_dir never change results
  json j = to_json();
  j.erase("threads");
  j.erase("out_dir");
  return fnv1a(j.dump());
}

RunResult run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  kernels::set_threads(config.threads);
  Context ctx{config, fs::path(config.out_dir), {}, json::array(), json::object()};
  fs::create_directories(ctx.dir);
  try {
    if (config.experiment == "env") run_env(ctx);
    else if (config.experiment == "passage") run_passage(ctx);
    else if (config.experiment == "polymer") run_polymer(ctx);
    else if (config.experiment == "shape-scan") run_shape_scan(ctx);
    else if (config.experiment == "lyapunov") run_lyapunov(ctx);
    else if (config.experiment == "corrector") run_corrector(ctx);
    else run_accept(ctx);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw ExperimentError(config.experiment + ": " + e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunResult r;
  r.artifacts = ctx.artifacts;
  // artifact names relative to out_dir keep the manifest independent of where it was written
  json names = json::array();
  for (const auto& a : ctx.artifacts) names.push_back(fs::relative(a, ctx.dir).generic_string());
  r.manifest = json{{"experiment", config.experiment},
                    {"config_hash", config.hash()},
                    {"config", config.to_json()},
                    {"seeds", ctx.seeds},
                    {"tolerances", ctx.tolerances},
                    {"artifacts", names},
                    {"timing", "timing.json"}};
  // the thread count must not change any byte of the manifest
  r.manifest["config"].erase("threads");
  r.manifest["config"].erase("out_dir");
  std::ofstream(ctx.dir / "manifest.json") << r.manifest.dump(2) << '\n';
  std::ofstream(ctx.dir / "timing.json") << json{{"wall_seconds", wall}, {"threads", config.threads}}.dump(2) << '\n';
  return r;
}

}  // namespace rwrp
