#include "rwrp/limit_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "rwrp/counter_rng.hpp"
#include "rwrp/logspace.hpp"

namespace rwrp {

namespace {

std::int64_t floor_rational(const Rational& r) {
  Integer q = boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r);
  if (r < 0 && Rational(q) != r) q -= 1;
  return q.convert_to<std::int64_t>();
}

// a(x, .) for every site of the environment box (directed / zero temperature).
PassageField field_from(const Environment& env, const IntVec& x, bool zero_temp) {
  return zero_temp ? a_infty(env, x, {}) : a_directed(env, x, {});
}

double passage_value(const Environment& env, const IntVec& x, const IntVec& y, bool zero_temp,
                     const SolveOptions& opt = {}) {
  if (zero_temp || env.steps().is_directed()) return field_from(env, x, zero_temp).value_at(y);
  return a_general(env, x, y, env.box(), opt).value_at(x);
}

// Random step sequence from x of length in [1, max_steps] staying inside the box.
std::optional<IntVec> random_walk_end(const Environment& env, const IntVec& x, int max_steps, CounterRng& rng) {
  const StepSet& steps = env.steps();
  for (int attempt = 0; attempt < 32; ++attempt) {
    int len = static_cast<int>(rng.between(1, max_steps));
    IntVec y = x;
    bool inside = true;
    for (int i = 0; i < len && inside; ++i) {
      y = add(y, steps.step(rng.below(steps.size())));
      inside = env.box().contains(y);
    }
    if (inside && y != x) return y;
  }
  return std::nullopt;
}

}  // namespace

AlphaMethod parse_alpha_method(const std::string& s) {
  if (s == "directed-dp") return AlphaMethod::directed_dp;
  if (s == "value-iteration") return AlphaMethod::value_iteration;
  if (s == "zero-temp") return AlphaMethod::zero_temp;
  throw SchemaError("method: expected directed-dp, value-iteration or zero-temp, got '" + s + "'");
}

std::string alpha_method_name(AlphaMethod m) {
  switch (m) {
    case AlphaMethod::directed_dp:
      return "directed-dp";
    case AlphaMethod::value_iteration:
      return "value-iteration";
    case AlphaMethod::zero_temp:
      return "zero-temp";
  }
  return "directed-dp";
}

IntVec xhat(const StepSet& steps, const ConeDecomposition& dec, const Rational& t) {
  IntVec x(steps.dim(), 0);
  for (std::size_t k = 0; k < steps.size(); ++k) x = add(x, scale(steps.step(k), floor_rational(t * dec.coefficients[k])));
  return x;
}

IntVec xhat(const StepSet& steps, const RatVec& xi, const Rational& t) {
  return xhat(steps, decompose(steps, xi), t);
}

LyapunovEstimate estimate_alpha(const Environment& env, const RatVec& xi, const std::vector<std::int64_t>& t_grid,
                                AlphaMethod method, const SolveOptions& opt) {
  const StepSet& steps = env.steps();
  if (t_grid.empty()) throw DomainError("t grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (t_grid[i] <= 0 || (i && t_grid[i] <= t_grid[i - 1])) throw DomainError("t grid must be positive and increasing");
  if (method == AlphaMethod::directed_dp && !steps.is_directed())
    throw Unsupported("directed-dp needs a directed step set");
  auto dec = decompose(steps, xi);
  LyapunovEstimate est;
  est.direction = xi;
  est.method = method;
  const IntVec origin(steps.dim(), 0);
  for (auto t : t_grid) {
    est.t.push_back(t);
    est.points.push_back(xhat(steps, dec, Rational(t)));
  }
  std::vector<double> a(t_grid.size());
  if (method == AlphaMethod::value_iteration) {
    for (std::size_t i = 0; i < a.size(); ++i)
      a[i] = a_general(env, origin, est.points[i], env.box(), opt).value_at(origin);
  } else {
    PassageField f = method == AlphaMethod::zero_temp ? a_infty(env, origin, est.points) : a_directed(env, origin, est.points);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = f.value_at(est.points[i]);
  }
  double run = kPosInf;
  for (std::size_t i = 0; i < a.size(); ++i) {
    est.values.push_back(a[i] / static_cast<double>(t_grid[i]));
    run = std::min(run, est.values.back());
    est.running_min.push_back(run);
  }
  est.estimate = run;
  // cost of a path using each step gamma_z times, with empirical means of V+
  const std::size_t K = steps.size();
  const auto& vals = env.values();
  RealVec vplus(K, 0.0);
  for (std::size_t i = 0; i < vals.size(); ++i) vplus[i % K] += std::max(vals[i], 0.0);
  const double sites = static_cast<double>(vals.size() / K);
  double worst = 0;
  for (std::size_t k = 0; k < K; ++k)
    worst = std::max(worst, vplus[k] / sites - (method == AlphaMethod::zero_temp ? 0.0 : steps.log_p(k)));
  est.upper_bound = dec.bound_constant.convert_to<double>() * worst * l1_norm(xi).convert_to<double>();
  return est;
}

double max_subadditivity_violation(const Environment& env, int triples, int max_steps, std::uint64_t seed,
                                   bool zero_temp) {
  const StepSet& steps = env.steps();
  const Box& box = env.box();
  CounterRng rng(seed);
  double worst = -kPosInf;
  int done = 0;
  for (int guard = 0; done < triples && guard < 100 * triples; ++guard) {
    IntVec x(steps.dim());
    for (int i = 0; i < steps.dim(); ++i) x[i] = rng.between(box.lo[i], box.hi[i]);
    auto y = random_walk_end(env, x, max_steps, rng);
    if (!y) continue;
    auto z = random_walk_end(env, *y, max_steps, rng);
    if (!z || *z == x) continue;
    double axy, ayz, axz;
    if (zero_temp || steps.is_directed()) {
      PassageField fx = field_from(env, x, zero_temp);
      PassageField fy = field_from(env, *y, zero_temp);
      axy = fx.value_at(*y);
      axz = fx.value_at(*z);
      ayz = fy.value_at(*z);
    } else {
      PassageField tz = a_general(env, x, *z, box);
      PassageField ty = a_general(env, x, *y, box);
      axz = tz.value_at(x);
      ayz = tz.value_at(*y);
      axy = ty.value_at(x);
    }
    if (std::isinf(axy) || std::isinf(ayz)) continue;
    worst = std::max(worst, axz - axy - ayz);
    ++done;
  }
  return worst;
}

HomogeneityReport check_homogeneity_subadditivity(const Environment& env, const std::vector<RatVec>& directions,
                                                  const std::vector<std::int64_t>& s_values, std::int64_t t,
                                                  int triples, int max_steps, std::uint64_t seed, bool zero_temp) {
  const StepSet& steps = env.steps();
  const IntVec origin(steps.dim(), 0);
  HomogeneityReport rep;
  std::optional<PassageField> field;
  if (zero_temp || steps.is_directed()) field = field_from(env, origin, zero_temp);
  auto value = [&](const IntVec& y) { return field ? field->value_at(y) : passage_value(env, origin, y, false); };
  for (const auto& xi : directions) {
    for (auto s : s_values) {
      RatVec sxi = xi;
      for (auto& c : sxi) c *= s;
      IntVec p1 = xhat(steps, sxi, Rational(t));
      IntVec p2 = xhat(steps, xi, Rational(s * t));
      if (p1 != p2) continue;
      ++rep.aligned;
      double lhs = value(p1) / static_cast<double>(t);
      double rhs = static_cast<double>(s) * (value(p2) / static_cast<double>(s * t));
      rep.homogeneity = std::max(rep.homogeneity, std::fabs(lhs - rhs));
    }
  }
  if (triples > 0) {
    rep.subadditivity = max_subadditivity_violation(env, triples, max_steps, seed, zero_temp);
    rep.triples = triples;
  }
  return rep;
}

ScanGeometry ScanGeometry::build(const Box& box, const ADeltaRegion& region, const std::vector<std::int64_t>& radii,
                                 std::int64_t band) {
  if (band < 1) throw DomainError("band must be positive");
  ScanGeometry g;
  g.box = box;
  g.radii = radii;
  g.band = band;
  g.sites.resize(radii.size());
  box.for_each([&](std::int64_t s, const IntVec& x) {
    const std::int64_t r = l1_norm(x);
    if (r == 0) return;
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (r >= radii[i] && r < radii[i] + band && region.contains(x)) g.sites[i].push_back(s);
  });
  return g;
}

std::vector<ShapeRow> shape_scan(const Environment& env, const ScanGeometry& geom, const AlphaFunction& alpha_hat,
                                 bool zero_temp) {
  const StepSet& steps = env.steps();
  if (!zero_temp && !steps.is_directed())
    throw Unsupported("finite-temperature shape scans need a directed step set");
  const IntVec origin(steps.dim(), 0);
  PassageField f = zero_temp ? a_infty(env, origin, {}, geom.box) : a_directed(env, origin, {}, geom.box);
  std::vector<ShapeRow> rows;
  for (std::size_t i = 0; i < geom.radii.size(); ++i) {
    ShapeRow row;
    row.radius = geom.radii[i];
    for (auto s : geom.sites[i]) {
      double a = f.values[s];
      if (std::isinf(a)) continue;
      IntVec x = geom.box.point(s);
      double err = std::fabs(a - alpha_hat(x)) / static_cast<double>(l1_norm(x));
      if (row.count == 0 || err > row.max_err) {
        row.max_err = err;
        row.argmax = x;
      }
      ++row.count;
    }
    if (row.count == 0) throw EmptyBand("no admissible A_delta sites with |x|_1 in [" + std::to_string(row.radius) + ", " +
                                        std::to_string(row.radius + geom.band) + ")");
    rows.push_back(row);
  }
  return rows;
}

std::vector<RatVec> fan_points(const StepSet& steps, const Face& face, int dirs, std::vector<Rational>* tau) {
  if (dirs < 1) throw DomainError("need at least one direction");
  const int d = steps.dim();
  const auto& gens = face.generators;
  std::vector<RatVec> out;
  if (gens.empty()) return out;
  if (gens.size() == 1) {
    RatVec p = to_rational(steps.step(gens[0]));
    if (tau) tau->push_back(0);
    out.push_back(p);
    return out;
  }
  if (gens.size() == 2 && rank_of({steps.step(gens[0]), steps.step(gens[1])}) == 2) {
    const int D = std::max(1, dirs - 1);
    for (int i = 0; i <= D && static_cast<int>(out.size()) < std::max(dirs, 2); ++i) {
      Rational t(i, D);
      RatVec p(d);
      for (int c = 0; c < d; ++c) p[c] = (1 - t) * steps.step(gens[0])[c] + t * steps.step(gens[1])[c];
      if (tau) tau->push_back(t);
      out.push_back(p);
    }
    return out;
  }
  // simplex grid over the generators, deduplicated after l1 normalisation
  const int m = static_cast<int>(gens.size());
  int D = 1;
  auto count = [&](int DD) {
    double c = 1;
    for (int i = 1; i < m; ++i) c = c * (DD + i) / i;
    return c;
  };
  while (count(D) < dirs) ++D;
  std::vector<int> comp(m, 0);
  std::set<RatVec> seen;
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == m - 1) {
      comp[i] = left;
      RatVec p(d, Rational(0));
      for (int g = 0; g < m; ++g)
        for (int c = 0; c < d; ++c) p[c] += Rational(comp[g], D) * steps.step(gens[g])[c];
      Rational n1 = l1_norm(p);
      if (n1 == 0) return;
      for (auto& c : p) c /= n1;
      if (seen.insert(p).second) out.push_back(p);
      return;
    }
    for (int c = left; c >= 0; --c) {
      comp[i] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, D);
  return out;
}

double DirectionFan::operator()(const IntVec& x) const {
  if (points.empty()) throw DomainError("empty direction fan");
  const auto& gens = face.generators;
  if (!tau.empty() && gens.size() == 2 && points.size() >= 2) {
    // x = l1 g1 + l2 g2; alpha(x) = (l1+l2) alpha((1-t) g1 + t g2)
    const IntVec& g1 = steps.step(gens[0]);
    const IntVec& g2 = steps.step(gens[1]);
    // least-squares 2x2 solve, exact for points of the face
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      a11 += double(g1[i]) * g1[i];
      a12 += double(g1[i]) * g2[i];
      a22 += double(g2[i]) * g2[i];
      b1 += double(g1[i]) * x[i];
      b2 += double(g2[i]) * x[i];
    }
    const double det = a11 * a22 - a12 * a12;
    const double l1 = (b1 * a22 - b2 * a12) / det;
    const double l2 = (a11 * b2 - a12 * b1) / det;
    const double mass = l1 + l2;
    if (mass <= 0) return 0.0;
    const double t = l2 / mass;
    const double D = static_cast<double>(points.size() - 1);
    double pos = std::clamp(t * D, 0.0, D);
    std::size_t i = static_cast<std::size_t>(std::floor(pos));
    if (i >= points.size() - 1) return mass * alpha.back();
    const double frac = pos - static_cast<double>(i);
    return mass * ((1 - frac) * alpha[i] + frac * alpha[i + 1]);
  }
  // nearest fan direction in l1
  const double n1 = static_cast<double>(l1_norm(x));
  if (n1 == 0) return 0.0;
  std::size_t best = 0;
  double bd = kPosInf;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double dd = 0;
    for (std::size_t c = 0; c < x.size(); ++c) dd += std::fabs(x[c] / n1 - points[i][c].convert_to<double>());
    if (dd < bd) {
      bd = dd;
      best = i;
    }
  }
  return n1 * alpha[best] / l1_norm(points[best]).convert_to<double>();
}

namespace {

DirectionFan fan_shell(const StepSet& steps, const Face& face, int dirs, std::int64_t T, std::vector<IntVec>& targets) {
  if (T < 1) throw DomainError("fan scale T must be positive");
  DirectionFan fan;
  fan.face = face;
  fan.steps = steps;
  fan.points = fan_points(steps, face, dirs, &fan.tau);
  if (fan.tau.size() != fan.points.size()) fan.tau.clear();
  targets.clear();
  for (const auto& p : fan.points) targets.push_back(xhat(steps, p, Rational(T)));
  fan.alpha.assign(fan.points.size(), 0.0);
  return fan;
}

void accumulate_fan(const Environment& env, const std::vector<IntVec>& targets, std::int64_t T, bool zero_temp,
                    RealVec& alpha) {
  const IntVec origin(env.steps().dim(), 0);
  PassageField f = zero_temp ? a_infty(env, origin, targets) : a_directed(env, origin, targets);
  for (std::size_t i = 0; i < targets.size(); ++i) alpha[i] += f.value_at(targets[i]) / static_cast<double>(T);
}

}  // namespace

DirectionFan fan_on(const Environment& env, const Face& face, int dirs, std::int64_t T, bool zero_temp) {
  const StepSet& steps = env.steps();
  if (!zero_temp && !steps.is_directed()) throw Unsupported("fan estimates at finite temperature need directed steps");
  std::vector<IntVec> targets;
  DirectionFan fan = fan_shell(steps, face, dirs, T, targets);
  accumulate_fan(env, targets, T, zero_temp, fan.alpha);
  return fan;
}

DirectionFan estimate_fan(const EnvironmentSpec& spec, const StepSet& steps, const Face& face, int dirs,
                          std::int64_t T, int replicas, std::uint64_t seed_base, bool zero_temp) {
  if (replicas < 1) throw DomainError("need at least one replica");
  if (!zero_temp && !steps.is_directed()) throw Unsupported("fan estimates at finite temperature need directed steps");
  std::vector<IntVec> targets;
  DirectionFan fan = fan_shell(steps, face, dirs, T, targets);
  std::vector<IntVec> all = targets;
  all.push_back(IntVec(steps.dim(), 0));
  const Box box = Box::bounding(all);
  for (int r = 0; r < replicas; ++r) {
    EnvironmentSpec s = spec;
    s.seed = mix64(seed_base + static_cast<std::uint64_t>(r));
    accumulate_fan(Environment::sample(s, steps, box), targets, T, zero_temp, fan.alpha);
  }
  for (auto& a : fan.alpha) a /= replicas;
  return fan;
}

double lower_bound_margin(const Environment& env, const PassageField& from_origin) {
  const StepSet& steps = env.steps();
  Separation sep = separating_vector(steps);
  Face zf = zero_face(steps);
  const std::size_t K = steps.size();
  double c = 0;
  const auto& vals = env.values();
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (!zf.contains_step(static_cast<int>(i % K))) c = std::min(c, vals[i]);
  double worst = kPosInf;
  const IntVec& o = from_origin.anchor_site;
  from_origin.box.for_each([&](std::int64_t s, const IntVec& x) {
    double a = from_origin.values[s];
    if (std::isinf(a)) return;
    double bound = -std::fabs(c) * dot(sep.u_real, sub(x, o)) / sep.delta_real;
    worst = std::min(worst, a - bound);
  });
  return worst;
}

double mixing_statistic(const Environment& env, std::size_t step, std::int64_t n, double eps) {
  if (n < 1) throw DomainError("n must be positive");
  const StepSet& steps = env.steps();
  const IntVec& z = steps.step(step);
  const std::int64_t len = static_cast<std::int64_t>(std::floor(eps * static_cast<double>(n)));
  double worst = 0;
  env.box().for_each([&](std::int64_t, const IntVec& x) {
    for (auto c : x)
      if (c < -n || c > n) return;
    double s = 0;
    IntVec y = x;
    for (std::int64_t k = 0; k <= len; ++k) {
      if (!env.box().contains(y) && env.policy() == BoundaryPolicy::reject) return;
      s += std::max(env.potential(y, step), 0.0);
      y = add(y, z);
    }
    worst = std::max(worst, s / static_cast<double>(n));
  });
  return worst;
}

}  // namespace rwrp
