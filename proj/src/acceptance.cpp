#include "rwrp/acceptance.hpp"

#include <cmath>
#include <filesystem>

#include "rwrp/cone_geometry.hpp"
#include "rwrp/corrector.hpp"
#include "rwrp/counter_rng.hpp"
#include "rwrp/experiment.hpp"
#include "rwrp/passage.hpp"
#include "rwrp/polymer.hpp"

namespace rwrp::acceptance {

namespace {

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return mix64(mix64(seed ^ tag) + index);
}

const RatVec& diagonal() {
  static const RatVec xi{Rational(1, 2), Rational(1, 2)};
  return xi;
}

std::string fmt(double x) { return format_real(x); }

}  // namespace

EnvironmentSpec uniform_spec(std::uint64_t seed, double a, double b) {
  Distribution d;
  d.kind = DistKind::uniform;
  d.a = a;
  d.b = b;
  return EnvironmentSpec::iid(d, seed, true);
}

StepSet directed_pair() { return StepSet::unit_directed(2); }

StepSet directed_triple() { return StepSet({{1, 0}, {0, 1}, {1, 1}}); }

Environment brute_force_env(std::uint64_t seed, int r) {
  StepSet steps = r % 2 ? directed_triple() : directed_pair();
  return Environment::sample(uniform_spec(derive(seed, 0xb7, r)), steps, Box::cube(2, 0, kBruteForceLength));
}

Environment green_env(bool directed, std::uint64_t seed) {
  if (directed) return Environment::sample(uniform_spec(derive(seed, 0x96, 0)), directed_pair(), Box::cube(2, 0, 29));
  return Environment::sample(uniform_spec(derive(seed, 0x96, 1)), StepSet::simple_random_walk(1), Box::cube(1, 0, 29));
}

std::vector<IntVec> random_targets(const Box& box, int count, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<IntVec> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    IntVec x(box.dim());
    for (int c = 0; c < box.dim(); ++c) x[c] = rng.between(box.lo[c], box.hi[c]);
    out.push_back(x);
  }
  return out;
}

Environment variational_env(std::uint64_t seed, int replica) {
  return Environment::sample(uniform_spec(derive(seed, 0x7a, replica)), directed_pair(), Box::cube(2, 0, 63));
}

std::vector<CorrectorRow> corrector_rows(std::uint64_t seed, int replicas) {
  std::vector<CorrectorRow> rows;
  const StepSet steps = directed_pair();
  const Face face = whole_cone(steps);
  for (int r = 0; r < replicas; ++r) {
    Environment env = variational_env(seed, r);
    DirectionFan fan = fan_on(env, face, 17, 63);
    RealVec h = select_tilt(fan, diagonal());
    const double alpha_hat = fan(IntVec{1, 1}) / 2.0;
    for (int j : {4, 16}) {
      CorrectorSolution sol = build_corrector_shrinking(env, h, j, false);
      CorrectorRow row;
      row.replica = r;
      row.j = j;
      row.h = sol.h;
      row.slack = sol.feasibility_slack;
      row.closure = sol.cocycle.closure_error;
      row.hB_dot_xi = sol.cocycle.h_dot(steps, diagonal());
      row.alpha_hat = alpha_hat;
      double margin = kPosInf;
      const Cocycle& B = sol.cocycle;
      B.cells.for_each([&](std::int64_t c, const IntVec& x) {
        if (!B.interior[c]) return;
        for (std::size_t k = 0; k < steps.size(); ++k)
          margin = std::min(margin, B.at(c, k) - (steps.log_p(k) - env.potential(x, k) - 1.0 / j));
      });
      row.min_increment_margin = margin;
      rows.push_back(row);
    }
  }
  return rows;
}

PropertyMaxima property_maxima(std::uint64_t seed) {
  Environment env = Environment::sample(uniform_spec(derive(seed, 0x5a, 0)), directed_pair(), Box::cube(2, 0, 31));
  PropertyMaxima m;
  m.subadditivity = max_subadditivity_violation(env, kPropertyTrials, 20, derive(seed, 0x5a, 1));
  m.superadditivity_finite = check_superadditivity(env, 20, kPropertyTrials, derive(seed, 0x5a, 2), Temperature::finite);
  m.superadditivity_zero_max =
      check_superadditivity(env, 20, kPropertyTrials, derive(seed, 0x5a, 3), Temperature::zero_max);
  m.superadditivity_zero_min =
      check_superadditivity(env, 20, kPropertyTrials, derive(seed, 0x5a, 4), Temperature::zero_min);
  return m;
}

const std::vector<std::int64_t>& scan_radii() {
  static const std::vector<std::int64_t> r{64, 128, 256};
  return r;
}

Box scan_box(std::int64_t max_radius, std::int64_t band) { return Box::cube(2, 0, max_radius + band); }

ScanGeometry scan_geometry() {
  const StepSet steps = directed_pair();
  ADeltaRegion region(steps, whole_cone(steps), kScanDelta);
  return ScanGeometry::build(scan_box(scan_radii().back(), kScanBand), region, scan_radii(), kScanBand);
}

std::vector<ShapeRow> constant_scan(const AlphaFunction& alpha) {
  Environment env = Environment::constant(directed_pair(), scan_box(scan_radii().back(), kScanBand), 1.0);
  return shape_scan(env, scan_geometry(), alpha);
}

DirectionFan random_scan_fan(std::uint64_t seed) {
  const StepSet steps = directed_pair();
  return estimate_fan(uniform_spec(0), steps, whole_cone(steps), kFanDirections, kFanScale, kFanReplicas,
                      derive(seed, 0xfa, 0));
}

std::vector<std::vector<ShapeRow>> random_scans(std::uint64_t seed, const DirectionFan& fan) {
  const ScanGeometry geom = scan_geometry();
  std::vector<std::vector<ShapeRow>> out;
  for (int s = 0; s < kScanSeeds; ++s) {
    Environment env = Environment::sample(uniform_spec(derive(seed, 0x5c, s)), directed_pair(), geom.box);
    out.push_back(shape_scan(env, geom, fan));
  }
  return out;
}

std::vector<std::string> write_tables(const std::string& dir, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  auto path = [&](const std::string& name) {
    paths.push_back((std::filesystem::path(dir) / name).string());
    return paths.back();
  };
  const StepSet pair = directed_pair();
  const IntVec o2{0, 0};

  {  // 1: diagonal rate on the constant directed lattice
    CsvWriter csv(path("c01_directed_diagonal.csv"), {"n", "a", "a_over_2n"});
    for (int n : {64, 128, 256}) {
      Environment env = Environment::constant(pair, Box::cube(2, 0, n), 1.0);
      double a = a_directed(env, o2, {{n, n}}).value_at({n, n});
      csv.row({std::to_string(n), fmt(a), fmt(a / (2.0 * n))});
    }
  }
  {  // 2: d=1 simple random walk
    CsvWriter csv(path("c02_srw_first_hit.csv"), {"a", "tol_achieved", "iterations"});
    Environment env = Environment::constant(StepSet::simple_random_walk(1), Box::parse("-200:201"), 1.0);
    PassageField f = a_general(env, {0}, {1}, env.box());
    csv.row({fmt(f.value_at({0})), fmt(f.tolerance_achieved), std::to_string(f.iterations)});
  }
  {  // 3: exhaustive enumeration against the DP values
    CsvWriter a_csv(path("c03_passage_vs_enumeration.csv"), {"env", "site", "a_directed", "a_enumerated"});
    CsvWriter g_csv(path("c03_polymer.csv"), {"env", "n", "site", "finite", "zero_max", "zero_min"});
    for (int r = 0; r < kBruteForceEnvs; ++r) {
      Environment env = brute_force_env(seed, r);
      PassageField f = a_directed(env, o2, {});
      env.box().for_each([&](std::int64_t s, const IntVec& x) {
        if (l1_norm(x) == 0 || l1_norm(x) > kBruteForceLength || std::isinf(f.values[s])) return;
        BruteForceResult b = brute_force_a(env, o2, x, kBruteForceLength);
        a_csv.row({std::to_string(r), format_vec(x), fmt(f.values[s]), fmt(b.a)});
      });
      auto fin = polymer_dp(env, o2, kBruteForceLength, Temperature::finite);
      auto zmax = polymer_dp(env, o2, kBruteForceLength, Temperature::zero_max);
      auto zmin = polymer_dp(env, o2, kBruteForceLength, Temperature::zero_min);
      for (int n = 1; n <= kBruteForceLength; ++n)
        fin[n].box.for_each([&](std::int64_t, const IntVec& x) {
          if (!fin[n].in_support(x)) return;
          g_csv.row({std::to_string(r), std::to_string(n), format_vec(x), fmt(fin[n].value_at(x)),
                     fmt(zmax[n].value_at(x)), fmt(zmin[n].value_at(x))});
        });
    }
  }
  {  // 4: Green identity
    CsvWriter csv(path("c04_green_identity.csv"),
                  {"instance", "site", "a", "log_g_0x", "log_g_xx", "residual", "g_xx_free"});
    for (bool directed : {true, false}) {
      Environment env = green_env(directed, seed);
      const IntVec o(env.steps().dim(), 0);
      std::vector<IntVec> targets = random_targets(env.box(), 10, derive(seed, 0x94, directed));
      for (const auto& y : targets) {
        if (y == o) continue;
        GreenIdentity gi = check_green_identity(env, o, y, env.box());
        csv.row({directed ? "directed" : "srw1", format_vec(y), fmt(gi.a_xy), fmt(gi.log_g_xy), fmt(gi.log_g_yy),
                 fmt(gi.residual), fmt(gi.g_yy_upper)});
      }
    }
  }
  {  // 5: first passage with constant weight
    CsvWriter csv(path("c05_fpp.csv"), {"steps", "site", "a_inf"});
    for (bool directed : {true, false}) {
      StepSet steps = directed ? pair : StepSet::simple_random_walk(2);
      Box box = directed ? Box::cube(2, 0, 100) : Box::cube(2, -100, 100);
      Environment env = Environment::constant(steps, box, 0.75);
      std::vector<IntVec> targets = random_targets(box, 10000, derive(seed, 0xf5, directed));
      PassageField f = a_infty(env, o2, targets);
      for (const auto& y : targets) csv.row({directed ? "e1,e2" : "+-e1,+-e2", format_vec(y), fmt(f.value_at(y))});
    }
  }
  {  // 6: zero-temperature limit
    CsvWriter csv(path("c06_zero_temperature.csv"), {"beta", "site", "a_beta_over_beta", "a_inf", "gap"});
    const IntVec corner{15, 15};
    Environment cold = Environment::constant(pair, Box::cube(2, 0, 15), 64.0);
    Environment base = Environment::constant(pair, Box::cube(2, 0, 15), 1.0);
    double ab = a_directed(cold, o2, {corner}).value_at(corner) / 64.0;
    double ai = a_infty(base, o2, {corner}).value_at(corner);
    csv.row({"64", format_vec(corner), fmt(ab), fmt(ai), fmt(std::fabs(ab - ai))});
  }
  {  // 7: variational formula
    CsvWriter det(path("c07_deterministic_optimum.csv"), {"instance", "h", "value", "constraint"});
    DeterministicOptimum a = optimize_deterministic_corrector(pair, {1.0, 1.0}, diagonal());
    det.row({"directed", format_vec(a.h), fmt(a.value), fmt(a.constraint)});
    DeterministicOptimum b = optimize_deterministic_corrector(StepSet::simple_random_walk(1), {1.0, 1.0}, {Rational(1)});
    det.row({"srw1", format_vec(b.h), fmt(b.value), fmt(b.constraint)});
    CsvWriter csv(path("c07_corrector_bounds.csv"),
                  {"replica", "j", "h", "slack", "closure", "hB_dot_xi", "alpha_hat", "min_increment_margin"});
    for (const auto& r : corrector_rows(seed))
      csv.row({std::to_string(r.replica), std::to_string(r.j), format_vec(r.h), fmt(r.slack), fmt(r.closure),
               fmt(r.hB_dot_xi), fmt(r.alpha_hat), fmt(r.min_increment_margin)});
  }
  {  // 8: property suites
    CsvWriter csv(path("c08_properties.csv"), {"suite", "trials", "max_violation"});
    PropertyMaxima m = property_maxima(seed);
    const std::string n = std::to_string(kPropertyTrials);
    csv.row({"subadditivity", n, fmt(m.subadditivity)});
    csv.row({"superadditivity-finite", n, fmt(m.superadditivity_finite)});
    csv.row({"superadditivity-zero-max", n, fmt(m.superadditivity_zero_max)});
    csv.row({"superadditivity-zero-min", n, fmt(m.superadditivity_zero_min)});
  }
  {  // 9: shape scans
    CsvWriter csv(path("c09_shape_scan.csv"), {"kind", "seed", "radius", "max_abs_err_over_r", "argmax", "sites"});
    auto optimum = [&](const IntVec& x) { return optimize_deterministic_corrector(pair, {1.0, 1.0}, to_rational(x)).value; };
    for (const auto& row : constant_scan(optimum))
      csv.row({"constant", "0", std::to_string(row.radius), fmt(row.max_err), format_vec(row.argmax),
               std::to_string(row.count)});
    DirectionFan fan = random_scan_fan(seed);
    auto scans = random_scans(seed, fan);
    for (std::size_t s = 0; s < scans.size(); ++s)
      for (const auto& row : scans[s])
        csv.row({"uniform", std::to_string(s), std::to_string(row.radius), fmt(row.max_err), format_vec(row.argmax),
                 std::to_string(row.count)});
  }
  {  // 10: point-to-level duality on a constant potential
    CsvWriter csv(path("c10_duality.csv"), {"h", "lambda_pl_n", "max_term", "log_Dn_over_n", "summed"});
    const int n = 256;
    Environment env = Environment::constant(pair, Box::cube(2, 0, n), 1.0);
    auto slices = polymer_dp(env, o2, n, Temperature::finite);
    std::int64_t support = 0;
    slices[n].box.for_each([&](std::int64_t, const IntVec& x) { support += slices[n].in_support(x); });
    for (const RealVec& h : std::vector<RealVec>{{0, 0}, {1, 1}, {2, 0.5}, {-1, 3}, {0.5, 0.25}}) {
      double best = kNegInf;
      slices[n].box.for_each([&](std::int64_t, const IntVec& x) {
        if (slices[n].in_support(x)) best = std::max(best, (slices[n].value_at(x) + dot(h, x)) / n);
      });
      csv.row({format_vec(h), fmt(point_to_level(slices[n], h)), fmt(best), fmt(std::log(double(support)) / n),
               fmt(summed_point_to_level(slices, n, h))});
    }
  }
  return paths;
}

}  // namespace rwrp::acceptance
