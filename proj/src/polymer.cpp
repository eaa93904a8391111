#include "rwrp/polymer.hpp"

#include <algorithm>
#include <cmath>

#include "rwrp/cone_geometry.hpp"
#include "rwrp/counter_rng.hpp"
#include "rwrp/passage.hpp"

namespace rwrp {

Temperature parse_temperature(const std::string& s) {
  if (s == "finite") return Temperature::finite;
  if (s == "zero-max") return Temperature::zero_max;
  if (s == "zero-min") return Temperature::zero_min;
  throw SchemaError("temp: expected finite, zero-max or zero-min, got '" + s + "'");
}

std::string temperature_name(Temperature t) {
  switch (t) {
    case Temperature::finite:
      return "finite";
    case Temperature::zero_max:
      return "zero-max";
    case Temperature::zero_min:
      return "zero-min";
  }
  return "finite";
}

Semiring semiring_of(Temperature t) {
  switch (t) {
    case Temperature::zero_max:
      return Semiring::max_plus;
    case Temperature::zero_min:
      return Semiring::min_plus;
    default:
      return Semiring::log_sum;
  }
}

bool PolymerSlice::in_support(const IntVec& x) const {
  std::int64_t i = box.index(x);
  return i >= 0 && !std::isinf(values[i]);
}

double PolymerSlice::value_at(const IntVec& x) const {
  std::int64_t i = box.index(x);
  return i < 0 ? semiring_zero(semiring_of(temperature)) : values[i];
}

namespace {

Box level_box(const StepSet& steps, const IntVec& origin, int k) {
  const int d = steps.dim();
  IntVec lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    std::int64_t mn = steps.step(0)[i], mx = mn;
    for (const auto& z : steps.steps()) {
      mn = std::min(mn, z[i]);
      mx = std::max(mx, z[i]);
    }
    lo[i] = origin[i] + k * mn;
    hi[i] = origin[i] + k * mx;
  }
  return Box(lo, hi);
}

bool box_inside(const Box& inner, const Box& outer) {
  for (int i = 0; i < inner.dim(); ++i)
    if (inner.lo[i] < outer.lo[i] || inner.hi[i] > outer.hi[i]) return false;
  return true;
}

}  // namespace

std::vector<PolymerSlice> polymer_dp(const Environment& env, const IntVec& origin, int n, Temperature temp) {
  if (n < 0) throw DomainError("path length must be nonnegative");
  const StepSet& steps = env.steps();
  const Box& ebox = env.box();
  const bool wrap = env.policy() == BoundaryPolicy::periodic_wrap;
  if (!wrap && n > 0 && !box_inside(level_box(steps, origin, n - 1), ebox))
    throw OutOfBox("D_" + std::to_string(n - 1) + " around " + format_vec(origin) +
                   " is not covered by the environment box " + ebox.str());
  if (!wrap && !ebox.contains(origin)) throw OutOfBox("origin outside the environment box");
  const Semiring mode = semiring_of(temp);
  const std::size_t K = steps.size();
  std::vector<double> w = env.values();
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = temp == Temperature::finite ? steps.log_p(i % K) - w[i] : -w[i];
  std::vector<std::int64_t> flat;
  for (const auto& z : steps.steps()) flat.insert(flat.end(), z.begin(), z.end());

  std::vector<PolymerSlice> out;
  PolymerSlice s0;
  s0.n = 0;
  s0.temperature = temp;
  s0.origin = origin;
  s0.box = Box(origin, origin);
  s0.values = {0.0};
  out.push_back(std::move(s0));
  for (int k = 1; k <= n; ++k) {
    PolymerSlice s;
    s.n = k;
    s.temperature = temp;
    s.origin = origin;
    s.box = level_box(steps, origin, k);
    kernels::PolymerArgs args{&out.back().box, &s.box, &ebox, wrap, &flat, w.data(), mode};
    kernels::parallel::polymer_step(args, out.back().values, s.values);
    out.push_back(std::move(s));
  }
  return out;
}

double check_superadditivity(const Environment& env, int max_len, int trials, std::uint64_t seed,
                             Temperature temp) {
  if (max_len < 2) throw DomainError("superadditivity needs max_len >= 2");
  const StepSet& steps = env.steps();
  const Box& ebox = env.box();
  CounterRng rng(seed);
  // sample base points whose D_{max_len} neighbourhood stays in the box
  Box reach = level_box(steps, IntVec(steps.dim(), 0), max_len);
  IntVec lo(steps.dim()), hi(steps.dim());
  for (int i = 0; i < steps.dim(); ++i) {
    // every intermediate level lies between the origin and D_{max_len}
    lo[i] = ebox.lo[i] - std::min<std::int64_t>(0, reach.lo[i]);
    hi[i] = ebox.hi[i] - std::max<std::int64_t>(0, reach.hi[i]);
    if (hi[i] < lo[i]) throw OutOfBox("environment box too small for paths of length " + std::to_string(max_len));
  }
  double worst = -kPosInf;
  for (int t = 0; t < trials; ++t) {
    IntVec x(steps.dim());
    for (int i = 0; i < steps.dim(); ++i) x[i] = rng.between(lo[i], hi[i]);
    int total = static_cast<int>(rng.between(2, max_len));
    int m = static_cast<int>(rng.between(1, total - 1));
    int nn = total - m;
    auto from_x = polymer_dp(env, x, total, temp);
    // y - x in D_m and z - y in D_n chosen by random step sequences
    IntVec y = x;
    for (int i = 0; i < m; ++i) y = add(y, steps.step(rng.below(steps.size())));
    IntVec z = y;
    for (int i = 0; i < nn; ++i) z = add(z, steps.step(rng.below(steps.size())));
    auto from_y = polymer_dp(env, y, nn, temp);
    double lhs = from_x[m].value_at(y) + from_y[nn].value_at(z);
    double rhs = from_x[total].value_at(z);
    double v = temp == Temperature::zero_min ? rhs - lhs : lhs - rhs;
    worst = std::max(worst, v);
  }
  return worst;
}

double point_to_level(const PolymerSlice& slice, const RealVec& h) {
  if (slice.n == 0) throw DomainError("point-to-level needs n >= 1");
  const Semiring mode = semiring_of(slice.temperature);
  LogSum acc;
  double best = semiring_zero(mode);
  slice.box.for_each([&](std::int64_t s, const IntVec& x) {
    double g = slice.values[s];
    if (std::isinf(g)) return;
    double t = g + dot(h, sub(x, slice.origin));
    if (mode == Semiring::log_sum) acc.add(t);
    else if (mode == Semiring::max_plus) best = std::max(best, t);
    else best = std::min(best, t);
  });
  return (mode == Semiring::log_sum ? acc.value() : best) / slice.n;
}

double summed_point_to_level(const std::vector<PolymerSlice>& slices, int n, const RealVec& h) {
  if (n < 1 || static_cast<int>(slices.size()) < n) throw DomainError("summed point-to-level needs slices 0..n-1");
  const Semiring mode = semiring_of(slices[0].temperature);
  LogSum acc;
  double best = semiring_zero(mode);
  for (int k = 0; k < n; ++k) {
    const auto& sl = slices[k];
    sl.box.for_each([&](std::int64_t s, const IntVec& x) {
      double g = sl.values[s];
      if (std::isinf(g)) return;
      double t = g + dot(h, sub(x, sl.origin));
      if (mode == Semiring::log_sum) acc.add(t);
      else if (mode == Semiring::max_plus) best = std::max(best, t);
      else best = std::min(best, t);
    });
  }
  return (mode == Semiring::log_sum ? acc.value() : best) / n;
}

IntVec hull_point(const StepSet& steps, const RatVec& theta, int N) {
  const std::size_t K = steps.size();
  std::vector<std::int64_t> count(K);
  std::vector<Rational> frac(K);
  std::int64_t used = 0;
  for (std::size_t k = 0; k < K; ++k) {
    Rational v = theta[k] * N;
    Integer fl = boost::multiprecision::numerator(v) / boost::multiprecision::denominator(v);
    count[k] = fl.convert_to<std::int64_t>();
    frac[k] = v - Rational(fl);
    used += count[k];
  }
  std::vector<std::size_t> order(K);
  for (std::size_t k = 0; k < K; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; used < N; ++i, ++used) ++count[order[i % K]];
  IntVec x(steps.dim(), 0);
  for (std::size_t k = 0; k < K; ++k) x = add(x, scale(steps.step(k), count[k]));
  return x;
}

std::vector<RestrictedRow> restricted_vs_unrestricted(const Environment& env, const RatVec& xi,
                                                      const std::vector<Rational>& s_grid, int n) {
  const StepSet& steps = env.steps();
  if (!in_cone(steps, xi)) throw NotInCone(format_vec(xi) + " is not in the cone of the steps");
  std::vector<RestrictedRow> rows;
  const IntVec origin(steps.dim(), 0);
  for (const auto& s : s_grid) {
    if (s <= 0) throw DomainError("s must be positive");
    RatVec zeta = xi;
    for (auto& c : zeta) c /= s;
    auto theta = in_hull(steps, zeta);
    if (!theta) throw DomainError(format_vec(zeta) + " = xi/s is outside the convex hull of the steps");
    Rational Nr = s * n;
    Integer Ni = boost::multiprecision::numerator(Nr) / boost::multiprecision::denominator(Nr);
    if (Nr - Rational(Ni) >= Rational(1, 2)) Ni += 1;
    int N = Ni.convert_to<int>();
    if (N < 1) throw DomainError("path length n*s rounds to zero");
    RestrictedRow row;
    row.s = s;
    row.path_length = N;
    row.x = hull_point(steps, *theta, N);
    auto slices = polymer_dp(env, origin, N, Temperature::finite);
    row.restricted = slices[N].value_at(row.x) / n;
    double a = steps.is_directed() ? a_directed(env, origin, {row.x}).value_at(row.x)
                                   : a_general_auto(env, origin, row.x).value_at(origin);
    row.unrestricted = -a / n;
    row.margin = row.unrestricted - row.restricted;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rwrp
