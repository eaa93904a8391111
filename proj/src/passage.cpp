#include "rwrp/passage.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <functional>
#include <queue>

#include "rwrp/cone_geometry.hpp"
#include "rwrp/kernels.hpp"

namespace rwrp {

namespace {

bool in_semigroup(const StepSet& steps, const IntVec& x) {
  if (l1_norm(x) == 0) return true;
  try {
    decompose(steps, x);
    return true;
  } catch (const NotInCone&) {
    return false;
  } catch (const NotRepresentable&) {
    return false;
  }
}

std::int64_t require_site(const Box& box, const IntVec& x, const char* what) {
  if (static_cast<int>(x.size()) != box.dim()) throw DomainError(std::string(what) + " has the wrong dimension");
  std::int64_t idx = box.index(x);
  if (idx < 0) throw OutOfBox(std::string(what) + " " + format_vec(x) + " is outside the box " + box.str());
  return idx;
}

// log p(z) - V(v, z) over a box
std::vector<double> log_weights(const Environment& env, const Box& box) {
  std::vector<double> w = env.values_on(box);
  const std::size_t K = env.K();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = env.steps().log_p(i % K) - w[i];
  return w;
}

void check_targets(const PassageField& f, const StepSet& steps, const IntVec& origin,
                   const std::vector<IntVec>& targets, double unreachable) {
  for (const auto& y : targets) {
    double v = f.values[require_site(f.box, y, "target")];
    if (v != unreachable) continue;
    if (!in_semigroup(steps, sub(y, origin)))
      throw Unreachable("target " + format_vec(y) + " is not reachable from " + format_vec(origin));
    throw TruncationError("every path from " + format_vec(origin) + " to " + format_vec(y) + " leaves the box " +
                          f.box.str());
  }
}

PassageField level_dp_field(const Environment& env, const IntVec& origin, const Box& box, Semiring mode,
                            std::vector<double> weights) {
  const StepSet& steps = env.steps();
  const std::int64_t o = require_site(box, origin, "origin");
  Grid grid(box, steps);
  LevelPlan plan = LevelPlan::build(box, steps.direction());
  std::vector<double> F(box.size(), semiring_zero(mode));
  F[o] = 0;
  std::vector<char> frozen(box.size(), 0);
  frozen[o] = 1;
  kernels::parallel::level_dp({&plan, &grid, weights.data(), &frozen, mode}, F);
  PassageField f;
  f.anchor = Anchor::from_source;
  f.anchor_site = origin;
  f.box = box;
  f.values = std::move(F);
  return f;
}

struct SweepResult {
  std::vector<double> L;
  double delta = 0;
  std::int64_t iterations = 0;
  bool converged = false;
};

// Jacobi iteration of the backward sweep from L = -inf (fixed sites keep
// their initial values).
SweepResult iterate_sweep(const kernels::SweepArgs& args, std::vector<double> L, const SolveOptions& opt) {
  std::vector<double> next(L.size());
  SweepResult r;
  for (r.iterations = 1; r.iterations <= opt.max_iter; ++r.iterations) {
    r.delta = kernels::parallel::sweep(args, L, next);
    L.swap(next);
    if (r.delta < opt.tol) {
      r.converged = true;
      break;
    }
  }
  if (!r.converged) r.iterations = opt.max_iter;
  r.L = std::move(L);
  return r;
}

}  // namespace

double PassageField::value_at(const IntVec& y) const { return values[require_site(box, y, "site")]; }

PassageField a_directed(const Environment& env, const IntVec& origin, const std::vector<IntVec>& targets,
                        const std::optional<Box>& box_opt) {
  const StepSet& steps = env.steps();
  if (!steps.is_directed()) throw Unsupported("a_directed needs a strictly directed step set");
  const Box box = box_opt.value_or(env.box());
  PassageField f = level_dp_field(env, origin, box, Semiring::log_sum, log_weights(env, box));
  for (auto& v : f.values) v = v == kNegInf ? kPosInf : -v;
  f.values[box.index(origin)] = 0.0;
  f.kind = PassageKind::finite_temperature;
  check_targets(f, steps, origin, targets, kPosInf);
  return f;
}

PassageField a_general(const Environment& env, const IntVec& origin, const IntVec& target, const Box& box,
                       const SolveOptions& opt) {
  const StepSet& steps = env.steps();
  require_site(box, origin, "origin");
  const std::int64_t t = require_site(box, target, "target");
  std::vector<double> V = env.values_on(box);
  const std::size_t K = steps.size();
  Face zf = zero_face(steps);
  for (std::int64_t s = 0; s < box.size(); ++s)
    for (int k : zf.generators)
      if (V[s * K + k] < 0)
        throw AssumptionViolation("negative potential on zero-face step " + format_vec(steps.step(k)) + " at " +
                                  format_vec(box.point(s)));
  std::vector<double> w(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) w[i] = steps.log_p(i % K) - V[i];
  Grid grid(box, steps);
  std::vector<char> fixed(box.size(), 0);
  fixed[t] = 1;
  std::vector<double> L(box.size(), kNegInf);
  L[t] = 0;
  auto r = iterate_sweep({&grid, w.data(), nullptr, fixed.data(), Semiring::log_sum}, std::move(L), opt);
  if (!r.converged)
    throw IterationLimit("value iteration did not reach tol " + std::to_string(opt.tol) + " within " +
                         std::to_string(opt.max_iter) + " sweeps");
  PassageField f;
  f.kind = PassageKind::finite_temperature;
  f.anchor = Anchor::to_sink;
  f.anchor_site = target;
  f.box = box;
  f.values.resize(r.L.size());
  for (std::size_t i = 0; i < r.L.size(); ++i) f.values[i] = r.L[i] == kNegInf ? kPosInf : -r.L[i];
  f.values[t] = 0.0;
  f.tolerance_achieved = r.delta;
  f.iterations = r.iterations;
  return f;
}

PassageField a_general_auto(const Environment& env, const IntVec& origin, const IntVec& target,
                            const SolveOptions& opt, double box_tol) {
  const Box core = Box::bounding({origin, target});
  const Box& ebox = env.box();
  auto clamp = [&](Box b) {
    if (env.policy() == BoundaryPolicy::reject)
      for (int i = 0; i < b.dim(); ++i) {
        b.lo[i] = std::max(b.lo[i], ebox.lo[i]);
        b.hi[i] = std::min(b.hi[i], ebox.hi[i]);
      }
    return b;
  };
  std::int64_t margin = 4;
  Box box = clamp(core.grown(margin));
  PassageField f = a_general(env, origin, target, box, opt);
  double prev = f.value_at(origin);
  for (;;) {
    margin *= 2;
    Box next = clamp(core.grown(margin));
    if (next == box) break;
    box = next;
    f = a_general(env, origin, target, box, opt);
    double cur = f.value_at(origin);
    double change = std::fabs(cur - prev);
    if (std::isinf(cur) && std::isinf(prev)) change = 0;
    prev = cur;
    if (change < box_tol) break;
  }
  return f;
}

PassageField a_infty(const Environment& env, const IntVec& origin, const std::vector<IntVec>& targets,
                     const std::optional<Box>& box_opt, bool last_passage) {
  const StepSet& steps = env.steps();
  const Box box = box_opt.value_or(env.box());
  std::vector<double> V = env.values_on(box);
  double vmin = kPosInf;
  for (double v : V) vmin = std::min(vmin, v);
  PassageField f;
  if (last_passage) {
    if (!steps.is_directed()) throw Unsupported("last-passage values need a directed step set");
    f = level_dp_field(env, origin, box, Semiring::max_plus, std::move(V));
    f.kind = PassageKind::last_passage;
    for (auto& v : f.values)
      if (v == kNegInf) v = kPosInf;  // unreachable marker shared with the other kinds
  } else if (steps.is_directed()) {
    f = level_dp_field(env, origin, box, Semiring::min_plus, std::move(V));
    f.kind = PassageKind::zero_temperature;
  } else if (vmin >= 0) {
    const std::int64_t o = require_site(box, origin, "origin");
    Grid grid(box, steps);
    const std::size_t K = steps.size();
    std::vector<double> dist(box.size(), kPosInf);
    std::vector<char> done(box.size(), 0);
    using Item = std::pair<double, std::int64_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[o] = 0;
    pq.push({0.0, o});
    while (!pq.empty()) {
      auto [d, s] = pq.top();
      pq.pop();
      if (done[s]) continue;
      done[s] = 1;
      for (std::size_t k = 0; k < K; ++k) {
        std::int64_t y = grid.fwd[s * K + k];
        if (y < 0 || done[y]) continue;
        double nd = d + V[s * K + k];
        if (nd < dist[y]) {
          dist[y] = nd;
          pq.push({nd, y});
        }
      }
    }
    f.anchor = Anchor::from_source;
    f.anchor_site = origin;
    f.box = box;
    f.values = std::move(dist);
    f.kind = PassageKind::zero_temperature;
  } else {
    throw Unsupported("negative potentials with undirected steps have no well-defined minimal passage value");
  }
  f.values[box.index(origin)] = 0.0;
  check_targets(f, steps, origin, targets, kPosInf);
  return f;
}

SpectralBounds kernel_spectral_bounds(const Grid& grid, const std::vector<double>& weights, double decide_at,
                                      std::int64_t max_iter) {
  // power iteration on I + K keeps the iterate strictly positive, so the
  // Collatz-Wielandt ratios bound the Perron root from both sides
  const std::int64_t n = grid.sites();
  const std::size_t K = grid.K;
  std::vector<double> x(n, 1.0), y(n);
  SpectralBounds b;
  for (b.iterations = 1; b.iterations <= max_iter; ++b.iterations) {
    double lo = kPosInf, hi = 0, mx = 0;
    for (std::int64_t v = 0; v < n; ++v) {
      double acc = x[v];
      for (std::size_t k = 0; k < K; ++k) {
        std::int64_t t = grid.fwd[v * K + k];
        if (t >= 0) acc += std::exp(weights[v * K + k]) * x[t];
      }
      y[v] = acc;
      double r = acc / x[v];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      mx = std::max(mx, acc);
    }
    b.lower = lo - 1;
    b.upper = hi - 1;
    if (b.upper < decide_at || b.lower >= decide_at || b.upper - b.lower < 1e-12) break;
    for (std::int64_t v = 0; v < n; ++v) x[v] = y[v] / mx;
  }
  return b;
}

double max_row_sum(const Environment& env, const Box& box) {
  std::vector<double> w = log_weights(env, box);
  const std::size_t K = env.K();
  double m = 0;
  for (std::size_t s = 0; s * K < w.size(); ++s) {
    double r = 0;
    for (std::size_t k = 0; k < K; ++k) r += std::exp(w[s * K + k]);
    m = std::max(m, r);
  }
  return m;
}

PassageField green(const Environment& env, const IntVec& target, const Box& box, const SolveOptions& opt) {
  const StepSet& steps = env.steps();
  const std::int64_t t = require_site(box, target, "target");
  std::vector<double> w = log_weights(env, box);
  Grid grid(box, steps);
  if (max_row_sum(env, box) >= 1.0) {
    SpectralBounds b = kernel_spectral_bounds(grid, w);
    if (b.upper >= 1.0)
      throw DivergentSeries("spectral radius of the killed kernel is at least " + std::to_string(b.lower) +
                            " (upper bound " + std::to_string(b.upper) + ")");
  }
  std::vector<double> source(box.size(), kNegInf);
  source[t] = 0;
  std::vector<double> L(box.size(), kNegInf);
  auto r = iterate_sweep({&grid, w.data(), source.data(), nullptr, Semiring::log_sum}, std::move(L), opt);
  if (!r.converged) throw IterationLimit("green iteration did not converge");
  PassageField f;
  f.kind = PassageKind::green;
  f.anchor = Anchor::to_sink;
  f.anchor_site = target;
  f.box = box;
  f.values = std::move(r.L);
  f.tolerance_achieved = r.delta;
  f.iterations = r.iterations;
  return f;
}

namespace {

// g(y,y) for the potential-free walk killed at the box boundary, by a sparse
// direct solve of (I - K) u = delta_y.
double free_diagonal_green(const StepSet& steps, const Box& box, const IntVec& y) {
  Grid grid(box, steps);
  const std::int64_t n = box.size();
  const std::size_t K = steps.size();
  std::vector<Eigen::Triplet<double>> trip;
  for (std::int64_t v = 0; v < n; ++v) {
    trip.emplace_back(v, v, 1.0);
    for (std::size_t k = 0; k < K; ++k) {
      std::int64_t t = grid.fwd[v * K + k];
      if (t >= 0) trip.emplace_back(v, t, -steps.p(k));
    }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw DivergentSeries("free walk on the box is not transient");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::int64_t yi = box.index(y);
  rhs[yi] = 1.0;
  Eigen::VectorXd u = lu.solve(rhs);
  return u[yi];
}

}  // namespace

GreenIdentity check_green_identity(const Environment& env, const IntVec& x, const IntVec& y, const Box& box,
                                   const SolveOptions& opt) {
  GreenIdentity r;
  const StepSet& steps = env.steps();
  r.a_xy = steps.is_directed() ? a_directed(env, x, {y}, box).value_at(y) : a_general(env, x, y, box, opt).value_at(x);
  PassageField g = green(env, y, box, opt);
  r.log_g_xy = g.value_at(x);
  r.log_g_yy = g.value_at(y);
  r.residual = std::fabs(r.a_xy + r.log_g_xy - r.log_g_yy);
  const double g_yy = std::exp(r.log_g_yy);
  r.diagonal_ok = g_yy >= 1.0 - 1e-12;
  std::vector<double> V = env.values_on(box);
  bool nonneg = true;
  for (double v : V) nonneg = nonneg && v >= 0;
  if (nonneg) {
    r.g_yy_upper = steps.is_directed() ? 1.0 : free_diagonal_green(steps, box, y);
    r.diagonal_ok = r.diagonal_ok && g_yy <= r.g_yy_upper * (1 + 1e-10);
  } else {
    r.g_yy_upper = std::nan("");
  }
  return r;
}

BruteForceResult brute_force_a(const Environment& env, const IntVec& origin, const IntVec& target, int max_len,
                               const std::optional<Box>& box_opt) {
  if (max_len > kMaxBruteForceLength)
    throw BudgetExceeded("exhaustive enumeration is limited to " + std::to_string(kMaxBruteForceLength) + " steps");
  const Box box = box_opt.value_or(env.box());
  require_site(box, origin, "origin");
  require_site(box, target, "target");
  const StepSet& steps = env.steps();
  BruteForceResult r;
  const double kappa = max_row_sum(env, box);
  r.truncation_bound = kappa < 1 ? std::pow(kappa, max_len + 1) / (1 - kappa) : kPosInf;
  if (origin == target) return r;
  LogSum total;
  IntVec x = origin;
  std::function<void(int, double)> walk = [&](int depth, double logw) {
    for (std::size_t k = 0; k < steps.size(); ++k) {
      IntVec y = add(x, steps.step(k));
      if (!box.contains(y)) continue;
      double w = logw + steps.log_p(k) - env.potential(x, k);
      if (y == target) {
        total.add(w);
        ++r.paths;
        continue;
      }
      if (depth + 1 >= max_len) continue;
      IntVec saved = x;
      x = y;
      walk(depth + 1, w);
      x = saved;
    }
  };
  if (max_len > 0) walk(0, 0.0);
  r.a = r.paths == 0 ? kPosInf : -total.value();
  return r;
}

}  // namespace rwrp
