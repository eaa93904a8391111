#include "rwrp/kernels.hpp"

#include <algorithm>
#include <omp.h>

namespace rwrp {

LevelPlan LevelPlan::build(const Box& box, const IntVec& direction) {
  const std::int64_t n = box.size();
  std::vector<std::int64_t> level(n);
  std::int64_t lo = 0, hi = 0;
  box.for_each([&](std::int64_t s, const IntVec& x) {
    std::int64_t l = 0;
    for (std::size_t i = 0; i < x.size(); ++i) l += direction[i] * x[i];
    level[s] = l;
    if (s == 0 || l < lo) lo = l;
    if (s == 0 || l > hi) hi = l;
  });
  LevelPlan p;
  p.min_level = lo;
  p.offsets.assign(hi - lo + 2, 0);
  for (std::int64_t s = 0; s < n; ++s) ++p.offsets[level[s] - lo + 1];
  for (std::size_t i = 1; i < p.offsets.size(); ++i) p.offsets[i] += p.offsets[i - 1];
  p.order.resize(n);
  std::vector<std::int64_t> fill(p.offsets.begin(), p.offsets.end() - 1);
  for (std::int64_t s = 0; s < n; ++s) p.order[fill[level[s] - lo]++] = s;
  return p;
}

namespace kernels {

void set_threads(int n) {
  if (n >= 1) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

namespace {

inline double combine(Semiring mode, double acc, double t) {
  switch (mode) {
    case Semiring::max_plus:
      return t > acc ? t : acc;
    case Semiring::min_plus:
      return t < acc ? t : acc;
    default:
      return acc;
  }
}

inline double level_site(const LevelDpArgs& a, const std::vector<double>& F, std::int64_t s) {
  const std::size_t K = a.grid->K;
  const std::int64_t* bwd = a.grid->bwd.data() + s * K;
  if (a.mode == Semiring::log_sum) {
    LogSum acc;
    for (std::size_t k = 0; k < K; ++k) {
      std::int64_t y = bwd[k];
      if (y >= 0 && F[y] != kNegInf) acc.add(F[y] + a.weights[y * K + k]);
    }
    return acc.value();
  }
  double acc = semiring_zero(a.mode);
  for (std::size_t k = 0; k < K; ++k) {
    std::int64_t y = bwd[k];
    if (y >= 0 && !std::isinf(F[y])) acc = combine(a.mode, acc, F[y] + a.weights[y * K + k]);
  }
  return acc;
}

inline double sweep_site(const SweepArgs& a, const std::vector<double>& in, std::int64_t v) {
  if (a.fixed && a.fixed[v]) return in[v];
  const std::size_t K = a.grid->K;
  const std::int64_t* fwd = a.grid->fwd.data() + v * K;
  const double* w = a.weights + v * K;
  if (a.mode == Semiring::log_sum) {
    LogSum acc;
    if (a.source) acc.add(a.source[v]);
    for (std::size_t k = 0; k < K; ++k) {
      std::int64_t y = fwd[k];
      if (y >= 0 && in[y] != kNegInf) acc.add(w[k] + in[y]);
    }
    return acc.value();
  }
  double acc = a.source ? a.source[v] : semiring_zero(a.mode);
  for (std::size_t k = 0; k < K; ++k) {
    std::int64_t y = fwd[k];
    if (y >= 0 && !std::isinf(in[y])) acc = combine(a.mode, acc, w[k] + in[y]);
  }
  return acc;
}

inline double polymer_site(const PolymerArgs& a, const std::vector<double>& prev, std::int64_t s, IntVec& x,
                           IntVec& y) {
  const int d = a.nbox->dim();
  const std::size_t K = a.steps->size() / d;
  const std::int64_t* z = a.steps->data();
  // decode s into x within nbox
  std::int64_t r = s;
  for (int i = d - 1; i >= 0; --i) {
    const std::int64_t e = a.nbox->hi[i] - a.nbox->lo[i] + 1;
    x[i] = a.nbox->lo[i] + r % e;
    r /= e;
  }
  LogSum lacc;
  double acc = semiring_zero(a.mode);
  for (std::size_t k = 0; k < K; ++k) {
    for (int i = 0; i < d; ++i) y[i] = x[i] - z[k * d + i];
    std::int64_t pi = a.pbox->index(y);
    if (pi < 0 || std::isinf(prev[pi])) continue;
    std::int64_t wi = a.wbox->index(y);
    if (wi < 0) {
      if (!a.wrap) continue;
      wi = a.wbox->index(a.wbox->wrap(y));
    }
    const double t = prev[pi] + a.weights[wi * K + k];
    if (a.mode == Semiring::log_sum) lacc.add(t);
    else acc = combine(a.mode, acc, t);
  }
  return a.mode == Semiring::log_sum ? lacc.value() : acc;
}

}  // namespace

namespace serial {

void level_dp(const LevelDpArgs& a, std::vector<double>& F) {
  const auto& p = *a.plan;
  for (std::size_t l = 0; l + 1 < p.offsets.size(); ++l)
    for (std::int64_t i = p.offsets[l]; i < p.offsets[l + 1]; ++i) {
      const std::int64_t s = p.order[i];
      if ((*a.frozen)[s]) continue;
      F[s] = level_site(a, F, s);
    }
}

double sweep(const SweepArgs& a, const std::vector<double>& in, std::vector<double>& out) {
  const std::int64_t n = a.grid->sites();
  double delta = 0;
  for (std::int64_t v = 0; v < n; ++v) {
    out[v] = sweep_site(a, in, v);
    delta = std::max(delta, log_change(in[v], out[v]));
  }
  return delta;
}

void polymer_step(const PolymerArgs& a, const std::vector<double>& prev, std::vector<double>& next) {
  const std::int64_t n = a.nbox->size();
  next.assign(n, semiring_zero(a.mode));
  IntVec x(a.nbox->dim()), y(a.nbox->dim());
  for (std::int64_t s = 0; s < n; ++s) next[s] = polymer_site(a, prev, s, x, y);
}

}  // namespace serial

namespace parallel {

void level_dp(const LevelDpArgs& a, std::vector<double>& F) {
  const auto& p = *a.plan;
  // sites within one level only read lower levels, so a level is a parallel
  // region with no cross-site writes
  for (std::size_t l = 0; l + 1 < p.offsets.size(); ++l) {
    const std::int64_t b = p.offsets[l], e = p.offsets[l + 1];
#pragma omp parallel for schedule(static) if (e - b > 256)
    for (std::int64_t i = b; i < e; ++i) {
      const std::int64_t s = p.order[i];
      if ((*a.frozen)[s]) continue;
      F[s] = level_site(a, F, s);
    }
  }
}

double sweep(const SweepArgs& a, const std::vector<double>& in, std::vector<double>& out) {
  const std::int64_t n = a.grid->sites();
  double delta = 0;
#pragma omp parallel for schedule(static) reduction(max : delta)
  for (std::int64_t v = 0; v < n; ++v) {
    out[v] = sweep_site(a, in, v);
    delta = std::max(delta, log_change(in[v], out[v]));
  }
  return delta;
}

void polymer_step(const PolymerArgs& a, const std::vector<double>& prev, std::vector<double>& next) {
  const std::int64_t n = a.nbox->size();
  next.assign(n, semiring_zero(a.mode));
#pragma omp parallel
  {
    IntVec x(a.nbox->dim()), y(a.nbox->dim());
#pragma omp for schedule(static)
    for (std::int64_t s = 0; s < n; ++s) next[s] = polymer_site(a, prev, s, x, y);
  }
}

}  // namespace parallel
}  // namespace kernels
}  // namespace rwrp
