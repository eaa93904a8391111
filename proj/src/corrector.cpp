#include "rwrp/corrector.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwrp/cone_geometry.hpp"
#include "rwrp/kernels.hpp"
#include "rwrp/logspace.hpp"
#include "rwrp/lp.hpp"

namespace rwrp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double tilt(const RealVec& h, const IntVec& z) {
  if (h.size() != z.size()) throw DomainError("tilt has dimension " + std::to_string(h.size()) + ", steps have " +
                                              std::to_string(z.size()));
  return dot(h, z);
}

// V(c, z_k) on the corrector cells, cells x K.
std::vector<double> cell_potential(const Environment& env, const Box& cells, bool periodic) {
  const std::size_t K = env.K();
  std::vector<double> v(cells.size() * K);
  cells.for_each([&](std::int64_t s, const IntVec& x) {
    for (std::size_t k = 0; k < K; ++k) v[s * K + k] = periodic ? env.evaluate(x, k) : env.potential(x, k);
  });
  return v;
}

std::vector<char> interior_cells(const Grid& grid) {
  const std::int64_t n = grid.sites();
  std::vector<char> in(n, 1);
  for (std::int64_t c = 0; c < n; ++c)
    for (std::size_t k = 0; k < grid.K; ++k)
      if (grid.fwd[c * grid.K + k] < 0) in[c] = 0;
  return in;
}

double closure_defect(const Grid& grid, const std::vector<double>& B, const std::vector<char>& interior) {
  const std::size_t K = grid.K;
  double worst = 0;
  for (std::int64_t c = 0; c < grid.sites(); ++c) {
    if (!interior[c]) continue;
    for (std::size_t k1 = 0; k1 < K; ++k1)
      for (std::size_t k2 = k1 + 1; k2 < K; ++k2) {
        std::int64_t c1 = grid.fwd[c * K + k1], c2 = grid.fwd[c * K + k2];
        if (grid.fwd[c1 * K + k2] < 0 || grid.fwd[c2 * K + k1] < 0) continue;
        double lhs = B[c * K + k1] + B[c1 * K + k2];
        double rhs = B[c * K + k2] + B[c2 * K + k1];
        worst = std::max(worst, std::fabs(lhs - rhs));
      }
  }
  return worst;
}

void finish_cocycle(const Grid& grid, Cocycle& B) {
  B.interior = interior_cells(grid);
  B.closure_error = closure_defect(grid, B.increments, B.interior);
}

// Per-cell slack, reduced serially so the result does not depend on threads.
double feasibility(const Environment& env, const Cocycle& B, bool zero_temp, double shift) {
  const StepSet& steps = env.steps();
  const std::size_t K = steps.size();
  std::vector<double> V = cell_potential(env, B.cells, B.periodic);
  const std::int64_t n = B.cells.size();
  std::vector<double> per(n, kNegInf);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < n; ++c) {
    if (!B.interior[c]) continue;
    if (zero_temp) {
      double m = kPosInf;
      for (std::size_t k = 0; k < K; ++k) m = std::min(m, V[c * K + k] + shift + B.increments[c * K + k]);
      per[c] = -m;
    } else {
      LogSum acc;
      for (std::size_t k = 0; k < K; ++k) acc.add(steps.log_p(k) - V[c * K + k] - shift - B.increments[c * K + k]);
      per[c] = std::exp(acc.value()) - 1.0;
    }
  }
  double worst = kNegInf;
  for (double s : per) worst = std::max(worst, s);
  return worst;
}

}  // namespace

double Cocycle::h_dot(const StepSet& steps, const RatVec& xi) const {
  ConeDecomposition dec = decompose(steps, xi);
  const std::size_t Kz = K();
  double s = 0;
  for (std::size_t k = 0; k < Kz; ++k) {
    if (dec.coefficients[k] == 0) continue;
    double sum = 0;
    std::int64_t count = 0;
    for (std::int64_t c = 0; c < cells.size(); ++c) {
      if (!interior[c]) continue;
      sum += increments[c * Kz + k];
      ++count;
    }
    if (count == 0) throw DomainError("cocycle has no interior cells");
    s -= dec.coefficients[k].convert_to<double>() * sum / static_cast<double>(count);
  }
  return s;
}

Box corrector_cells(const Environment& env, bool* periodic) {
  const int d = env.steps().dim();
  const auto& spec = env.spec();
  bool per = spec.kind == EnvKind::periodic || spec.kind == EnvKind::constant;
  if (periodic) *periodic = per;
  if (spec.kind == EnvKind::constant) return Box::cube(d, 0, 0);
  if (spec.kind == EnvKind::periodic) {
    Box b = Box::cube(d, 0, 0);
    for (int i = 0; i < d; ++i) b.hi[i] = spec.period[i] - 1;
    return b;
  }
  return env.box();
}

Cocycle deterministic_cocycle(const Environment& env, const RealVec& h) {
  Cocycle B;
  B.cells = corrector_cells(env, &B.periodic);
  B.h = h;
  const StepSet& steps = env.steps();
  const std::size_t K = steps.size();
  Grid grid(B.cells, steps, B.periodic);
  B.increments.assign(B.cells.size() * K, kNaN);
  for (std::int64_t c = 0; c < B.cells.size(); ++c)
    for (std::size_t k = 0; k < K; ++k)
      if (grid.fwd[c * K + k] >= 0) B.increments[c * K + k] = -tilt(h, steps.step(k));
  finish_cocycle(grid, B);
  return B;
}

Cocycle cocycle_from_corrector(const Environment& env, const std::vector<double>& g, const RealVec& h) {
  Cocycle B;
  B.cells = corrector_cells(env, &B.periodic);
  B.h = h;
  const StepSet& steps = env.steps();
  const std::size_t K = steps.size();
  if (static_cast<std::int64_t>(g.size()) != B.cells.size())
    throw DomainError("corrector has " + std::to_string(g.size()) + " cells, expected " +
                      std::to_string(B.cells.size()));
  Grid grid(B.cells, steps, B.periodic);
  B.increments.assign(B.cells.size() * K, kNaN);
  for (std::int64_t c = 0; c < B.cells.size(); ++c)
    for (std::size_t k = 0; k < K; ++k) {
      std::int64_t t = grid.fwd[c * K + k];
      if (t >= 0) B.increments[c * K + k] = g[c] - g[t] - tilt(h, steps.step(k));
    }
  finish_cocycle(grid, B);
  return B;
}

CorrectorSolution build_corrector(const Environment& env, const RealVec& h, int j, const SolveOptions& opt) {
  if (j < 1) throw DomainError("j must be a positive integer");
  const StepSet& steps = env.steps();
  const std::size_t K = steps.size();
  bool periodic = false;
  Box cells = corrector_cells(env, &periodic);
  if (cells.size() > 1'000'000) throw CapacityError("corrector cell set exceeds 1e6 cells");
  Grid grid(cells, steps, periodic);
  std::vector<double> V = cell_potential(env, cells, periodic);
  const double inv_j = 1.0 / j;
  std::vector<double> w(V.size());
  double max_row = 0;
  for (std::int64_t c = 0; c < cells.size(); ++c) {
    double row = 0;
    for (std::size_t k = 0; k < K; ++k) {
      w[c * K + k] = -inv_j + steps.log_p(k) - V[c * K + k] + tilt(h, steps.step(k));
      if (grid.fwd[c * K + k] >= 0) row += std::exp(w[c * K + k]);
    }
    max_row = std::max(max_row, row);
  }
  if (max_row >= 1.0) {
    SpectralBounds b = kernel_spectral_bounds(grid, w);
    if (b.upper >= 1.0)
      throw DivergentSeries("tilted kernel has spectral radius in [" + std::to_string(b.lower) + ", " +
                            std::to_string(b.upper) + "]; the tilt is too large");
  }
  std::vector<double> source(cells.size(), -std::log1p(-std::exp(-inv_j)));
  std::vector<double> g(cells.size(), 0.0), next(cells.size());
  kernels::SweepArgs args{&grid, w.data(), source.data(), nullptr, Semiring::log_sum};
  CorrectorSolution sol;
  sol.j = j;
  sol.h = h;
  for (sol.iterations = 1; sol.iterations <= opt.max_iter; ++sol.iterations) {
    double delta = kernels::parallel::sweep(args, g, next);
    g.swap(next);
    if (delta < opt.tol) {
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) throw IterationLimit("corrector iteration did not reach tolerance");
  sol.g = std::move(g);
  sol.cocycle = cocycle_from_corrector(env, sol.g, h);
  sol.feasibility_slack = feasibility(env, sol.cocycle, false, 0.0) + 1.0 - std::exp(inv_j);
  return sol;
}

CorrectorSolution build_zero_temp_corrector(const Environment& env, const RealVec& h, int j, const SolveOptions& opt) {
  if (j < 1) throw DomainError("j must be a positive integer");
  const StepSet& steps = env.steps();
  const std::size_t K = steps.size();
  bool periodic = false;
  Box cells = corrector_cells(env, &periodic);
  if (cells.size() > 1'000'000) throw CapacityError("corrector cell set exceeds 1e6 cells");
  Grid grid(cells, steps, periodic);
  std::vector<double> V = cell_potential(env, cells, periodic);
  const double inv_j = 1.0 / j;
  std::vector<double> w(V.size());
  for (std::int64_t c = 0; c < cells.size(); ++c)
    for (std::size_t k = 0; k < K; ++k) w[c * K + k] = -V[c * K + k] + tilt(h, steps.step(k)) - inv_j;
  // the k = 0 term of the defining maximum is -1/j
  std::vector<double> source(cells.size(), -inv_j);
  std::vector<double> g = source, next(cells.size());
  kernels::SweepArgs args{&grid, w.data(), source.data(), nullptr, Semiring::max_plus};
  CorrectorSolution sol;
  sol.j = j;
  sol.h = h;
  // without a positive-mean cycle the iteration settles within #cells rounds
  const std::int64_t limit = std::min<std::int64_t>(opt.max_iter, cells.size() + 2);
  for (sol.iterations = 1; sol.iterations <= limit; ++sol.iterations) {
    double delta = kernels::parallel::sweep(args, g, next);
    g.swap(next);
    if (delta < opt.tol) {
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) throw DivergentSeries("max-plus corrector keeps growing; the tilt is too large");
  sol.g = std::move(g);
  sol.cocycle = cocycle_from_corrector(env, sol.g, h);
  sol.feasibility_slack = feasibility(env, sol.cocycle, true, 0.0) - inv_j;
  return sol;
}

double check_k_plus(const Environment& env, const Cocycle& B, bool zero_temp, double shift) {
  if (static_cast<std::int64_t>(B.increments.size()) != B.cells.size() * static_cast<std::int64_t>(env.K()))
    throw DomainError("cocycle increments do not match the step set");
  return feasibility(env, B, zero_temp, shift);
}

VariationalBound variational_lower_bound(const Environment& env, const Cocycle& B, const RatVec& xi, double alpha_hat,
                                         bool zero_temp, double shift, double tol) {
  VariationalBound r;
  r.slack = check_k_plus(env, B, zero_temp, shift);
  if (r.slack > tol) throw NotFeasible("cocycle violates the K+ constraint by " + std::to_string(r.slack));
  r.hB_dot_xi = B.h_dot(env.steps(), xi);
  r.alpha_hat = alpha_hat;
  r.margin = alpha_hat - r.hB_dot_xi;
  return r;
}

DeterministicOptimum optimize_deterministic_corrector(const StepSet& steps, const RealVec& vbar, const RatVec& xi) {
  const std::size_t K = steps.size();
  const int d = steps.dim();
  if (vbar.size() != K) throw DomainError("need one potential value per step");
  if (static_cast<int>(xi.size()) != d) throw DomainError("direction has the wrong dimension");
  Face face = face_of(steps, xi);
  if (face.generators != whole_cone(steps).generators)
    throw DegenerateInput("direction " + format_vec(xi) + " is on the relative boundary of the cone");
  const Rational norm = l1_norm(xi);
  RatVec unit = xi;
  for (auto& c : unit) c /= norm;

  Eigen::MatrixXd Z(d, K);
  for (std::size_t k = 0; k < K; ++k)
    for (int i = 0; i < d; ++i) Z(i, k) = static_cast<double>(steps.step(k)[i]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Z, Eigen::ComputeFullU);
  const int r = static_cast<int>(rank_of(steps.steps()));
  Eigen::MatrixXd Q = svd.matrixU().leftCols(r);
  Eigen::MatrixXd Zr = Q.transpose() * Z;  // r x K
  Eigen::VectorXd xr = Q.transpose() * Eigen::Map<const Eigen::VectorXd>(to_real(unit).data(), d);
  Eigen::VectorXd c(K);
  for (std::size_t k = 0; k < K; ++k) c[k] = steps.log_p(k) - vbar[k];

  auto F = [&](const Eigen::VectorXd& y) {
    double s = 0;
    for (std::size_t k = 0; k < K; ++k) s += std::exp(c[k] + Zr.col(k).dot(y));
    return s;
  };
  std::int64_t iters = 0;
  // argmax_y y.xr - mu F(y) by damped Newton
  auto inner = [&](double mu, Eigen::VectorXd y) {
    for (int it = 0; it < 200; ++it, ++iters) {
      Eigen::VectorXd grad = xr;
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(r, r);
      for (std::size_t k = 0; k < K; ++k) {
        const double e = mu * std::exp(c[k] + Zr.col(k).dot(y));
        grad -= e * Zr.col(k);
        H += e * Zr.col(k) * Zr.col(k).transpose();
      }
      if (grad.norm() < 1e-15 * (1 + xr.norm())) break;
      Eigen::VectorXd step = H.ldlt().solve(grad);
      const double phi0 = y.dot(xr) - mu * F(y);
      double t = 1;
      while (t > 1e-12) {
        Eigen::VectorXd cand = y + t * step;
        if (cand.dot(xr) - mu * F(cand) >= phi0 - 1e-15 * std::fabs(phi0)) break;
        t *= 0.5;
      }
      y += t * step;
      if ((t * step).norm() < 1e-16 * (1 + y.norm())) break;
    }
    return y;
  };
  Eigen::VectorXd y = Eigen::VectorXd::Zero(r);
  // F(y(mu)) decreases in mu; bracket F = 1 then bisect on log mu
  double lo = 0, hi = 0;
  y = inner(1.0, y);
  double f = F(y);
  if (!std::isfinite(f)) throw DegenerateInput("deterministic program is unbounded");
  int guard = 0;
  double step = 1;
  if (f > 1) {
    lo = 0;
    for (; guard < 60; ++guard, step *= 2) {
      hi = lo + step;
      y = inner(std::exp2(hi), y);
      f = F(y);
      if (f <= 1) break;
      lo = hi;
    }
  } else {
    hi = 0;
    for (; guard < 60; ++guard, step *= 2) {
      lo = hi - step;
      y = inner(std::exp2(lo), y);
      f = F(y);
      if (f > 1) break;
      hi = lo;
    }
  }
  if (guard >= 60) throw NotFeasible("no tilt satisfies the deterministic constraint");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    y = inner(std::exp2(mid), y);
    if (F(y) > 1) lo = mid;
    else hi = mid;
  }
  y = inner(std::exp2(hi), y);
  DeterministicOptimum out;
  Eigen::VectorXd h = Q * y;
  out.h.assign(h.data(), h.data() + d);
  out.constraint = F(y);
  out.iterations = iters;
  double unit_value = 0;
  for (int i = 0; i < d; ++i) unit_value += out.h[i] * unit[i].convert_to<double>();
  out.value = unit_value * norm.convert_to<double>();
  return out;
}

RealVec select_tilt(const DirectionFan& fan, const RatVec& xi) {
  const int d = static_cast<int>(xi.size());
  LinearProgram lp;
  for (int i = 0; i < d; ++i) lp.add_var(true);
  for (std::size_t p = 0; p < fan.points.size(); ++p) {
    LinearProgram::Terms t;
    for (int i = 0; i < d; ++i)
      if (fan.points[p][i] != 0) t.emplace_back(i, fan.points[p][i]);
    lp.add_constraint(t, LinearProgram::Sense::le, rational_from_double(fan.alpha[p]));
  }
  LinearProgram::Terms obj;
  for (int i = 0; i < d; ++i) obj.emplace_back(i, xi[i]);
  lp.maximize(obj);
  LpResult res = lp.solve();
  if (res.status == LpStatus::unbounded) throw Unsupported("fan directions do not bound the tilt at " + format_vec(xi));
  if (res.status == LpStatus::infeasible) throw NotFeasible("no tilt lies below the fan estimates");
  return to_real(res.x);
}

CorrectorSolution build_corrector_shrinking(const Environment& env, RealVec h, int j, bool zero_temp, double shrink,
                                            int max_tries, const SolveOptions& opt) {
  for (int t = 0; t < max_tries; ++t) {
    try {
      return zero_temp ? build_zero_temp_corrector(env, h, j, opt) : build_corrector(env, h, j, opt);
    } catch (const DivergentSeries&) {
      for (auto& c : h) c *= shrink;
    }
  }
  throw DivergentSeries("corrector diverges for every shrunken tilt");
}

}  // namespace rwrp
