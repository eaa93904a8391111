#pragma once

#include <optional>
#include <vector>

#include "rwrp/environment.hpp"
#include "rwrp/limit_lab.hpp"
#include "rwrp/passage.hpp"

namespace rwrp {

// Increments B(c, 0, z_k) on a cell box. Periodic cocycles live on one period
// cell with wrap-around; sampled ones on the environment box, where only
// interior cells (all neighbours inside) carry a full set of increments.
struct Cocycle {
  Box cells;
  bool periodic = false;
  RealVec h;                      // tilt: E[B(0,z)] = -h.z
  std::vector<double> increments; // cells x K, NaN where c + z leaves the box
  std::vector<char> interior;     // per cell
  double closure_error = 0;       // max one-cell closure defect over interior cells

  std::size_t K() const { return cells.size() ? increments.size() / static_cast<std::size_t>(cells.size()) : 0; }
  double at(std::int64_t cell, std::size_t k) const { return increments[cell * K() + k]; }
  // -sum_z gamma_z mean B(., z) over interior cells
  double h_dot(const StepSet& steps, const RatVec& xi) const;
};

struct CorrectorSolution {
  int j = 1;
  RealVec h;
  std::vector<double> g;  // per cell
  Cocycle cocycle;
  // finite temperature: max_c sum_z p e^{-V-B} - e^{1/j}
  // zero temperature:  max_c -min_z (V+B) - 1/j
  double feasibility_slack = 0;
  bool converged = false;
  std::int64_t iterations = 0;
};

// Cells used for correctors: one period cell for periodic and constant
// environments, the environment box otherwise.
Box corrector_cells(const Environment& env, bool* periodic = nullptr);

// B(c,0,z) = -h.z on the corrector cells.
Cocycle deterministic_cocycle(const Environment& env, const RealVec& h);
// B(c,0,z) = g(c) - g(c+z) - h.z
Cocycle cocycle_from_corrector(const Environment& env, const std::vector<double>& g, const RealVec& h);

CorrectorSolution build_corrector(const Environment& env, const RealVec& h, int j, const SolveOptions& opt = {});
CorrectorSolution build_zero_temp_corrector(const Environment& env, const RealVec& h, int j,
                                            const SolveOptions& opt = {});

// Finite temperature: max_c sum_z p e^{-V-shift-B} - 1. Zero temperature:
// max_c -min_z (V + shift + B). Interior cells only.
double check_k_plus(const Environment& env, const Cocycle& B, bool zero_temp, double shift = 0);

struct VariationalBound {
  double hB_dot_xi = 0;
  double alpha_hat = 0;
  double margin = 0;  // alpha_hat - hB_dot_xi
  double slack = 0;
};

// NotFeasible when B is not in K+ for V + shift (tolerance `tol`).
VariationalBound variational_lower_bound(const Environment& env, const Cocycle& B, const RatVec& xi, double alpha_hat,
                                         bool zero_temp = false, double shift = 0, double tol = 1e-12);

struct DeterministicOptimum {
  RealVec h;
  double value = 0;
  double constraint = 0;  // sum_z p e^{-V+h.z}
  std::int64_t iterations = 0;
};

// max h.xi subject to sum_z p(z) e^{-vbar(z) + h.z} <= 1, for xi in the
// relative interior of the cone.
DeterministicOptimum optimize_deterministic_corrector(const StepSet& steps, const RealVec& vbar, const RatVec& xi);

// Largest h.xi with h.zeta <= alpha(zeta) on the fan directions.
RealVec select_tilt(const DirectionFan& fan, const RatVec& xi);

// Scales h by `shrink` until the corrector series converges.
CorrectorSolution build_corrector_shrinking(const Environment& env, RealVec h, int j, bool zero_temp,
                                            double shrink = 0.9, int max_tries = 80, const SolveOptions& opt = {});

}  // namespace rwrp
