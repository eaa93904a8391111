#pragma once

#include <cstdint>
#include <vector>

#include "rwrp/lattice.hpp"
#include "rwrp/logspace.hpp"

namespace rwrp {

// How path weights combine: log-sum-exp of log weights, or best path.
enum class Semiring { log_sum, max_plus, min_plus };

inline double semiring_zero(Semiring s) { return s == Semiring::min_plus ? kPosInf : kNegInf; }

// Sites of a box bucketed by an integer level u.x; used by the forward DP of
// directed step sets, where every step raises the level.
struct LevelPlan {
  std::vector<std::int64_t> order;    // site indices sorted by level, ties by index
  std::vector<std::int64_t> offsets;  // level boundaries into `order`
  std::int64_t min_level = 0;
  static LevelPlan build(const Box& box, const IntVec& direction);
};

namespace kernels {

void set_threads(int n);
int max_threads();

// Each kernel has a serial reference and an OpenMP variant. Every site is
// updated by the same code with a fixed step order, so both variants produce
// identical bits for any thread count.

// Forward pass over levels: F(x) = combine_k F(x - z_k) + w(x - z_k, k).
// `weights` is sites x K. F must hold the source values on entry; sites in
// `frozen` (nonzero) keep their entry value.
struct LevelDpArgs {
  const LevelPlan* plan;
  const Grid* grid;
  const double* weights;
  const std::vector<char>* frozen;
  Semiring mode;
};

// Backward sweep: out(v) = combine(source(v), combine_k w(v,k) + in(v + z_k)).
// Fixed sites copy `in`. Returns the largest change between in and out.
struct SweepArgs {
  const Grid* grid;
  const double* weights;
  const double* source;      // may be null: no source term
  const char* fixed;         // may be null
  Semiring mode;
};

// One restricted-length step of the polymer recursion:
// next(x) = combine_k prev(x - z_k) + w(x - z_k, k), where the weight array
// lives on `wbox` (optionally wrapped) and prev on `pbox`.
struct PolymerArgs {
  const Box* pbox;
  const Box* nbox;
  const Box* wbox;
  bool wrap;
  const std::vector<std::int64_t>* steps;  // K x d, flattened
  const double* weights;                   // wbox sites x K
  Semiring mode;
};

namespace serial {
void level_dp(const LevelDpArgs& a, std::vector<double>& F);
double sweep(const SweepArgs& a, const std::vector<double>& in, std::vector<double>& out);
void polymer_step(const PolymerArgs& a, const std::vector<double>& prev, std::vector<double>& next);
}  // namespace serial

namespace parallel {
void level_dp(const LevelDpArgs& a, std::vector<double>& F);
double sweep(const SweepArgs& a, const std::vector<double>& in, std::vector<double>& out);
void polymer_step(const PolymerArgs& a, const std::vector<double>& prev, std::vector<double>& next);
}  // namespace parallel

}  // namespace kernels
}  // namespace rwrp
