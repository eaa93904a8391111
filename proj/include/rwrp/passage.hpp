#pragma once

#include <optional>
#include <vector>

#include "rwrp/environment.hpp"
#include "rwrp/lattice.hpp"

namespace rwrp {

enum class PassageKind { finite_temperature, zero_temperature, last_passage, green };
// from_source: values are f(anchor, y); to_sink: values are f(v, anchor).
enum class Anchor { from_source, to_sink };

// Dense field over a box. Finite temperature and zero temperature store a
// (resp. a_inf) directly, with +inf where no admissible path exists; the
// green kind stores log g with -inf for zero.
struct PassageField {
  PassageKind kind = PassageKind::finite_temperature;
  Anchor anchor = Anchor::from_source;
  IntVec anchor_site;
  Box box;
  std::vector<double> values;
  double tolerance_achieved = 0;
  std::int64_t iterations = 0;

  double value_at(const IntVec& y) const;  // OutOfBox outside the box
};

struct SolveOptions {
  double tol = 1e-12;
  std::int64_t max_iter = 1'000'000;
};

// Directed step sets: forward level DP from the origin, killed at the box
// boundary (box defaults to the environment box).
PassageField a_directed(const Environment& env, const IntVec& origin, const std::vector<IntVec>& targets,
                        const std::optional<Box>& box = std::nullopt);

// Any step set satisfying V >= 0 on zero-face steps: value iteration towards
// the target, killed at the box boundary. Values are a(v, target).
PassageField a_general(const Environment& env, const IntVec& origin, const IntVec& target, const Box& box,
                       const SolveOptions& opt = {});
// Grows the box around origin and target until a(origin, target) moves by
// less than `box_tol` (or the environment box is exhausted).
PassageField a_general_auto(const Environment& env, const IntVec& origin, const IntVec& target,
                            const SolveOptions& opt = {}, double box_tol = 1e-8);

// Zero temperature: minimal (or, for directed steps, maximal) potential sum.
PassageField a_infty(const Environment& env, const IntVec& origin, const std::vector<IntVec>& targets,
                     const std::optional<Box>& box = std::nullopt, bool last_passage = false);

// Spectral radius bounds of the killed kernel p(z)e^{-V} on a box.
struct SpectralBounds {
  double lower = 0, upper = 0;
  std::int64_t iterations = 0;
};
SpectralBounds kernel_spectral_bounds(const Grid& grid, const std::vector<double>& weights, double decide_at = 1.0,
                                      std::int64_t max_iter = 20000);

// log g(v, target) for every v in the box.
PassageField green(const Environment& env, const IntVec& target, const Box& box, const SolveOptions& opt = {});

struct GreenIdentity {
  double residual = 0;
  double a_xy = 0;
  double log_g_xy = 0;
  double log_g_yy = 0;
  double g_yy_upper = 0;  // g(y,y) for V=0 on the same box; NaN when V has negative values
  bool diagonal_ok = false;
};
GreenIdentity check_green_identity(const Environment& env, const IntVec& x, const IntVec& y, const Box& box,
                                   const SolveOptions& opt = {});

struct BruteForceResult {
  double a = 0;  // +inf when there is no path
  double truncation_bound = 0;
  std::int64_t paths = 0;
};
inline constexpr int kMaxBruteForceLength = 14;
BruteForceResult brute_force_a(const Environment& env, const IntVec& origin, const IntVec& target, int max_len,
                               const std::optional<Box>& box = std::nullopt);

// Largest row sum of the killed kernel on a box.
double max_row_sum(const Environment& env, const Box& box);

}  // namespace rwrp
