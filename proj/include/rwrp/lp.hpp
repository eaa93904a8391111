#pragma once

#include <utility>
#include <vector>

#include "rwrp/types.hpp"

namespace rwrp {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  RatVec x;  // one entry per declared variable
  Rational value = 0;
};

// Exact rational linear program, solved with a two-phase tableau simplex
// under Bland's rule, so the returned vertex is a deterministic function of
// the variable and constraint order.
class LinearProgram {
 public:
  enum class Sense { le, ge, eq };
  using Terms = std::vector<std::pair<int, Rational>>;

  // Nonnegative variable unless `free` is set.
  int add_var(bool free = false);
  void add_constraint(const Terms& terms, Sense sense, const Rational& rhs);
  void maximize(const Terms& terms);
  LpResult solve() const;

  int num_vars() const { return static_cast<int>(free_.size()); }

 private:
  struct Row {
    Terms terms;
    Sense sense;
    Rational rhs;
  };
  std::vector<bool> free_;
  std::vector<Row> rows_;
  Terms objective_;
};

// Standard form: maximize c.x subject to A x = b, x >= 0.
LpResult solve_standard_lp(const std::vector<RatVec>& A, const RatVec& b, const RatVec& c);

}  // namespace rwrp
