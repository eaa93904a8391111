#include "rwrp/lp.hpp"

namespace rwrp {

namespace {

struct Tableau {
  std::vector<RatVec> t;  // m rows of n+1 entries, last is rhs
  std::vector<int> basis;
  int n = 0;

  void pivot(int r, int col) {
    Rational pv = t[r][col];
    for (auto& e : t[r]) e /= pv;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (static_cast<int>(i) == r || t[i][col] == 0) continue;
      Rational f = t[i][col];
      for (int j = 0; j <= n; ++j)
        if (t[r][j] != 0) t[i][j] -= f * t[r][j];
    }
    basis[r] = col;
  }

  // Maximizes obj over the current basis; columns with allowed[j]=false never
  // enter. Returns false when unbounded.
  bool optimize(const RatVec& obj, const std::vector<bool>& allowed) {
    const int m = static_cast<int>(t.size());
    for (;;) {
      // reduced costs: obj_j - sum_i obj_{basis_i} t[i][j]
      int enter = -1;
      for (int j = 0; j < n && enter < 0; ++j) {
        if (!allowed[j]) continue;
        bool basic = false;
        for (int i = 0; i < m; ++i)
          if (basis[i] == j) basic = true;
        if (basic) continue;
        Rational rc = obj[j];
        for (int i = 0; i < m; ++i)
          if (t[i][j] != 0) rc -= obj[basis[i]] * t[i][j];
        if (rc > 0) enter = j;
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] <= 0) continue;
        Rational ratio = t[i][n] / t[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult solve_standard_lp(const std::vector<RatVec>& A, const RatVec& b, const RatVec& c) {
  const int m = static_cast<int>(A.size());
  const int n = static_cast<int>(c.size());
  Tableau tab;
  tab.n = n + m;
  tab.t.assign(m, RatVec(n + m + 1, Rational(0)));
  tab.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    bool neg = b[i] < 0;
    for (int j = 0; j < n; ++j) tab.t[i][j] = neg ? -A[i][j] : A[i][j];
    tab.t[i][n + i] = 1;
    tab.t[i][n + m] = neg ? -b[i] : b[i];
    tab.basis[i] = n + i;
  }
  // phase 1: maximize -sum(artificials)
  RatVec obj1(n + m, Rational(0));
  for (int i = 0; i < m; ++i) obj1[n + i] = -1;
  std::vector<bool> allowed(n + m, true);
  tab.optimize(obj1, allowed);
  Rational infeas = 0;
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] >= n) infeas += tab.t[i][n + m];
  LpResult res;
  if (infeas != 0) {
    res.status = LpStatus::infeasible;
    return res;
  }
  // drive artificials out of the basis; drop redundant rows
  for (int i = 0; i < static_cast<int>(tab.t.size());) {
    if (tab.basis[i] < n) {
      ++i;
      continue;
    }
    int col = -1;
    for (int j = 0; j < n && col < 0; ++j)
      if (tab.t[i][j] != 0) col = j;
    if (col >= 0) {
      tab.pivot(i, col);
      ++i;
    } else {
      tab.t.erase(tab.t.begin() + i);
      tab.basis.erase(tab.basis.begin() + i);
    }
  }
  for (int j = n; j < n + m; ++j) allowed[j] = false;
  RatVec obj2(n + m, Rational(0));
  for (int j = 0; j < n; ++j) obj2[j] = c[j];
  if (!tab.optimize(obj2, allowed)) {
    res.status = LpStatus::unbounded;
    return res;
  }
  res.status = LpStatus::optimal;
  res.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < tab.t.size(); ++i)
    if (tab.basis[i] < n) res.x[tab.basis[i]] = tab.t[i][n + m];
  res.value = 0;
  for (int j = 0; j < n; ++j) res.value += c[j] * res.x[j];
  return res;
}

int LinearProgram::add_var(bool free) {
  free_.push_back(free);
  return static_cast<int>(free_.size()) - 1;
}

void LinearProgram::add_constraint(const Terms& terms, Sense sense, const Rational& rhs) {
  rows_.push_back({terms, sense, rhs});
}

void LinearProgram::maximize(const Terms& terms) { objective_ = terms; }

LpResult LinearProgram::solve() const {
  // column layout: each variable gets one column (two when free), then one
  // slack column per inequality row
  const int nv = num_vars();
  std::vector<int> pos(nv), neg(nv, -1);
  int cols = 0;
  for (int v = 0; v < nv; ++v) {
    pos[v] = cols++;
    if (free_[v]) neg[v] = cols++;
  }
  std::vector<int> slack(rows_.size(), -1);
  for (std::size_t r = 0; r < rows_.size(); ++r)
    if (rows_[r].sense != Sense::eq) slack[r] = cols++;
  std::vector<RatVec> A(rows_.size(), RatVec(cols, Rational(0)));
  RatVec b(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (const auto& [v, coef] : rows_[r].terms) {
      A[r][pos[v]] += coef;
      if (neg[v] >= 0) A[r][neg[v]] -= coef;
    }
    if (rows_[r].sense == Sense::le) A[r][slack[r]] = 1;
    if (rows_[r].sense == Sense::ge) A[r][slack[r]] = -1;
    b[r] = rows_[r].rhs;
  }
  RatVec c(cols, Rational(0));
  for (const auto& [v, coef] : objective_) {
    c[pos[v]] += coef;
    if (neg[v] >= 0) c[neg[v]] -= coef;
  }
  LpResult std_res = solve_standard_lp(A, b, c);
  LpResult res;
  res.status = std_res.status;
  if (res.status != LpStatus::optimal) return res;
  res.x.assign(nv, Rational(0));
  for (int v = 0; v < nv; ++v) {
    res.x[v] = std_res.x[pos[v]];
    if (neg[v] >= 0) res.x[v] -= std_res.x[neg[v]];
  }
  res.value = std_res.value;
  return res;
}

}  // namespace rwrp
