#include "rwrp/cone_geometry.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <tuple>
#include <numeric>
#include <set>

#include "rwrp/lp.hpp"

namespace rwrp {

namespace {

using Sense = LinearProgram::Sense;

void require_exact_dim(const StepSet& steps) {
  if (steps.dim() > kMaxExactDim)
    throw UnsupportedDimension("exact face computations support d <= 4, got d=" + std::to_string(steps.dim()));
}

RatVec as_rational(const IntVec& v) { return to_rational(v); }

// Is target a nonnegative combination of the given steps? Returns the weights.
std::optional<RatVec> cone_weights(const StepSet& steps, const std::vector<int>& gens, const RatVec& target) {
  const int d = steps.dim();
  LinearProgram lp;
  std::vector<int> lam;
  for (std::size_t k = 0; k < gens.size(); ++k) lam.push_back(lp.add_var());
  for (int i = 0; i < d; ++i) {
    LinearProgram::Terms t;
    for (std::size_t k = 0; k < gens.size(); ++k) {
      auto c = steps.step(gens[k])[i];
      if (c != 0) t.emplace_back(lam[k], Rational(c));
    }
    lp.add_constraint(t, Sense::eq, target[i]);
  }
  auto res = lp.solve();
  if (res.status != LpStatus::optimal) return std::nullopt;
  return res.x;
}

std::vector<int> all_indices(const StepSet& steps) {
  std::vector<int> v(steps.size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Generators of the smallest face of C+ containing q (q must lie in C+):
// z belongs iff z + sum lambda_s s = tau q has a nonnegative solution.
std::vector<int> face_generators(const StepSet& steps, const RatVec& q) {
  const int d = steps.dim();
  std::vector<int> out;
  for (std::size_t z = 0; z < steps.size(); ++z) {
    LinearProgram lp;
    std::vector<int> lam;
    for (std::size_t k = 0; k < steps.size(); ++k) lam.push_back(lp.add_var());
    int tau = lp.add_var();
    for (int i = 0; i < d; ++i) {
      LinearProgram::Terms t;
      for (std::size_t k = 0; k < steps.size(); ++k)
        if (steps.step(k)[i] != 0) t.emplace_back(lam[k], Rational(steps.step(k)[i]));
      if (q[i] != 0) t.emplace_back(tau, -q[i]);
      lp.add_constraint(t, Sense::eq, Rational(-steps.step(z)[i]));
    }
    if (lp.solve().status == LpStatus::optimal) out.push_back(static_cast<int>(z));
  }
  return out;
}

int rank_rational(std::vector<RatVec> rows) {
  int r = 0;
  const int cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  for (int c = 0; c < cols && r < static_cast<int>(rows.size()); ++c) {
    int piv = -1;
    for (int i = r; i < static_cast<int>(rows.size()); ++i)
      if (rows[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[r], rows[piv]);
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rational f = rows[i][c] / rows[r][c];
      for (int j = c; j < cols; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
  }
  return r;
}

// Coordinates c with sum c_i basis_i = w, or nothing when w is outside the span.
std::optional<RatVec> span_coordinates(const std::vector<IntVec>& basis, const RatVec& w) {
  const int k = static_cast<int>(basis.size());
  const int d = static_cast<int>(w.size());
  // augmented d x (k+1) system
  std::vector<RatVec> m(d, RatVec(k + 1));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < k; ++j) m[i][j] = basis[j][i];
    m[i][k] = w[i];
  }
  std::vector<int> pivcol;
  int r = 0;
  for (int c = 0; c < k && r < d; ++c) {
    int piv = -1;
    for (int i = r; i < d; ++i)
      if (m[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[r], m[piv]);
    Rational pv = m[r][c];
    for (auto& e : m[r]) e /= pv;
    for (int i = 0; i < d; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (int j = 0; j <= k; ++j) m[i][j] -= f * m[r][j];
    }
    pivcol.push_back(c);
    ++r;
  }
  for (int i = r; i < d; ++i)
    if (m[i][k] != 0) return std::nullopt;
  RatVec c(k, Rational(0));
  for (int i = 0; i < r; ++i) c[pivcol[i]] = m[i][k];
  return c;
}

bool all_integral(const RatVec& v) {
  for (const auto& x : v)
    if (boost::multiprecision::denominator(x) != 1) return false;
  return true;
}

// Precomputed data for the constructive decomposition.
struct LoopData {
  Face zero;
  Separation sep;
  std::vector<IntVec> basis;                  // lattice basis of G(R0)
  std::vector<std::vector<std::int64_t>> up;  // representation of +basis_i over R0, per step
  std::vector<std::vector<std::int64_t>> down;
  Rational bound;
};

// Shortest nonnegative integer combination of R0 steps equal to target.
std::vector<std::int64_t> loop_representation(const StepSet& steps, const std::vector<int>& r0, const IntVec& target) {
  std::int64_t maxz = 0;
  for (int k : r0) maxz = std::max(maxz, l1_norm(steps.step(k)));
  const std::int64_t cap = 4 * maxz * steps.dim();
  std::map<IntVec, std::pair<IntVec, int>> parent;
  IntVec origin(steps.dim(), 0);
  parent[origin] = {origin, -1};
  std::vector<IntVec> frontier{origin};
  for (std::int64_t depth = 0; depth < cap && !parent.count(target); ++depth) {
    std::vector<IntVec> next;
    for (const auto& x : frontier)
      for (int k : r0) {
        IntVec y = add(x, steps.step(k));
        if (parent.emplace(y, std::make_pair(x, k)).second) next.push_back(y);
      }
    frontier.swap(next);
  }
  if (!parent.count(target))
    throw SearchCapExceeded("no loop representation of " + format_vec(target) + " within " + std::to_string(cap) +
                            " steps");
  std::vector<std::int64_t> counts(steps.size(), 0);
  for (IntVec x = target; x != origin;) {
    const auto& [prev, k] = parent.at(x);
    ++counts[k];
    x = prev;
  }
  return counts;
}

LoopData loop_data(const StepSet& steps) {
  LoopData ld;
  ld.zero = zero_face(steps);
  ld.sep = separating_vector(steps);
  const auto& r0 = ld.zero.generators;
  Rational u_inf = 0;
  for (const auto& x : ld.sep.u) u_inf = std::max(u_inf, Rational(abs(x)));
  Rational off_coef = u_inf / ld.sep.delta;
  ld.bound = off_coef;
  if (r0.empty()) return ld;

  std::vector<IntVec> r0vec;
  for (int k : r0) r0vec.push_back(steps.step(k));
  const int k = rank_of(r0vec);
  // a subset of R0 that is a lattice basis of G(R0), else a reduced basis
  std::vector<int> choice(k);
  std::vector<int> picked;
  std::function<bool(int, int)> search = [&](int start, int depth) -> bool {
    if (depth == k) {
      std::vector<IntVec> b;
      for (int c : choice) b.push_back(steps.step(c));
      if (rank_of(b) != k) return false;
      for (const auto& z : r0vec) {
        auto c = span_coordinates(b, as_rational(z));
        if (!c || !all_integral(*c)) return false;
      }
      picked = choice;
      return true;
    }
    for (int i = start; i < static_cast<int>(r0.size()); ++i) {
      choice[depth] = r0[i];
      if (search(i + 1, depth + 1)) return true;
    }
    return false;
  };
  if (search(0, 0)) {
    for (int c : picked) ld.basis.push_back(steps.step(c));
  } else {
    ld.basis = lattice_basis(r0vec);
  }
  for (std::size_t i = 0; i < ld.basis.size(); ++i) {
    const IntVec& b = ld.basis[i];
    int idx = steps.index_of(b);
    if (idx >= 0) {
      std::vector<std::int64_t> unit(steps.size(), 0);
      unit[idx] = 1;
      ld.up.push_back(unit);
    } else {
      ld.up.push_back(loop_representation(steps, r0, b));
    }
    ld.down.push_back(loop_representation(steps, r0, scale(b, -1)));
  }
  // left inverse (B^T B)^{-1} B^T, entrywise maximum
  const int d = steps.dim();
  const int kk = static_cast<int>(ld.basis.size());
  Rational c_lat = 0;
  for (int j = 0; j < d; ++j) {
    RatVec ej(d, Rational(0));
    ej[j] = 1;
    // least-squares coordinates of e_j: solve (B^T B) c = B^T e_j
    std::vector<RatVec> gram(kk, RatVec(kk + 1));
    for (int a = 0; a < kk; ++a) {
      for (int b2 = 0; b2 < kk; ++b2) gram[a][b2] = Rational(dot(ld.basis[a], ld.basis[b2]));
      gram[a][kk] = Rational(ld.basis[a][j]);
    }
    for (int c = 0; c < kk; ++c) {
      int piv = c;
      while (gram[piv][c] == 0) ++piv;
      std::swap(gram[c], gram[piv]);
      Rational pv = gram[c][c];
      for (auto& e : gram[c]) e /= pv;
      for (int a = 0; a < kk; ++a) {
        if (a == c || gram[a][c] == 0) continue;
        Rational f = gram[a][c];
        for (int b2 = 0; b2 <= kk; ++b2) gram[a][b2] -= f * gram[c][b2];
      }
    }
    for (int a = 0; a < kk; ++a) c_lat = std::max(c_lat, Rational(abs(gram[a][kk])));
  }
  std::int64_t amax = 0;
  for (int z : r0) {
    std::int64_t s = 0;
    for (int i = 0; i < kk; ++i) s += ld.up[i][z] + ld.down[i][z];
    amax = std::max(amax, s);
  }
  std::int64_t off_l1 = 0;
  for (std::size_t z = 0; z < steps.size(); ++z)
    if (!ld.zero.contains_step(static_cast<int>(z))) off_l1 += l1_norm(steps.step(z));
  Rational zero_part = Rational(amax) * c_lat * (1 + off_coef * off_l1);
  ld.bound = std::max(off_coef, zero_part);
  return ld;
}

// Replaces the R0 component w by the loop-based representation.
void add_zero_part(const StepSet& steps, const LoopData& ld, const RatVec& w, RatVec& gamma) {
  auto c = span_coordinates(ld.basis, w);
  if (!c) throw NotInCone("zero-face component outside span(R0)");
  for (std::size_t i = 0; i < ld.basis.size(); ++i) {
    const Rational& ci = (*c)[i];
    const auto& rep = ci >= 0 ? ld.up[i] : ld.down[i];
    Rational m = ci >= 0 ? ci : Rational(-ci);
    for (std::size_t z = 0; z < steps.size(); ++z)
      if (rep[z] != 0) gamma[z] += m * rep[z];
  }
}

}  // namespace

bool Face::contains_step(int k) const { return std::binary_search(generators.begin(), generators.end(), k); }

int rank_of(const std::vector<IntVec>& vectors) {
  std::vector<RatVec> rows;
  for (const auto& v : vectors) rows.push_back(as_rational(v));
  return rank_rational(rows);
}

std::vector<IntVec> lattice_basis(const std::vector<IntVec>& vectors) {
  if (vectors.empty()) return {};
  const int d = static_cast<int>(vectors[0].size());
  std::vector<std::vector<Integer>> rows;
  for (const auto& v : vectors) rows.emplace_back(v.begin(), v.end());
  std::size_t r = 0;
  for (int c = 0; c < d && r < rows.size(); ++c) {
    // integer row reduction on column c (Euclid on the column entries)
    for (;;) {
      int piv = -1;
      for (std::size_t i = r; i < rows.size(); ++i)
        if (rows[i][c] != 0 && (piv < 0 || abs(rows[i][c]) < abs(rows[piv][c]))) piv = static_cast<int>(i);
      if (piv < 0) break;
      std::swap(rows[r], rows[piv]);
      bool done = true;
      for (std::size_t i = r + 1; i < rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        Integer q = rows[i][c] / rows[r][c];
        for (int j = 0; j < d; ++j) rows[i][j] -= q * rows[r][j];
        if (rows[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (rows[r][c] != 0) ++r;
  }
  std::vector<IntVec> out;
  for (std::size_t i = 0; i < r; ++i) {
    IntVec v(d);
    for (int j = 0; j < d; ++j) v[j] = rows[i][j].convert_to<std::int64_t>();
    if (v[std::distance(v.begin(), std::find_if(v.begin(), v.end(), [](auto x) { return x != 0; }))] < 0)
      v = scale(v, -1);
    out.push_back(v);
  }
  return out;
}

IntVec reduce_direction(const IntVec& x) {
  std::int64_t g = 0;
  for (auto c : x) g = std::gcd(g, c < 0 ? -c : c);
  if (g <= 1) return x;
  IntVec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / g;
  return y;
}

Face zero_face(const StepSet& steps) {
  require_exact_dim(steps);
  Face f;
  f.kind = FaceKind::zero;
  const auto all = all_indices(steps);
  std::vector<RatVec> loops;
  for (std::size_t z = 0; z < steps.size(); ++z) {
    auto w = cone_weights(steps, all, as_rational(scale(steps.step(z), -1)));
    if (!w) continue;
    f.generators.push_back(static_cast<int>(z));
    (*w)[z] += 1;  // z + sum w_s s = 0
    loops.push_back(*w);
  }
  if (f.generators.empty()) return f;
  std::vector<IntVec> gens;
  for (int k : f.generators) gens.push_back(steps.step(k));
  f.affine_dim = rank_of(gens);
  RatVec total(steps.size(), Rational(0));
  for (const auto& l : loops)
    for (std::size_t s = 0; s < steps.size(); ++s) total[s] += l[s];
  Rational mass = 0;
  for (const auto& x : total) mass += x;
  for (int k : f.generators) f.barycentric.push_back(total[k] / mass);
  return f;
}

Separation separating_vector(const StepSet& steps) {
  const Face zf = zero_face(steps);
  const int d = steps.dim();
  Separation s;
  if (zf.generators.size() == steps.size()) {
    s.u.assign(d, Rational(0));
    s.delta = 1;
  } else {
    LinearProgram lp;
    std::vector<int> v(d);
    for (int i = 0; i < d; ++i) {
      v[i] = lp.add_var();
      lp.add_constraint({{v[i], Rational(1)}}, Sense::le, 2);
    }
    int t = lp.add_var(true);
    lp.add_constraint({{t, Rational(1)}}, Sense::le, 1);
    for (std::size_t z = 0; z < steps.size(); ++z) {
      const IntVec& st = steps.step(z);
      LinearProgram::Terms terms;
      std::int64_t shift = 0;
      for (int i = 0; i < d; ++i) {
        if (st[i] != 0) terms.emplace_back(v[i], Rational(st[i]));
        shift += st[i];
      }
      if (zf.contains_step(static_cast<int>(z))) {
        lp.add_constraint(terms, Sense::eq, Rational(shift));
      } else {
        terms.emplace_back(t, Rational(-1));
        lp.add_constraint(terms, Sense::ge, Rational(shift));
      }
    }
    lp.maximize({{t, Rational(1)}});
    auto res = lp.solve();
    if (res.status != LpStatus::optimal || res.x[t] <= 0)
      throw DegenerateInput("no separating vector found for the zero face");
    for (int i = 0; i < d; ++i) s.u.push_back(res.x[v[i]] - 1);
    s.delta = res.x[t];
  }
  s.u_real = to_real(s.u);
  s.delta_real = s.delta.convert_to<double>();
  return s;
}

Face whole_cone(const StepSet& steps) {
  Face f;
  f.generators = all_indices(steps);
  f.affine_dim = rank_of(steps.steps());
  return f;
}

std::vector<Face> cone_faces(const StepSet& steps) {
  require_exact_dim(steps);
  const int d = steps.dim();
  auto make = [&](const std::vector<int>& gens) {
    Face f;
    f.generators = gens;
    std::vector<IntVec> v;
    for (int k : gens) v.push_back(steps.step(k));
    f.affine_dim = rank_of(v);
    return f;
  };
  auto closure = [&](const std::vector<int>& gens) {
    RatVec q(d, Rational(0));
    for (int k : gens)
      for (int i = 0; i < d; ++i) q[i] += steps.step(k)[i];
    return face_generators(steps, q);
  };
  std::set<std::vector<int>> seen;
  std::deque<std::vector<int>> queue;
  auto bottom = closure({});
  seen.insert(bottom);
  queue.push_back(bottom);
  while (!queue.empty()) {
    auto f = queue.front();
    queue.pop_front();
    for (int s = 0; s < static_cast<int>(steps.size()); ++s) {
      if (std::binary_search(f.begin(), f.end(), s)) continue;
      auto g = f;
      g.insert(std::upper_bound(g.begin(), g.end(), s), s);
      auto c = closure(g);
      if (seen.insert(c).second) queue.push_back(c);
    }
  }
  std::vector<Face> out;
  for (const auto& g : seen) out.push_back(make(g));
  std::sort(out.begin(), out.end(), [](const Face& a, const Face& b) {
    return std::tuple(a.affine_dim, a.generators.size(), a.generators) <
           std::tuple(b.affine_dim, b.generators.size(), b.generators);
  });
  return out;
}

Face face_of(const StepSet& steps, const RatVec& xi) {
  require_exact_dim(steps);
  if (!in_cone(steps, xi)) throw NotInCone(format_vec(xi) + " is not in the cone of the steps");
  Face f;
  f.generators = face_generators(steps, xi);
  std::vector<IntVec> v;
  for (int k : f.generators) v.push_back(steps.step(k));
  f.affine_dim = rank_of(v);
  return f;
}

bool in_cone(const StepSet& steps, const RatVec& xi) { return cone_weights(steps, all_indices(steps), xi).has_value(); }

bool in_cone(const StepSet& steps, const std::vector<int>& generators, const RatVec& xi) {
  return cone_weights(steps, generators, xi).has_value();
}

std::optional<RatVec> in_hull(const StepSet& steps, const RatVec& xi) {
  const int d = steps.dim();
  LinearProgram lp;
  std::vector<int> lam;
  for (std::size_t k = 0; k < steps.size(); ++k) lam.push_back(lp.add_var());
  for (int i = 0; i < d; ++i) {
    LinearProgram::Terms t;
    for (std::size_t k = 0; k < steps.size(); ++k)
      if (steps.step(k)[i] != 0) t.emplace_back(lam[k], Rational(steps.step(k)[i]));
    lp.add_constraint(t, Sense::eq, xi[i]);
  }
  LinearProgram::Terms ones;
  for (int l : lam) ones.emplace_back(l, Rational(1));
  lp.add_constraint(ones, Sense::eq, 1);
  auto res = lp.solve();
  if (res.status != LpStatus::optimal) return std::nullopt;
  return res.x;
}

ConeDecomposition decompose(const StepSet& steps, const RatVec& xi) {
  require_exact_dim(steps);
  if (static_cast<int>(xi.size()) != steps.dim()) throw DomainError("point dimension differs from step set");
  const int d = steps.dim();
  // vertex solution of min sum gamma
  LinearProgram lp;
  std::vector<int> g;
  for (std::size_t k = 0; k < steps.size(); ++k) g.push_back(lp.add_var());
  for (int i = 0; i < d; ++i) {
    LinearProgram::Terms t;
    for (std::size_t k = 0; k < steps.size(); ++k)
      if (steps.step(k)[i] != 0) t.emplace_back(g[k], Rational(steps.step(k)[i]));
    lp.add_constraint(t, Sense::eq, xi[i]);
  }
  LinearProgram::Terms obj;
  for (int v : g) obj.emplace_back(v, Rational(-1));
  lp.maximize(obj);
  auto res = lp.solve();
  if (res.status != LpStatus::optimal) throw NotInCone(format_vec(xi) + " is not in the cone of the steps");
  LoopData ld = loop_data(steps);
  ConeDecomposition out;
  out.coefficients.assign(steps.size(), Rational(0));
  RatVec w(d, Rational(0));
  for (std::size_t z = 0; z < steps.size(); ++z) {
    if (ld.zero.contains_step(static_cast<int>(z))) {
      for (int i = 0; i < d; ++i) w[i] += res.x[z] * steps.step(z)[i];
    } else {
      out.coefficients[z] = res.x[z];
    }
  }
  if (!ld.zero.empty()) add_zero_part(steps, ld, w, out.coefficients);
  out.bound_constant = ld.bound;
  out.integral = all_integral(out.coefficients);
  return out;
}

ConeDecomposition decompose(const StepSet& steps, const IntVec& xi) {
  require_exact_dim(steps);
  const RatVec xr = as_rational(xi);
  if (!in_cone(steps, xr)) throw NotInCone(format_vec(xi) + " is not in the cone of the steps");
  LoopData ld = loop_data(steps);
  std::vector<int> off;
  for (std::size_t z = 0; z < steps.size(); ++z)
    if (!ld.zero.contains_step(static_cast<int>(z))) off.push_back(static_cast<int>(z));
  const int d = steps.dim();
  std::vector<std::int64_t> coef(steps.size(), 0);
  std::set<std::pair<std::size_t, IntVec>> failed;

  auto remainder_ok = [&](const IntVec& rem) {
    if (ld.zero.empty()) return l1_norm(rem) == 0;
    auto c = span_coordinates(ld.basis, as_rational(rem));
    return c && all_integral(*c);
  };
  std::function<bool(std::size_t, const IntVec&)> dfs = [&](std::size_t pos, const IntVec& rem) -> bool {
    if (pos == off.size()) return remainder_ok(rem);
    if (failed.count({pos, rem})) return false;
    const IntVec& z = steps.step(off[pos]);
    Rational uz = dot(ld.sep.u, as_rational(z));
    Rational urem = dot(ld.sep.u, as_rational(rem));
    if (urem < 0) {
      failed.insert({pos, rem});
      return false;
    }
    const Rational ratio = urem / uz;
    Integer floor_q = boost::multiprecision::numerator(ratio) / boost::multiprecision::denominator(ratio);
    const auto hi = floor_q.convert_to<std::int64_t>();
    if (pos + 1 == off.size() && ld.zero.empty()) {
      // the remainder must be an exact multiple of z
      std::int64_t m = -1;
      for (int i = 0; i < d; ++i) {
        if (z[i] == 0) {
          if (rem[i] != 0) m = -2;
          continue;
        }
        if (rem[i] % z[i] != 0) {
          m = -2;
          break;
        }
        std::int64_t q = rem[i] / z[i];
        if (m == -1) m = q;
        else if (m != q) m = -2;
        if (m == -2) break;
      }
      if (m >= 0 && m <= hi) {
        coef[off[pos]] = m;
        return true;
      }
      failed.insert({pos, rem});
      return false;
    }
    for (std::int64_t c = 0; c <= hi; ++c) {
      IntVec next = sub(rem, scale(z, c));
      if (dfs(pos + 1, next)) {
        coef[off[pos]] = c;
        return true;
      }
    }
    failed.insert({pos, rem});
    return false;
  };
  if (!dfs(0, xi)) throw NotRepresentable(format_vec(xi) + " is in the cone but not in the step semigroup");
  ConeDecomposition out;
  out.coefficients.assign(steps.size(), Rational(0));
  IntVec w = xi;
  for (int z : off) {
    out.coefficients[z] = coef[z];
    w = sub(w, scale(steps.step(z), coef[z]));
  }
  if (!ld.zero.empty()) add_zero_part(steps, ld, as_rational(w), out.coefficients);
  out.bound_constant = ld.bound;
  out.integral = true;
  return out;
}

std::vector<int> path_plan(const StepSet& steps, const IntVec& xi) {
  auto dec = decompose(steps, xi);
  std::vector<int> plan;
  for (std::size_t z = 0; z < steps.size(); ++z) {
    auto n = boost::multiprecision::numerator(dec.coefficients[z]).convert_to<std::int64_t>();
    for (std::int64_t i = 0; i < n; ++i) plan.push_back(static_cast<int>(z));
  }
  return plan;
}

std::vector<IntVec> reachable_level(const StepSet& steps, int n) {
  if (n < 0) throw DomainError("level must be nonnegative");
  std::set<IntVec> cur{IntVec(steps.dim(), 0)};
  for (int k = 0; k < n; ++k) {
    std::set<IntVec> next;
    for (const auto& x : cur)
      for (const auto& z : steps.steps()) next.insert(add(x, z));
    cur.swap(next);
  }
  return {cur.begin(), cur.end()};
}

ADeltaRegion::ADeltaRegion(const StepSet& steps, Face face, double delta)
    : steps_(steps), face_(std::move(face)), delta_(delta), delta_exact_(rational_from_double(delta)) {
  if (!(delta > 0)) throw DomainError("delta must be positive");
  for (auto& f : cone_faces(steps)) {
    if (f.generators.size() >= face_.generators.size()) continue;
    if (std::includes(face_.generators.begin(), face_.generators.end(), f.generators.begin(), f.generators.end()))
      proper_.push_back(std::move(f));
  }
}

Rational ADeltaRegion::distance_exact(const RatVec& unit) const {
  const int d = steps_.dim();
  Rational best = -1;
  for (const auto& f : proper_) {
    LinearProgram lp;
    std::vector<int> lam, ep(d), em(d);
    for (std::size_t k = 0; k < f.generators.size(); ++k) lam.push_back(lp.add_var());
    for (int i = 0; i < d; ++i) {
      ep[i] = lp.add_var();
      em[i] = lp.add_var();
    }
    for (int i = 0; i < d; ++i) {
      LinearProgram::Terms t{{ep[i], Rational(1)}, {em[i], Rational(-1)}};
      for (std::size_t k = 0; k < f.generators.size(); ++k) {
        auto c = steps_.step(f.generators[k])[i];
        if (c != 0) t.emplace_back(lam[k], Rational(c));
      }
      lp.add_constraint(t, Sense::eq, unit[i]);
    }
    LinearProgram::Terms obj;
    for (int i = 0; i < d; ++i) {
      obj.emplace_back(ep[i], Rational(-1));
      obj.emplace_back(em[i], Rational(-1));
    }
    lp.maximize(obj);
    auto res = lp.solve();
    Rational dist = -res.value;
    if (best < 0 || dist < best) best = dist;
  }
  return best;
}

double ADeltaRegion::boundary_distance(const RatVec& xi) const {
  Rational n1 = l1_norm(xi);
  if (n1 == 0) throw DegenerateInput("distance undefined at the origin");
  RatVec unit = xi;
  for (auto& x : unit) x /= n1;
  Rational d = distance_exact(unit);
  return d < 0 ? std::numeric_limits<double>::infinity() : d.convert_to<double>();
}

bool ADeltaRegion::contains(const RatVec& xi) const {
  Rational n1 = l1_norm(xi);
  if (n1 == 0) throw DegenerateInput("A_delta membership is undefined at the origin");
  // integer key: clear denominators then reduce
  Integer den = 1;
  for (const auto& x : xi) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(x));
  IntVec key;
  for (const auto& x : xi) key.push_back(boost::multiprecision::numerator(x * den).convert_to<std::int64_t>());
  key = reduce_direction(key);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  bool inside = false;
  if (in_cone(steps_, face_.generators, xi)) {
    if (proper_.empty()) {
      inside = true;
    } else {
      RatVec unit = xi;
      for (auto& x : unit) x /= n1;
      inside = distance_exact(unit) >= delta_exact_;
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  cache_[key] = inside;
  return inside;
}

bool ADeltaRegion::contains(const IntVec& x) const { return contains(as_rational(x)); }

bool in_A_delta(const StepSet& steps, const Face& face, const RatVec& xi, double delta) {
  return ADeltaRegion(steps, face, delta).contains(xi);
}

}  // namespace rwrp
