#pragma once

#include <vector>

#include "rwrp/environment.hpp"
#include "rwrp/kernels.hpp"

namespace rwrp {

enum class Temperature { finite, zero_max, zero_min };

Temperature parse_temperature(const std::string& s);
std::string temperature_name(Temperature t);
Semiring semiring_of(Temperature t);

// Restricted-length values G_{origin,(n),x}, dense over the bounding box of
// origin + D_n. Sites outside D_n hold the semiring zero.
struct PolymerSlice {
  int n = 0;
  Temperature temperature = Temperature::finite;
  IntVec origin;
  Box box;
  std::vector<double> values;

  bool in_support(const IntVec& x) const;
  // Semiring zero outside the support.
  double value_at(const IntVec& x) const;
};

// Slices for k = 0..n.
std::vector<PolymerSlice> polymer_dp(const Environment& env, const IntVec& origin, int n, Temperature temp);

// Largest (G_{x,(m),y} + G_{y,(n),z}) - G_{x,(m+n),z} over random samples
// with m + n <= max_len (for zero-min the inequality reverses and the
// reported value is the reversed difference).
double check_superadditivity(const Environment& env, int max_len, int trials, std::uint64_t seed,
                             Temperature temp = Temperature::finite);

// (1/n) combine_{x in D_n} (G_{0,(n),x} + h.(x - origin)).
double point_to_level(const PolymerSlice& slice, const RealVec& h);
// (1/n) combine_{k<n} combine_{x in D_k} (G_{0,(k),x} + h.(x - origin)).
double summed_point_to_level(const std::vector<PolymerSlice>& slices, int n, const RealVec& h);

struct RestrictedRow {
  Rational s;
  int path_length = 0;
  IntVec x;
  double restricted = 0;    // G_{0,(N),x}/n
  double unrestricted = 0;  // -a(0,x)/n
  double margin = 0;        // unrestricted - restricted
};
std::vector<RestrictedRow> restricted_vs_unrestricted(const Environment& env, const RatVec& xi,
                                                      const std::vector<Rational>& s_grid, int n);

// Lattice point of D_N following the convex weights theta (largest
// remainders break ties by step order).
IntVec hull_point(const StepSet& steps, const RatVec& theta, int N);

}  // namespace rwrp
