#pragma once

#include <functional>
#include <vector>

#include "rwrp/cone_geometry.hpp"
#include "rwrp/environment.hpp"
#include "rwrp/passage.hpp"

namespace rwrp {

enum class AlphaMethod { directed_dp, value_iteration, zero_temp };
AlphaMethod parse_alpha_method(const std::string& s);
std::string alpha_method_name(AlphaMethod m);

// sum_z floor(t gamma_z(xi)) z
IntVec xhat(const StepSet& steps, const RatVec& xi, const Rational& t);
IntVec xhat(const StepSet& steps, const ConeDecomposition& dec, const Rational& t);

struct LyapunovEstimate {
  RatVec direction;
  AlphaMethod method = AlphaMethod::directed_dp;
  std::vector<std::int64_t> t;
  std::vector<IntVec> points;
  std::vector<double> values;       // a(0, xhat_t)/t
  std::vector<double> running_min;  // min over the grid so far
  double estimate = 0;
  double upper_bound = 0;
};

LyapunovEstimate estimate_alpha(const Environment& env, const RatVec& xi, const std::vector<std::int64_t>& t_grid,
                                AlphaMethod method, const SolveOptions& opt = {});

struct HomogeneityReport {
  double homogeneity = 0;     // max |est(s xi) - s est(xi)| over aligned pairs
  std::int64_t aligned = 0;   // number of aligned (xi, s) pairs checked
  double subadditivity = 0;   // max a(x,z) - a(x,y) - a(y,z)
  std::int64_t triples = 0;
};

// Homogeneity at lattice-aligned points plus random subadditivity triples.
HomogeneityReport check_homogeneity_subadditivity(const Environment& env, const std::vector<RatVec>& directions,
                                                  const std::vector<std::int64_t>& s_values, std::int64_t t,
                                                  int triples, int max_steps, std::uint64_t seed,
                                                  bool zero_temp = false);

// Largest a(x,z) - a(x,y) - a(y,z) over random triples joined by random step
// sequences inside the environment box.
double max_subadditivity_violation(const Environment& env, int triples, int max_steps, std::uint64_t seed,
                                   bool zero_temp = false);

// Sites of a box grouped into radius bands [r, r+band) and filtered by A_delta.
struct ScanGeometry {
  Box box;
  std::vector<std::int64_t> radii;
  std::int64_t band = 8;
  std::vector<std::vector<std::int64_t>> sites;
  static ScanGeometry build(const Box& box, const ADeltaRegion& region, const std::vector<std::int64_t>& radii,
                            std::int64_t band);
};

struct ShapeRow {
  std::int64_t radius = 0;
  double max_err = 0;
  IntVec argmax;
  std::int64_t count = 0;
};

using AlphaFunction = std::function<double(const IntVec&)>;

// Max of |a(0,x) - alpha_hat(x)|/|x|_1 over each band. Finite temperature
// needs a directed step set.
std::vector<ShapeRow> shape_scan(const Environment& env, const ScanGeometry& geom, const AlphaFunction& alpha_hat,
                                 bool zero_temp = false);

// Replica-averaged estimates of alpha on a fan of directions inside a face.
struct DirectionFan {
  Face face;
  std::vector<RatVec> points;  // (1-tau) g1 + tau g2 for two-generator faces, l1-unit otherwise
  std::vector<Rational> tau;   // two-generator faces only
  std::vector<double> alpha;   // estimate of alpha at each point
  double operator()(const IntVec& x) const;
  StepSet steps;
};

std::vector<RatVec> fan_points(const StepSet& steps, const Face& face, int dirs, std::vector<Rational>* tau = nullptr);

// Fan estimated from one environment: alpha(zeta) ~ a(0, xhat_T(zeta))/T.
DirectionFan fan_on(const Environment& env, const Face& face, int dirs, std::int64_t T, bool zero_temp = false);

DirectionFan estimate_fan(const EnvironmentSpec& spec, const StepSet& steps, const Face& face, int dirs,
                          std::int64_t T, int replicas, std::uint64_t seed_base, bool zero_temp = false);

// Minimum over the field of a(0,x) + |c| (x.u)/delta, where c bounds V from
// below off the zero face. Nonnegative when the lower bound holds.
double lower_bound_margin(const Environment& env, const PassageField& from_origin);

// max over x with |x|_inf <= n of (1/n) sum_{k <= eps n} V+(x + k z, z).
double mixing_statistic(const Environment& env, std::size_t step, std::int64_t n, double eps);

}  // namespace rwrp
