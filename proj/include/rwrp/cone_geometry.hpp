#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "rwrp/step_set.hpp"
#include "rwrp/types.hpp"

namespace rwrp {

enum class FaceKind { zero, cone, hull };

struct Face {
  std::vector<int> generators;  // indices into the step set, ascending
  int affine_dim = -1;          // -1 for the empty face
  FaceKind kind = FaceKind::cone;
  // zero face only: strictly positive weights on the generators, summing to
  // 1, whose combination is exactly 0
  RatVec barycentric;

  bool empty() const { return generators.empty(); }
  bool contains_step(int k) const;
  bool operator==(const Face& o) const { return generators == o.generators && kind == o.kind; }
};

struct Separation {
  RatVec u;  // exact; zero on R0, u.z >= delta off R0
  Rational delta;
  RealVec u_real;
  double delta_real = 0;
};

struct ConeDecomposition {
  RatVec coefficients;  // one per step, in step order
  Rational bound_constant;
  bool integral = false;
};

// Largest supported dimension for exact face computations.
inline constexpr int kMaxExactDim = 4;

Face zero_face(const StepSet& steps);
Separation separating_vector(const StepSet& steps);

// Every face of the cone C+ ordered by (dimension, generators). The last
// entry is C+ itself.
std::vector<Face> cone_faces(const StepSet& steps);
// The smallest face of C+ containing xi; NotInCone when xi is outside.
Face face_of(const StepSet& steps, const RatVec& xi);
Face whole_cone(const StepSet& steps);

bool in_cone(const StepSet& steps, const RatVec& xi);
bool in_cone(const StepSet& steps, const std::vector<int>& generators, const RatVec& xi);
// Convex weights theta with sum theta_z z = xi, or nothing when xi is outside U.
std::optional<RatVec> in_hull(const StepSet& steps, const RatVec& xi);

// Nonnegative rational coefficients with sum gamma_z z = xi.
ConeDecomposition decompose(const StepSet& steps, const RatVec& xi);
// Nonnegative integer coefficients; NotRepresentable when xi is not in G+.
ConeDecomposition decompose(const StepSet& steps, const IntVec& xi);
// Step indices whose partial sums walk from 0 to xi.
std::vector<int> path_plan(const StepSet& steps, const IntVec& xi);

// D_n as a sorted list of points.
std::vector<IntVec> reachable_level(const StepSet& steps, int n);

// Membership in A_delta for a face A of C+, with results cached per reduced
// direction. Safe to share across threads.
class ADeltaRegion {
 public:
  ADeltaRegion(const StepSet& steps, Face face, double delta);
  bool contains(const RatVec& xi) const;
  bool contains(const IntVec& x) const;
  const Face& face() const { return face_; }
  double delta() const { return delta_; }
  // l1 distance from xi/|xi|_1 to the union of proper faces (infinite when A
  // has none).
  double boundary_distance(const RatVec& xi) const;

 private:
  Rational distance_exact(const RatVec& unit) const;

  StepSet steps_;
  Face face_;
  double delta_;
  Rational delta_exact_;
  std::vector<Face> proper_;
  mutable std::mutex mu_;
  mutable std::map<IntVec, bool> cache_;
};

bool in_A_delta(const StepSet& steps, const Face& face, const RatVec& xi, double delta);

// Helpers shared with other modules.
int rank_of(const std::vector<IntVec>& vectors);
std::vector<IntVec> lattice_basis(const std::vector<IntVec>& vectors);
IntVec reduce_direction(const IntVec& x);

}  // namespace rwrp
