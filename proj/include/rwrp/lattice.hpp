#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rwrp/step_set.hpp"
#include "rwrp/types.hpp"

namespace rwrp {

// Inclusive integer box, sites stored row-major with the last coordinate
// varying fastest.
struct Box {
  IntVec lo, hi;

  Box() = default;
  Box(IntVec lo_, IntVec hi_);
  // "0:63,0:63"
  static Box parse(const std::string& text);
  static Box cube(int d, std::int64_t lo, std::int64_t hi);
  // Smallest box containing every point.
  static Box bounding(const std::vector<IntVec>& points);

  int dim() const { return static_cast<int>(lo.size()); }
  std::int64_t extent(int i) const { return hi[i] - lo[i] + 1; }
  std::int64_t size() const;
  bool contains(const IntVec& x) const;
  std::int64_t index(const IntVec& x) const;  // -1 when outside
  IntVec point(std::int64_t idx) const;
  IntVec wrap(const IntVec& x) const;
  Box grown(std::int64_t margin) const;
  std::string str() const;
  // Calls f(index, point) for every site in storage order.
  template <class F>
  void for_each(F&& f) const {
    IntVec x = lo;
    const std::int64_t n = size();
    for (std::int64_t s = 0; s < n; ++s) {
      f(s, static_cast<const IntVec&>(x));
      for (int i = dim() - 1; i >= 0; --i) {
        if (++x[i] <= hi[i]) break;
        x[i] = lo[i];
      }
    }
  }
  bool operator==(const Box& o) const { return lo == o.lo && hi == o.hi; }
};

// Neighbour tables over a box: fwd[s*K+k] is the index of site s + z_k and
// bwd[s*K+k] the index of s - z_k, -1 outside (or wrapped when periodic).
struct Grid {
  Box box;
  std::size_t K = 0;
  std::vector<std::int64_t> fwd, bwd;

  Grid(const Box& b, const StepSet& steps, bool periodic = false);
  std::int64_t sites() const { return box.size(); }
};

}  // namespace rwrp
