#include "rwrp/lattice.hpp"

#include <sstream>

namespace rwrp {

Box::Box(IntVec lo_, IntVec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.empty()) throw SchemaError("box: bounds have different dimensions");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (hi[i] < lo[i]) throw SchemaError("box: empty range in coordinate " + std::to_string(i));
}

Box Box::parse(const std::string& text) {
  IntVec lo, hi;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw SchemaError("box: expected lo:hi, got '" + item + "'");
    try {
      lo.push_back(std::stoll(item.substr(0, colon)));
      hi.push_back(std::stoll(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw SchemaError("box: bad range '" + item + "'");
    }
  }
  return Box(lo, hi);
}

Box Box::cube(int d, std::int64_t l, std::int64_t h) { return Box(IntVec(d, l), IntVec(d, h)); }

Box Box::bounding(const std::vector<IntVec>& points) {
  if (points.empty()) throw DomainError("bounding box of no points");
  IntVec l = points[0], h = points[0];
  for (const auto& p : points)
    for (std::size_t i = 0; i < p.size(); ++i) {
      l[i] = std::min(l[i], p[i]);
      h[i] = std::max(h[i], p[i]);
    }
  return Box(l, h);
}

std::int64_t Box::size() const {
  std::int64_t n = 1;
  for (int i = 0; i < dim(); ++i) n *= extent(i);
  return n;
}

bool Box::contains(const IntVec& x) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

std::int64_t Box::index(const IntVec& x) const {
  std::int64_t idx = 0;
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return -1;
    idx = idx * extent(i) + (x[i] - lo[i]);
  }
  return idx;
}

IntVec Box::point(std::int64_t idx) const {
  IntVec x(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    x[i] = lo[i] + idx % extent(i);
    idx /= extent(i);
  }
  return x;
}

IntVec Box::wrap(const IntVec& x) const {
  IntVec y(dim());
  for (int i = 0; i < dim(); ++i) {
    std::int64_t e = extent(i);
    std::int64_t r = (x[i] - lo[i]) % e;
    if (r < 0) r += e;
    y[i] = lo[i] + r;
  }
  return y;
}

Box Box::grown(std::int64_t margin) const {
  IntVec l = lo, h = hi;
  for (int i = 0; i < dim(); ++i) {
    l[i] -= margin;
    h[i] += margin;
  }
  return Box(l, h);
}

std::string Box::str() const {
  std::string s;
  for (int i = 0; i < dim(); ++i) {
    if (i) s += ',';
    s += std::to_string(lo[i]) + ':' + std::to_string(hi[i]);
  }
  return s;
}

Grid::Grid(const Box& b, const StepSet& steps, bool periodic) : box(b), K(steps.size()) {
  const std::int64_t n = box.size();
  const int d = box.dim();
  fwd.assign(n * K, -1);
  bwd.assign(n * K, -1);
  std::vector<std::int64_t> stride(d, 1);
  for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * box.extent(i + 1);
  auto neighbour = [&](std::int64_t s, const IntVec& x, const IntVec& z, int sign) -> std::int64_t {
    std::int64_t idx = s;
    for (int i = 0; i < d; ++i) {
      std::int64_t c = x[i] + sign * z[i];
      if (c < box.lo[i] || c > box.hi[i]) {
        if (!periodic) return -1;
        std::int64_t e = box.extent(i);
        c = box.lo[i] + (((c - box.lo[i]) % e) + e) % e;
      }
      idx += (c - x[i]) * stride[i];
    }
    return idx;
  };
  box.for_each([&](std::int64_t s, const IntVec& x) {
    for (std::size_t k = 0; k < K; ++k) {
      fwd[s * K + k] = neighbour(s, x, steps.step(k), 1);
      bwd[s * K + k] = neighbour(s, x, steps.step(k), -1);
    }
  });
}

}  // namespace rwrp
