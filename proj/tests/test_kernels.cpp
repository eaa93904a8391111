#include <doctest.h>

#include <cmath>
#include <cstring>

#include "rwrp/counter_rng.hpp"
#include "rwrp/kernels.hpp"

using namespace rwrp;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> random_weights(std::int64_t n, std::uint64_t seed, double lo, double hi) {
  CounterRng rng(seed);
  std::vector<double> w(n);
  for (auto& x : w) x = lo + (hi - lo) * rng.uniform();
  return w;
}

const int kThreadCounts[] = {1, 2, 4, 8};

}  // namespace

TEST_CASE("level DP variants agree bit for bit") {
  const StepSet s({{1, 0}, {0, 1}, {1, 1}});
  const Box box = Box::cube(2, 0, 299);
  Grid grid(box, s);
  LevelPlan plan = LevelPlan::build(box, s.direction());
  auto w = random_weights(box.size() * 3, 1, -2.0, 0.5);
  std::vector<char> frozen(box.size(), 0);
  frozen[0] = 1;
  for (Semiring mode : {Semiring::log_sum, Semiring::max_plus, Semiring::min_plus}) {
    std::vector<double> ref(box.size(), semiring_zero(mode));
    ref[0] = 0;
    std::vector<double> init = ref;
    kernels::serial::level_dp({&plan, &grid, w.data(), &frozen, mode}, ref);
    CHECK(std::isfinite(ref.back()));
    for (int t : kThreadCounts) {
      kernels::set_threads(t);
      std::vector<double> F = init;
      kernels::parallel::level_dp({&plan, &grid, w.data(), &frozen, mode}, F);
      CHECK(same_bits(F, ref));
    }
  }
  kernels::set_threads(1);
}

TEST_CASE("level DP reproduces a hand computed corner") {
  const StepSet s = StepSet::unit_directed(2);
  const Box box = Box::cube(2, 0, 1);
  Grid grid(box, s);
  LevelPlan plan = LevelPlan::build(box, s.direction());
  std::vector<double> w(box.size() * 2, -1.0);
  std::vector<char> frozen(box.size(), 0);
  frozen[0] = 1;
  std::vector<double> F(box.size(), kNegInf);
  F[0] = 0;
  kernels::serial::level_dp({&plan, &grid, w.data(), &frozen, Semiring::log_sum}, F);
  CHECK(F[box.index({1, 1})] == doctest::Approx(std::log(2.0) - 2));
  CHECK(F[box.index({1, 0})] == doctest::Approx(-1));
}

TEST_CASE("sweep variants agree bit for bit") {
  const StepSet s = StepSet::simple_random_walk(2);
  const Box box = Box::cube(2, -60, 60);
  Grid grid(box, s);
  auto w = random_weights(box.size() * 4, 2, -3.0, -1.4);
  auto src = random_weights(box.size(), 3, -5.0, 0.0);
  std::vector<char> fixed(box.size(), 0);
  fixed[box.index({0, 0})] = 1;
  auto in = random_weights(box.size(), 4, -4.0, 0.0);
  for (Semiring mode : {Semiring::log_sum, Semiring::max_plus, Semiring::min_plus}) {
    for (const double* source : {static_cast<const double*>(nullptr), static_cast<const double*>(src.data())}) {
      kernels::SweepArgs args{&grid, w.data(), source, fixed.data(), mode};
      std::vector<double> ref(box.size());
      const double dref = kernels::serial::sweep(args, in, ref);
      CHECK(ref[box.index({0, 0})] == in[box.index({0, 0})]);
      for (int t : kThreadCounts) {
        kernels::set_threads(t);
        std::vector<double> out(box.size());
        const double d = kernels::parallel::sweep(args, in, out);
        CHECK(same_bits(out, ref));
        CHECK(d == dref);
      }
    }
  }
  kernels::set_threads(1);
}

TEST_CASE("polymer step variants agree bit for bit") {
  const StepSet s = StepSet::simple_random_walk(2);
  const Box pbox = Box::cube(2, -80, 80), nbox = Box::cube(2, -81, 81), wbox = Box::cube(2, -81, 81);
  std::vector<std::int64_t> flat;
  for (const auto& z : s.steps()) flat.insert(flat.end(), z.begin(), z.end());
  auto w = random_weights(wbox.size() * 4, 5, -1.0, 1.0);
  auto prev = random_weights(pbox.size(), 6, -10.0, 0.0);
  for (Semiring mode : {Semiring::log_sum, Semiring::max_plus, Semiring::min_plus}) {
    for (bool wrap : {false, true}) {
      kernels::PolymerArgs args{&pbox, &nbox, &wbox, wrap, &flat, w.data(), mode};
      std::vector<double> ref;
      kernels::serial::polymer_step(args, prev, ref);
      REQUIRE(ref.size() == static_cast<std::size_t>(nbox.size()));
      for (int t : kThreadCounts) {
        kernels::set_threads(t);
        std::vector<double> next;
        kernels::parallel::polymer_step(args, prev, next);
        CHECK(same_bits(next, ref));
      }
    }
  }
  kernels::set_threads(1);
}
