#include <doctest.h>

#include <cmath>

#include "rwrp/step_set.hpp"

using namespace rwrp;
using nlohmann::json;

TEST_CASE("uniform kernel by default") {
  StepSet s({{1, 0}, {0, 1}, {-1, 0}});
  REQUIRE(s.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(s.p(k) == doctest::Approx(1.0 / 3));
  CHECK(s.dim() == 2);
}

TEST_CASE("invalid step sets are rejected with the offending field") {
  auto message = [](auto&& f) {
    try {
      f();
    } catch (const SchemaError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message([] { StepSet({{1, 0}, {1, 0}}); }).find("duplicate") != std::string::npos);
  CHECK(message([] { StepSet({{1, 0}, {0, 0}}); }).find("zero step") != std::string::npos);
  CHECK(message([] { StepSet({{1, 0}, {0, 1, 2}}); }).find("steps") == 0);
  CHECK(message([] { StepSet({{1, 0}, {0, 1}}, {0.5, 0.6}); }).find("kernel") == 0);
  CHECK(message([] { StepSet({{1, 0}, {0, 1}}, {1.0, 0.0}); }).find("kernel") == 0);
  CHECK(message([] { StepSet({{1}, {-1}}, {0.5}); }).find("kernel") == 0);
}

TEST_CASE("weights summing to one within 1e-12 are accepted") {
  StepSet s({{1}, {-1}}, {0.5 + 4e-13, 0.5 - 4e-13});
  CHECK(s.size() == 2);
}

TEST_CASE("JSON round trip") {
  json j = json::parse(R"({"d": 2, "steps": [[1,0],[0,1],[-1,-1]], "kernel": [0.25, 0.25, 0.5]})");
  StepSet s = StepSet::from_json(j);
  CHECK(s.size() == 3);
  CHECK(s.p(2) == 0.5);
  StepSet t = StepSet::from_json(s.to_json());
  CHECK(t.steps() == s.steps());
  CHECK(t.kernel() == s.kernel());
  CHECK_THROWS_AS(StepSet::from_json(json::parse(R"({"d": 3, "steps": [[1,0],[0,1]]})")), SchemaError);
  CHECK_THROWS_AS(StepSet::from_json(json::parse(R"({"d": 2, "steps": [[1,0.5],[0,1]]})")), SchemaError);
}

TEST_CASE("directedness matches the existence of u with u.z > 0") {
  CHECK(StepSet::unit_directed(2).is_directed());
  CHECK(StepSet({{1, 0}, {1, 1}, {1, -1}}).is_directed());
  CHECK_FALSE(StepSet::simple_random_walk(1).is_directed());
  CHECK_FALSE(StepSet({{1, 0}, {-1, 0}, {0, 1}}).is_directed());
  CHECK_FALSE(StepSet({{1, 0}, {0, 1}, {-1, -1}}).is_directed());
  StepSet s({{2, -1}, {-1, 2}, {1, 1}});
  REQUIRE(s.is_directed());
  for (const auto& z : s.steps()) {
    std::int64_t dot = 0;
    for (int i = 0; i < 2; ++i) dot += z[i] * s.direction()[i];
    CHECK(dot >= 1);
  }
}

TEST_CASE("log kernel and lookups") {
  StepSet s = StepSet::simple_random_walk(2);
  CHECK(s.index_of({0, -1}) >= 0);
  CHECK(s.index_of({1, 1}) == -1);
  CHECK(s.log_p(0) == doctest::Approx(std::log(0.25)));
  CHECK(s.max_step_l1() == 1);
}
