#include <catch2/catch_amalgamated.hpp>

#include "negsched/brute_force.hpp"
#include "negsched/generators.hpp"
#include "negsched/instance.hpp"
#include "negsched/json_io.hpp"
#include "test_fixtures.hpp"

using namespace negsched;

namespace {

Instance one_machine(std::vector<double> p, std::vector<double> w) {
  Instance inst(1, static_cast<int>(p.size()));
  inst.weights = w;
  for (int j = 0; j < inst.jobs; ++j) inst.ptime(0, j) = p[j];
  return inst;
}

}  // namespace

TEST_CASE("smith order ranks by w/p with deterministic ties") {
  // ratios 2 > 0.5
  CHECK(smith_order(one_machine({1, 2}, {2, 1}), 0).order == std::vector<int>{0, 1});
  // equal ratios 0.5, index tie-break
  CHECK(smith_order(one_machine({2, 4}, {1, 2}), 0).order == std::vector<int>{0, 1});
  // zero-time job first
  CHECK(smith_order(one_machine({0, 1}, {5, 9}), 0).order == std::vector<int>{0, 1});
  CHECK(smith_order(one_machine({1, 0}, {9, 5}), 0).order == std::vector<int>{1, 0});
}

TEST_CASE("smith order skips forbidden pairs") {
  Instance inst(2, 3);
  inst.weights = {1, 1, 1};
  inst.ptime(0, 0) = 1.0;
  inst.ptime(0, 2) = 2.0;
  inst.ptime(1, 1) = 1.0;
  const SmithOrder so = smith_order(inst, 0);
  CHECK(so.order == std::vector<int>{0, 2});
}

TEST_CASE("schedule cost on a single machine") {
  const Instance inst = one_machine({1, 2}, {1, 1});
  Schedule s{{0, 0}};
  CHECK(schedule_cost(inst, s) == 4.0);  // 1*1 + 1*(1+2)

  const Instance single = one_machine({3}, {2});
  CHECK(schedule_cost(single, Schedule{{0}}) == 6.0);
}

TEST_CASE("schedule cost on the gap instance") {
  const Instance inst = gap_instance(10);
  Schedule s;
  s.assignment.assign(11, 0);
  s.assignment[10] = 1;
  CHECK(schedule_cost(inst, s) == 155.0);  // 55 for the unit jobs + 100 for the big one
}

TEST_CASE("schedule cost rejects forbidden assignments") {
  const Instance inst = gap_instance(3);
  Schedule s;
  s.assignment.assign(4, 0);  // big job is forbidden on machine 0
  CHECK_THROWS_AS(schedule_cost(inst, s), std::invalid_argument);
}

TEST_CASE("schedule cost is invariant under equal-ratio permutations") {
  // jobs 1 and 2 are tied (same w/p); swapping them must not change the cost
  const Instance inst = one_machine({2, 4, 3}, {1, 2, 5});
  Schedule s{{0, 0, 0}};
  const double base = schedule_cost(inst, s);
  Instance swapped = one_machine({4, 2, 3}, {2, 1, 5});
  CHECK(schedule_cost(swapped, s) == base);
}

TEST_CASE("schedule cost dominates the weighted processing mass") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = random_instance(seed, 6, 3, 0.2, 1, 9, 1, 5);
    const Schedule s = negsched::testing::arbitrary_schedule(inst, seed);
    double mass = 0.0;
    for (int j = 0; j < inst.jobs; ++j)
      mass += inst.weights[j] * inst.ptime(s.assignment[j], j);
    CHECK(schedule_cost(inst, s) >= mass - 1e-12);
  }
}

TEST_CASE("brute force on trivial and tiny instances") {
  const Instance single = one_machine({1, 2, 3}, {1, 1, 1});
  const BruteForceResult r = brute_force_opt(single);
  CHECK(r.cost == schedule_cost(single, Schedule{{0, 0, 0}}));

  const Instance two = poisson_instance(2);
  CHECK(brute_force_opt(two).cost == 2.0);
}

TEST_CASE("brute force matches the gap instance formula") {
  for (int k = 1; k <= 6; ++k) {
    const BruteForceResult r = brute_force_opt(gap_instance(k));
    CHECK(r.cost == k * (k + 1) / 2.0 + static_cast<double>(k) * k);
  }
  CHECK(brute_force_opt(gap_instance(5)).cost == 40.0);
}

TEST_CASE("brute force refuses oversized enumerations") {
  const Instance inst = poisson_instance(9);  // 9^9 = 387M > default cap
  CHECK_THROWS_WITH(brute_force_opt(inst), Catch::Matchers::ContainsSubstring("387420489"));
}

TEST_CASE("brute force returns the lexicographically least argmin") {
  // two symmetric machines: both splits cost the same, 0 -> machine 0 first
  const Instance inst = poisson_instance(2);
  const BruteForceResult r = brute_force_opt(inst);
  CHECK(r.schedule.assignment == std::vector<int>{0, 1});
}

TEST_CASE("brute force dominates schedules from other sources") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Instance inst = random_instance(seed, 5, 3, 0.3, 1, 10, 1, 10);
    const BruteForceResult r = brute_force_opt(inst);
    for (std::uint64_t s2 = 0; s2 < 6; ++s2) {
      const Schedule s = negsched::testing::arbitrary_schedule(inst, s2);
      CHECK(r.cost <= schedule_cost(inst, s) + 1e-12);
    }
  }
}

TEST_CASE("gap instance shape") {
  const Instance g1 = gap_instance(1);
  CHECK(g1.jobs == 2);
  CHECK(g1.machines == 2);
  CHECK(g1.ptime(1, 1) == 1.0);

  const Instance g10 = gap_instance(10);
  CHECK(g10.jobs == 11);
  for (int i = 1; i <= 10; ++i) CHECK(g10.ptime(i, 10) == 100.0);
  CHECK_FALSE(g10.allowed(0, 10));
  for (int j = 0; j < 10; ++j) {
    CHECK(g10.ptime(0, j) == 1.0);
    CHECK_FALSE(g10.allowed(1, j));
  }
}

TEST_CASE("poisson instance shape and uniform feasibility") {
  const Instance p1 = poisson_instance(1);
  CHECK(p1.jobs == 1);
  CHECK(p1.ptime(0, 0) == 1.0);

  const Instance p4 = poisson_instance(4);
  FractionalAssignment x = negsched::testing::uniform_assignment(p4);
  CHECK_NOTHROW(x.validate(p4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(x.at(i, j) == 0.25);
}

TEST_CASE("class instance smith ratios scale geometrically") {
  const Instance c = class_instance(2, 10.0, 1, 1);
  // scaled sizes: class 1 has p = 10, class 2 has p = 1; min positive p is 1
  CHECK(c.min_positive_ptime() == 1.0);
  const double ratio1 = c.weights[0] / c.ptime(0, 0);
  const double ratio2 = c.weights[1] / c.ptime(0, 1);
  CHECK(ratio2 / ratio1 == Catch::Approx(100.0));  // scale^2

  const Instance single = class_instance(1, 10.0, 1, 1);
  CHECK(single.jobs == 1);
}

TEST_CASE("class instance fractional linear cost is classes * scale^classes per machine set") {
  // with x = 1/m the weighted processing mass is jobs_per_class * classes *
  // scale^classes (the unscaled value `classes` times the normalization factor)
  const int classes = 3, m = 5, jpc = 5;
  const double scale = 100.0;
  const Instance c = class_instance(classes, scale, jpc, m);
  const FractionalAssignment x = negsched::testing::uniform_assignment(c);
  double mass = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < c.jobs; ++j) mass += c.weights[j] * c.ptime(i, j) * x.at(i, j);
  CHECK(mass == Catch::Approx(jpc * classes * std::pow(scale, classes)));
}

TEST_CASE("random instance determinism and feasibility") {
  const Instance a = random_instance(7, 5, 3, 0.3, 1, 100, 1, 10);
  const Instance b = random_instance(7, 5, 3, 0.3, 1, 100, 1, 10);
  CHECK(a.ptimes == b.ptimes);
  CHECK(a.weights == b.weights);
  for (int j = 0; j < a.jobs; ++j) CHECK_FALSE(a.allowed_machines(j).empty());

  const Instance unit = random_instance(0, 1, 1, 0.0, 1, 1, 1, 1);
  CHECK(unit.ptime(0, 0) == 1.0);
  CHECK(unit.weights[0] == 1.0);
}

TEST_CASE("instance json round trip is exact for integer data") {
  const Instance inst = random_instance(42, 6, 3, 0.4, 1, 50, 1, 10);
  const Json j = instance_to_json(inst);
  const Instance back = instance_from_json(j);
  CHECK(back.machines == inst.machines);
  CHECK(back.jobs == inst.jobs);
  CHECK(back.weights == inst.weights);
  CHECK(back.ptimes == inst.ptimes);
  CHECK(instance_to_json(back).dump() == j.dump());
}

TEST_CASE("instance json rejects unknown and missing keys") {
  Json j = instance_to_json(gap_instance(2));
  j["extra"] = 1;
  CHECK_THROWS_AS(instance_from_json(j), std::invalid_argument);
  Json j2 = instance_to_json(gap_instance(2));
  j2.erase("weights");
  CHECK_THROWS_AS(instance_from_json(j2), std::invalid_argument);
}

TEST_CASE("scaling normalizes the minimum positive processing time") {
  Instance inst = one_machine({3, 6, 9}, {1, 2, 3});
  const auto [scaled, factor] = scale_to_unit_min_ptime(inst);
  CHECK(factor == 3.0);
  CHECK(scaled.min_positive_ptime() == 1.0);
  CHECK(scaled.ptime(0, 2) == 3.0);
}
