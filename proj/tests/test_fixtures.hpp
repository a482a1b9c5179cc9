#pragma once

#include <cstdint>
#include <vector>

#include "negsched/generators.hpp"
#include "negsched/instance.hpp"
#include "negsched/rounding.hpp"

// Fixtures shared by the unit tests and the acceptance suite.

namespace negsched::testing {

// Four jobs fractionally split 1/2-1/2 across two machines, with declared
// groups {1,3}, {2,4} on machine a and {1,2}, {3,4} on machine b (0-based
// jobs here).  Edge ids: (a,j) -> j, (b,j) -> 4 + j.
inline BipartiteRoundingInstance crossed_groups_instance() {
  std::vector<RoundingEdge> edges;
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 4; ++v) edges.push_back({u, v, 0.5});
  std::vector<std::vector<std::vector<int>>> groups(2);
  groups[0] = {{0, 2}, {1, 3}};
  groups[1] = {{4, 5}, {6, 7}};
  return make_rounding_instance(2, 4, std::move(edges), std::move(groups));
}

// The matching scheduling instance: 4 unit jobs on 2 machines.
inline Instance crossed_groups_scheduling_instance() {
  Instance inst(2, 4);
  for (int j = 0; j < 4; ++j) inst.weights[j] = 1.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) inst.ptime(i, j) = 1.0;
  return inst;
}

// The standard small-instance suite: 20 seeded random instances with
// n <= 10 jobs and 2..4 machines, integer data.
inline std::vector<Instance> random_suite() {
  std::vector<Instance> suite;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const int n = 4 + static_cast<int>(s % 7);        // 4..10
    const int m = 2 + static_cast<int>(s % 3);        // 2..4
    const double forbidden = (s % 2 == 0) ? 0.25 : 0.0;
    suite.push_back(random_instance(s, n, m, forbidden, 1, 20, 1, 10));
  }
  return suite;
}

inline FractionalAssignment uniform_assignment(const Instance& inst) {
  FractionalAssignment x(inst.machines, inst.jobs);
  for (int j = 0; j < inst.jobs; ++j) {
    const auto machines_j = inst.allowed_machines(j);
    for (int i : machines_j) x.at(i, j) = 1.0 / static_cast<double>(machines_j.size());
  }
  return x;
}

// Deterministic feasible schedule for round-trip tests.
inline Schedule arbitrary_schedule(const Instance& inst, std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 0xABCD));
  Schedule s;
  s.assignment.resize(inst.jobs);
  for (int j = 0; j < inst.jobs; ++j) {
    const auto machines_j = inst.allowed_machines(j);
    s.assignment[j] = machines_j[rng.next_below(machines_j.size())];
  }
  return s;
}

}  // namespace negsched::testing
