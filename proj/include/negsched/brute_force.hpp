#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "negsched/instance.hpp"

// Exhaustive optimum oracle for tiny instances.

namespace negsched {

struct BruteForceResult {
  double cost = 0.0;
  Schedule schedule;
  std::uint64_t enumerated = 0;
};

inline constexpr std::uint64_t kDefaultBruteForceCap = 10'000'000;

// Number of feasible assignments (product of per-job allowed-machine counts);
// saturates at cap + 1 to avoid overflow.
inline std::uint64_t feasible_assignment_count(const Instance& inst, std::uint64_t cap) {
  std::uint64_t count = 1;
  for (int j = 0; j < inst.jobs; ++j) {
    std::uint64_t choices = 0;
    for (int i = 0; i < inst.machines; ++i)
      if (inst.allowed(i, j)) ++choices;
    if (count > (cap + 1) / (choices == 0 ? 1 : choices)) return cap + 1;
    count *= choices;
  }
  return count;
}

// Enumerates every feasible assignment in lexicographic order (job-major,
// machines ascending) and returns the minimum cost together with the
// lexicographically least argmin.  Integer instances are evaluated in exact
// 64-bit arithmetic so oracle values carry no rounding error.
inline BruteForceResult brute_force_opt(const Instance& inst,
                                        std::uint64_t cap = kDefaultBruteForceCap) {
  inst.validate();
  const std::uint64_t count = feasible_assignment_count(inst, cap);
  if (count > cap)
    throw std::invalid_argument(
        "brute_force_opt: enumeration would require " +
        (count == cap + 1 ? std::string("more than ") + std::to_string(cap)
                          : std::to_string(count)) +
        " assignments (cap " + std::to_string(cap) + ")");

  std::vector<std::vector<int>> choices(inst.jobs);
  for (int j = 0; j < inst.jobs; ++j) choices[j] = inst.allowed_machines(j);
  std::vector<std::vector<int>> rank(inst.machines);
  for (int i = 0; i < inst.machines; ++i) rank[i] = smith_ranks(inst, i);

  const bool exact = inst.all_integral();
  std::vector<int> pick(inst.jobs, 0);  // index into choices[j]
  Schedule cur;
  cur.assignment.resize(inst.jobs);
  std::vector<std::vector<std::pair<int, int>>> per_machine(inst.machines);

  BruteForceResult best;
  bool have_best = false;
  long long best_ll = 0;

  std::uint64_t visited = 0;
  while (true) {
    ++visited;
    for (int j = 0; j < inst.jobs; ++j) cur.assignment[j] = choices[j][pick[j]];

    for (auto& v : per_machine) v.clear();
    for (int j = 0; j < inst.jobs; ++j) {
      const int i = cur.assignment[j];
      per_machine[i].emplace_back(rank[i][j], j);
    }
    double cost = 0.0;
    long long cost_ll = 0;
    for (int i = 0; i < inst.machines; ++i) {
      auto& v = per_machine[i];
      // insertion sort; per-machine lists are tiny
      for (std::size_t a = 1; a < v.size(); ++a) {
        auto key = v[a];
        std::size_t b = a;
        while (b > 0 && v[b - 1].first > key.first) {
          v[b] = v[b - 1];
          --b;
        }
        v[b] = key;
      }
      if (exact) {
        long long prefix = 0;
        for (auto [r, j] : v) {
          prefix += static_cast<long long>(inst.ptime(i, j));
          cost_ll += static_cast<long long>(inst.weights[j]) * prefix;
        }
      } else {
        double prefix = 0.0;
        for (auto [r, j] : v) {
          prefix += inst.ptime(i, j);
          cost += inst.weights[j] * prefix;
        }
      }
    }
    const bool better = exact ? (!have_best || cost_ll < best_ll) : (!have_best || cost < best.cost);
    if (better) {
      have_best = true;
      best_ll = cost_ll;
      best.cost = exact ? static_cast<double>(cost_ll) : cost;
      best.schedule = cur;
    }

    int j = inst.jobs - 1;
    while (j >= 0 && pick[j] + 1 == static_cast<int>(choices[j].size())) {
      pick[j] = 0;
      --j;
    }
    if (j < 0) break;
    ++pick[j];
  }
  best.enumerated = visited;
  return best;
}

}  // namespace negsched
