#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Problem data model: unrelated machines, weighted jobs, per-pair processing
// times with forbidden (machine, job) pairs, Smith orderings and exact
// schedule cost evaluation.

namespace negsched {

// Sentinel for a forbidden (machine, job) pair.  Kept as an explicit marker
// instead of a huge processing time so the relaxations can drop these pairs
// from their variable sets without numeric blowup.
inline constexpr double kForbidden = -1.0;

struct Instance {
  int machines = 0;
  int jobs = 0;
  std::vector<double> weights;  // [jobs]
  std::vector<double> ptimes;   // [machines * jobs], row-major by machine

  Instance() = default;
  Instance(int m, int n)
      : machines(m), jobs(n), weights(n, 0.0),
        ptimes(static_cast<std::size_t>(m) * n, kForbidden) {}

  double ptime(int i, int j) const { return ptimes[static_cast<std::size_t>(i) * jobs + j]; }
  double& ptime(int i, int j) { return ptimes[static_cast<std::size_t>(i) * jobs + j]; }
  bool allowed(int i, int j) const { return ptime(i, j) >= 0.0; }

  std::vector<int> allowed_machines(int j) const {
    std::vector<int> out;
    for (int i = 0; i < machines; ++i)
      if (allowed(i, j)) out.push_back(i);
    return out;
  }

  // True when every weight and every finite processing time is an integer;
  // the brute-force oracle uses exact 64-bit arithmetic in that case.
  bool all_integral() const {
    auto integral = [](double v) { return std::floor(v) == v && std::abs(v) < 9.0e15; };
    for (double w : weights)
      if (!integral(w)) return false;
    for (double p : ptimes)
      if (p >= 0.0 && !integral(p)) return false;
    return true;
  }

  double min_positive_ptime() const {
    double best = -1.0;
    for (double p : ptimes)
      if (p > 0.0 && (best < 0.0 || p < best)) best = p;
    return best;  // -1 when every entry is zero or forbidden
  }

  void validate() const {
    if (machines <= 0 || jobs <= 0)
      throw std::invalid_argument("instance: machine and job counts must be positive");
    if (static_cast<int>(weights.size()) != jobs)
      throw std::invalid_argument("instance: weights size does not match job count");
    if (ptimes.size() != static_cast<std::size_t>(machines) * jobs)
      throw std::invalid_argument("instance: ptimes size does not match dimensions");
    for (double w : weights)
      if (!(w >= 0.0)) throw std::invalid_argument("instance: negative or NaN weight");
    for (double p : ptimes)
      if (p != kForbidden && !(p >= 0.0))
        throw std::invalid_argument("instance: processing times must be >= 0 or forbidden");
    for (int j = 0; j < jobs; ++j) {
      bool any = false;
      for (int i = 0; i < machines && !any; ++i) any = allowed(i, j);
      if (!any)
        throw std::invalid_argument("instance: job " + std::to_string(j) +
                                    " has no allowed machine");
    }
  }
};

// Total assignment of jobs to machines.
struct Schedule {
  std::vector<int> assignment;  // [jobs] -> machine index

  bool feasible(const Instance& inst) const {
    if (static_cast<int>(assignment.size()) != inst.jobs) return false;
    for (int j = 0; j < inst.jobs; ++j) {
      int i = assignment[j];
      if (i < 0 || i >= inst.machines || !inst.allowed(i, j)) return false;
    }
    return true;
  }
};

struct SmithOrder {
  int machine = 0;
  std::vector<int> order;  // jobs with finite ptime on `machine`, best ratio first
};

// j1 strictly precedes j2 on machine i.  Zero-time jobs come first (their
// ratio is +inf); otherwise non-increasing w/p compared by cross products;
// all ties broken by ascending job index so the order is total.
inline bool smith_precedes(const Instance& inst, int i, int j1, int j2) {
  const double p1 = inst.ptime(i, j1), p2 = inst.ptime(i, j2);
  const bool z1 = (p1 == 0.0), z2 = (p2 == 0.0);
  if (z1 != z2) return z1;
  if (!z1) {
    const double lhs = inst.weights[j1] * p2;
    const double rhs = inst.weights[j2] * p1;
    if (lhs != rhs) return lhs > rhs;
  }
  return j1 < j2;
}

inline SmithOrder smith_order(const Instance& inst, int i) {
  if (i < 0 || i >= inst.machines) throw std::invalid_argument("smith_order: bad machine index");
  SmithOrder so;
  so.machine = i;
  for (int j = 0; j < inst.jobs; ++j)
    if (inst.allowed(i, j)) so.order.push_back(j);
  std::sort(so.order.begin(), so.order.end(),
            [&](int a, int b) { return smith_precedes(inst, i, a, b); });
  return so;
}

// Position of every job in machine i's Smith order; -1 for forbidden pairs.
inline std::vector<int> smith_ranks(const Instance& inst, int i) {
  std::vector<int> rank(inst.jobs, -1);
  const SmithOrder so = smith_order(inst, i);
  for (std::size_t pos = 0; pos < so.order.size(); ++pos) rank[so.order[pos]] = static_cast<int>(pos);
  return rank;
}

// Total weighted completion time of a feasible schedule.  Each machine runs
// its assigned jobs in Smith order, which is optimal for a fixed assignment,
// so the cost is sum_j w_j * (sum of ptimes of assigned jobs up to and
// including j in that order).
inline double schedule_cost(const Instance& inst, const Schedule& s) {
  if (!s.feasible(inst))
    throw std::invalid_argument("schedule_cost: schedule assigns a job to a forbidden machine");
  const bool exact = inst.all_integral();
  double total = 0.0;
  long long total_ll = 0;
  std::vector<std::pair<int, int>> bucket;  // (smith rank, job)
  for (int i = 0; i < inst.machines; ++i) {
    const std::vector<int> rank = smith_ranks(inst, i);
    bucket.clear();
    for (int j = 0; j < inst.jobs; ++j)
      if (s.assignment[j] == i) bucket.emplace_back(rank[j], j);
    std::sort(bucket.begin(), bucket.end());
    if (exact) {
      long long prefix = 0;
      for (auto [r, j] : bucket) {
        prefix += static_cast<long long>(inst.ptime(i, j));
        total_ll += static_cast<long long>(inst.weights[j]) * prefix;
      }
    } else {
      double prefix = 0.0;
      for (auto [r, j] : bucket) {
        prefix += inst.ptime(i, j);
        total += inst.weights[j] * prefix;
      }
    }
  }
  return exact ? static_cast<double>(total_ll) : total;
}

// Divides every finite processing time by the smallest positive one, so the
// scaled instance satisfies p >= 1 on all nonzero entries (the normalization
// the grouping procedure expects).  Returns the scaled instance and the
// factor; original cost = factor * scaled cost.
inline std::pair<Instance, double> scale_to_unit_min_ptime(const Instance& inst) {
  const double factor = inst.min_positive_ptime();
  if (factor <= 0.0 || factor == 1.0) return {inst, 1.0};
  Instance scaled = inst;
  for (double& p : scaled.ptimes)
    if (p > 0.0) p /= factor;
  return {scaled, factor};
}

}  // namespace negsched
