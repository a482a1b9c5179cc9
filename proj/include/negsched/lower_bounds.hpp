#pragma once

#include <stdexcept>
#include <vector>

#include "negsched/relaxation.hpp"

// PSD-derived lower bounds on a machine's prefix objective
// sum_{j<=n'} p_j (p_1 X[j,1] + ... + p_j X[j,j]):
//
//   LB(S) = sum_{j in prefix, j not in S} x_j p_j^2
//           + 1/2 * ( sum_{j in S} x_j p_j^2 + (sum_{j in S} x_j p_j)^2 ).
//
// Any S inside the prefix is valid; the three standard choices are S = empty,
// S = the whole prefix, and S = the grouped jobs of the prefix.

namespace negsched {

// LB(S) for machine i restricted to the first n_prefix jobs of its Smith
// order (positive-time jobs).  S holds job ids and must lie inside the
// prefix.
inline double lower_bound_lb(const Instance& inst, const SdpSolution& sol, int i, int n_prefix,
                             const std::vector<int>& s_jobs) {
  const MachineView v = machine_view(inst, sol.x, i);
  if (n_prefix < 0 || n_prefix > v.size())
    throw std::invalid_argument("lower_bound_lb: prefix out of range");
  std::vector<char> in_s(inst.jobs, 0);
  for (int j : s_jobs) {
    bool inside = false;
    for (int t = 0; t < n_prefix; ++t)
      if (v.job[t] == j) inside = true;
    if (!inside)
      throw std::invalid_argument("lower_bound_lb: S contains a job outside the prefix");
    in_s[j] = 1;
  }
  double outside_q = 0.0, s_q = 0.0, s_l = 0.0;
  for (int t = 0; t < n_prefix; ++t) {
    const double contrib_q = v.x[t] * v.p[t] * v.p[t];
    if (in_s[v.job[t]]) {
      s_q += contrib_q;
      s_l += v.x[t] * v.p[t];
    } else {
      outside_q += contrib_q;
    }
  }
  return outside_q + 0.5 * (s_q + s_l * s_l);
}

struct CorollaryBounds {
  double lb_empty = 0.0;    // Q
  double lb_full = 0.0;     // (Q + L^2) / 2
  double lb_grouped = 0.0;  // (Qbar + Q + (L - Lbar)^2) / 2
  double q = 0.0, l = 0.0, q_ungrouped = 0.0, l_ungrouped = 0.0;

  double best() const { return std::max({lb_empty, lb_full, lb_grouped}); }
};

// The three named bounds for machine i and prefix n_prefix.  groups lists
// machine i's job groups (job ids); a prefix job is "grouped" when its whole
// group lies inside the prefix.
inline CorollaryBounds corollary_bounds(const Instance& inst, const SdpSolution& sol, int i,
                                        int n_prefix,
                                        const std::vector<std::vector<int>>& groups) {
  const MachineView v = machine_view(inst, sol.x, i);
  if (n_prefix < 0 || n_prefix > v.size())
    throw std::invalid_argument("corollary_bounds: prefix out of range");
  std::vector<char> in_prefix(inst.jobs, 0);
  for (int t = 0; t < n_prefix; ++t) in_prefix[v.job[t]] = 1;
  std::vector<char> grouped(inst.jobs, 0);
  for (const auto& g : groups) {
    bool inside = true;
    for (int j : g)
      if (!in_prefix[j]) inside = false;
    if (inside)
      for (int j : g) grouped[j] = 1;
  }
  CorollaryBounds b;
  for (int t = 0; t < n_prefix; ++t) {
    const double q = v.x[t] * v.p[t] * v.p[t];
    const double l = v.x[t] * v.p[t];
    b.q += q;
    b.l += l;
    if (!grouped[v.job[t]]) {
      b.q_ungrouped += q;
      b.l_ungrouped += l;
    }
  }
  b.lb_empty = b.q;
  b.lb_full = 0.5 * (b.q + b.l * b.l);
  const double lg = b.l - b.l_ungrouped;
  b.lb_grouped = 0.5 * (b.q_ungrouped + b.q + lg * lg);
  return b;
}

}  // namespace negsched
