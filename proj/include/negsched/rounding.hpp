#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "negsched/instance.hpp"
#include "negsched/relaxation.hpp"
#include "negsched/rng.hpp"

// Dependent rounding of a fractional bipartite assignment with strong
// negative correlation inside declared edge groups.
//
// Given y >= 0 with y(delta(v)) = 1 on every job vertex and, per machine
// vertex u, disjoint edge groups of y-mass at most 1, the rounding picks
// exactly one edge per job such that marginals are preserved, no two edges at
// a machine are positively correlated, and two edges in the same group are
// both picked with probability at most (1 - 1/108) times the product of
// their marginals.
//
// Phase 1 partitions each job's edges into at most 6 cells of y-mass >= 1/6
// (greedy over non-increasing y, one undersized trailing cell allowed) and
// picks one cell per job at random; R is the union.  Phase 2 repeatedly takes
// two same-group R-edges {u,v1}, {u,v2} plus non-R escapes {u1,v1}, {u2,v2}
// (u1, u2 != u) with all four values floating, and applies the +-alpha/beta
// pipage step along that 4-edge path, shrinking R at any job whose R-mass
// reaches 1.  Phase 3 rounds the remaining floating jobs independently.

namespace negsched {

inline constexpr double kZeta = 1.0 / 108.0;     // strong-correlation constant
inline constexpr double kClampTol = 1e-12;       // snap-to-integer tolerance
inline constexpr double kGroupMassCeil = 1.0 + 1e-9;

struct RoundingEdge {
  int machine = 0;
  int job = 0;
  double y = 0.0;
};

struct BipartiteRoundingInstance {
  int machines = 0;
  int jobs = 0;
  std::vector<RoundingEdge> edges;                    // ids are positions here
  std::vector<std::vector<int>> edges_of_job;         // ascending edge id
  std::vector<std::vector<int>> edges_of_machine;     // ascending edge id
  std::vector<std::vector<std::vector<int>>> groups;  // [machine][k] -> edge ids
  std::vector<int> group_of_edge;                     // flat group index or -1

  int edge_count() const { return static_cast<int>(edges.size()); }

  // flat group ordering: machines ascending, then group index
  struct GroupRef {
    int machine;
    int index;
  };
  std::vector<GroupRef> flat_groups;
};

// Assembles adjacency, renormalizes every job's y-mass to exactly 1, sorts
// group members by job id and checks the structural invariants.
inline BipartiteRoundingInstance make_rounding_instance(
    int machines, int jobs, std::vector<RoundingEdge> edges,
    std::vector<std::vector<std::vector<int>>> groups) {
  BipartiteRoundingInstance b;
  b.machines = machines;
  b.jobs = jobs;
  b.edges = std::move(edges);
  b.groups = std::move(groups);
  if (static_cast<int>(b.groups.size()) != machines)
    throw std::invalid_argument("rounding instance: need one group list per machine");
  b.edges_of_job.assign(jobs, {});
  b.edges_of_machine.assign(machines, {});
  for (int e = 0; e < b.edge_count(); ++e) {
    const RoundingEdge& ed = b.edges[e];
    if (ed.machine < 0 || ed.machine >= machines || ed.job < 0 || ed.job >= jobs)
      throw std::invalid_argument("rounding instance: edge endpoint out of range");
    if (!(ed.y > 0.0) || ed.y > 1.0 + 1e-9)
      throw std::invalid_argument("rounding instance: edge values must lie in (0, 1]");
    b.edges_of_job[ed.job].push_back(e);
    b.edges_of_machine[ed.machine].push_back(e);
  }
  for (int v = 0; v < jobs; ++v) {
    double sum = 0.0;
    for (int e : b.edges_of_job[v]) sum += b.edges[e].y;
    if (std::abs(sum - 1.0) > 1e-6)
      throw std::invalid_argument("rounding instance: job " + std::to_string(v) +
                                  " has edge mass " + std::to_string(sum));
    for (int e : b.edges_of_job[v]) b.edges[e].y /= sum;
  }
  b.group_of_edge.assign(b.edge_count(), -1);
  int flat = 0;
  for (int u = 0; u < machines; ++u) {
    for (auto& g : b.groups[u]) {
      std::sort(g.begin(), g.end(),
                [&](int a, int c) { return b.edges[a].job < b.edges[c].job; });
      double mass = 0.0;
      for (int e : g) {
        if (b.edges[e].machine != u)
          throw std::invalid_argument("rounding instance: group edge on wrong machine");
        if (b.group_of_edge[e] != -1)
          throw std::invalid_argument("rounding instance: groups must be disjoint");
        b.group_of_edge[e] = flat;
        mass += b.edges[e].y;
      }
      if (mass > kGroupMassCeil)
        throw std::invalid_argument("rounding instance: group mass exceeds 1");
      ++flat;
    }
  }
  for (int u = 0; u < machines; ++u)
    for (int k = 0; k < static_cast<int>(b.groups[u].size()); ++k)
      b.flat_groups.push_back({u, k});
  return b;
}

// Grouping procedure: on a machine, a job belongs to size class k when its
// processing time lies in [10^(k-1), 10^k); processing times must be
// pre-scaled so the minimum positive one is 1.  Within a class, jobs are
// scanned in Smith order: x >= 1/10 makes a singleton group, smaller jobs
// accumulate until their mass first reaches 1/10 (the sub-1/10 leftover
// stays ungrouped).  Zero-time jobs stay ungrouped; they cost nothing.
inline BipartiteRoundingInstance build_groups(const Instance& inst,
                                              const FractionalAssignment& x) {
  const double min_p = inst.min_positive_ptime();
  if (min_p > 0.0 && std::abs(min_p - 1.0) > 1e-12)
    throw std::invalid_argument(
        "build_groups: instance is not scaled (min positive ptime = " + std::to_string(min_p) +
        "); apply scale_to_unit_min_ptime first");
  if (x.machines != inst.machines || x.jobs != inst.jobs)
    throw std::invalid_argument("build_groups: assignment dimensions do not match instance");

  std::vector<RoundingEdge> edges;
  std::vector<std::vector<int>> edge_id(inst.machines, std::vector<int>(inst.jobs, -1));
  for (int i = 0; i < inst.machines; ++i)
    for (int j = 0; j < inst.jobs; ++j)
      if (inst.allowed(i, j) && x.at(i, j) > 0.0) {
        edge_id[i][j] = static_cast<int>(edges.size());
        edges.push_back({i, j, x.at(i, j)});
      }

  // per-job renormalized value, mirroring make_rounding_instance
  std::vector<double> y(edges.size());
  {
    std::vector<double> mass(inst.jobs, 0.0);
    for (const RoundingEdge& e : edges) mass[e.job] += e.y;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (mass[edges[e].job] <= 0.0)
        throw std::invalid_argument("build_groups: job with zero fractional mass");
      y[e] = edges[e].y / mass[edges[e].job];
    }
  }

  auto size_class = [](double p) {
    int k = 1;
    double upper = 10.0;
    while (p >= upper) {
      upper *= 10.0;
      ++k;
    }
    return k;
  };

  std::vector<std::vector<std::vector<int>>> groups(inst.machines);
  for (int i = 0; i < inst.machines; ++i) {
    // class -> member edges in Smith order
    std::vector<std::pair<int, int>> classed;  // (class, edge)
    for (int j : smith_order(inst, i).order) {
      const int e = edge_id[i][j];
      if (e < 0) continue;
      if (inst.ptime(i, j) == 0.0) continue;
      classed.emplace_back(size_class(inst.ptime(i, j)), e);
    }
    std::vector<int> classes;
    for (const auto& [k, e] : classed)
      if (std::find(classes.begin(), classes.end(), k) == classes.end()) classes.push_back(k);
    std::sort(classes.begin(), classes.end());
    for (int k : classes) {
      std::vector<int> acc;
      double mass = 0.0;
      for (auto& [ck, e] : classed) {
        if (ck != k) continue;
        if (y[e] >= 0.1) {
          groups[i].push_back({e});  // singleton; the running group continues past it
          continue;
        }
        acc.push_back(e);
        mass += y[e];
        if (mass >= 0.1) {
          groups[i].push_back(acc);
          acc.clear();
          mass = 0.0;
        }
      }
      // leftover below 1/10 stays ungrouped
    }
  }
  return make_rounding_instance(inst.machines, inst.jobs, std::move(edges), std::move(groups));
}

// Job-id view of the groups, used by the lower bounds and the audits.
inline std::vector<std::vector<std::vector<int>>> job_groups(const BipartiteRoundingInstance& b) {
  std::vector<std::vector<std::vector<int>>> out(b.machines);
  for (int u = 0; u < b.machines; ++u)
    for (const auto& g : b.groups[u]) {
      std::vector<int> jobs;
      for (int e : g) jobs.push_back(b.edges[e].job);
      out[u].push_back(std::move(jobs));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Rounding state and phases
// ---------------------------------------------------------------------------

struct Phase1Pick {
  int job = 0;
  int cell_count = 0;
  int picked = 0;
};

struct PipageEvent {
  int machine = 0;
  int group = 0;          // group index on that machine
  int e1 = 0, e2 = 0;     // same-group R-edges {u,v1}, {u,v2}
  int f1 = 0, f2 = 0;     // escapes {u1,v1}, {u2,v2}, not in R
  double alpha = 0.0, beta = 0.0;
  bool beta_branch = false;  // true: +beta on f1,e2 / -beta on e1,f2
  std::vector<int> removed_from_r;
};

struct RoundingState {
  std::vector<double> y;
  std::vector<char> in_r;
  int pipage_iterations = 0;
  bool trace_enabled = false;
  std::vector<Phase1Pick> phase1_trace;
  std::vector<PipageEvent> phase2_trace;

  bool floating(int e) const { return y[e] > 0.0 && y[e] < 1.0; }
};

// Phase-1 cells of one job: edges sorted by non-increasing y (ties by edge
// id), cut greedily into minimal cells of mass >= 1/6; at most the last cell
// may be smaller.
inline std::vector<std::vector<int>> phase1_cells(const BipartiteRoundingInstance& b, int job) {
  std::vector<int> order = b.edges_of_job[job];
  std::sort(order.begin(), order.end(), [&](int a, int c) {
    if (b.edges[a].y != b.edges[c].y) return b.edges[a].y > b.edges[c].y;
    return a < c;
  });
  std::vector<std::vector<int>> cells;
  std::vector<int> cur;
  double mass = 0.0;
  for (int e : order) {
    cur.push_back(e);
    mass += b.edges[e].y;
    if (mass >= 1.0 / 6.0) {
      cells.push_back(cur);
      cur.clear();
      mass = 0.0;
    }
  }
  if (!cur.empty()) cells.push_back(cur);
  return cells;
}

inline RoundingState phase1_select_r(const BipartiteRoundingInstance& b, SplitMix64& rng,
                                     bool trace = false) {
  RoundingState st;
  st.trace_enabled = trace;
  st.y.resize(b.edge_count());
  for (int e = 0; e < b.edge_count(); ++e) st.y[e] = b.edges[e].y;
  st.in_r.assign(b.edge_count(), 0);
  for (int v = 0; v < b.jobs; ++v) {
    const auto cells = phase1_cells(b, v);
    const int pick = static_cast<int>(rng.next_below(cells.size()));
    for (int e : cells[pick]) st.in_r[e] = 1;
    if (trace) st.phase1_trace.push_back({v, static_cast<int>(cells.size()), pick});
  }
  return st;
}

namespace detail {

inline void clamp_value(double& y) {
  if (std::abs(y) <= kClampTol) y = 0.0;
  if (std::abs(1.0 - y) <= kClampTol) y = 1.0;
}

// A group participates in Phase 2 while it holds >= 2 floating R-edges.
inline int floating_r_count(const RoundingState& st, const std::vector<int>& group) {
  int c = 0;
  for (int e : group)
    if (st.in_r[e] && st.floating(e)) ++c;
  return c;
}

// Smallest-id floating non-R edge at job v avoiding machine u; -1 if none.
inline int find_escape(const BipartiteRoundingInstance& b, const RoundingState& st, int v,
                       int avoid_machine) {
  for (int e : b.edges_of_job[v]) {
    if (st.in_r[e]) continue;
    if (b.edges[e].machine == avoid_machine) continue;
    if (st.floating(e)) return e;
  }
  return -1;
}

}  // namespace detail

inline void phase2_pipage(RoundingState& st, const BipartiteRoundingInstance& b,
                          SplitMix64& rng) {
  const int n_groups = static_cast<int>(b.flat_groups.size());
  std::vector<int> counts(n_groups);
  for (int g = 0; g < n_groups; ++g) {
    const auto& gr = b.flat_groups[g];
    counts[g] = detail::floating_r_count(st, b.groups[gr.machine][gr.index]);
  }
  const int hard_cap = 4 * b.edge_count() + 16;

  while (true) {
    int sel_e1 = -1, sel_e2 = -1, sel_f1 = -1, sel_f2 = -1, sel_group = -1;
    // lexicographically first eligible (u, group, v1, v2, u1, u2)
    for (int g = 0; g < n_groups && sel_e1 < 0; ++g) {
      if (counts[g] < 2) continue;
      const auto& gr = b.flat_groups[g];
      const auto& members = b.groups[gr.machine][gr.index];  // job-ascending
      std::vector<int> live;
      for (int e : members)
        if (st.in_r[e] && st.floating(e)) live.push_back(e);
      for (std::size_t a = 0; a < live.size() && sel_e1 < 0; ++a) {
        const int f1 = detail::find_escape(b, st, b.edges[live[a]].job, gr.machine);
        if (f1 < 0) continue;
        for (std::size_t c = a + 1; c < live.size(); ++c) {
          const int f2 = detail::find_escape(b, st, b.edges[live[c]].job, gr.machine);
          if (f2 < 0) continue;
          sel_e1 = live[a];
          sel_e2 = live[c];
          sel_f1 = f1;
          sel_f2 = f2;
          sel_group = g;
          break;
        }
      }
    }
    if (sel_e1 < 0) break;

    const double alpha = std::min(std::min(st.y[sel_f1], 1.0 - st.y[sel_e1]),
                                  std::min(st.y[sel_e2], 1.0 - st.y[sel_f2]));
    const double beta = std::min(std::min(1.0 - st.y[sel_f1], st.y[sel_e1]),
                                 std::min(1.0 - st.y[sel_e2], st.y[sel_f2]));
    if (!(alpha + beta > 0.0))
      throw std::logic_error("phase2: degenerate step (alpha + beta = 0) on edges " +
                             std::to_string(sel_e1) + "," + std::to_string(sel_e2) + "," +
                             std::to_string(sel_f1) + "," + std::to_string(sel_f2));
    const bool beta_branch = rng.next_double() < alpha / (alpha + beta);
    if (beta_branch) {
      st.y[sel_f1] += beta;
      st.y[sel_e2] += beta;
      st.y[sel_e1] -= beta;
      st.y[sel_f2] -= beta;
    } else {
      st.y[sel_f1] -= alpha;
      st.y[sel_e2] -= alpha;
      st.y[sel_e1] += alpha;
      st.y[sel_f2] += alpha;
    }
    detail::clamp_value(st.y[sel_f1]);
    detail::clamp_value(st.y[sel_e1]);
    detail::clamp_value(st.y[sel_e2]);
    detail::clamp_value(st.y[sel_f2]);

    PipageEvent ev;
    ev.machine = b.flat_groups[sel_group].machine;
    ev.group = b.flat_groups[sel_group].index;
    ev.e1 = sel_e1;
    ev.e2 = sel_e2;
    ev.f1 = sel_f1;
    ev.f2 = sel_f2;
    ev.alpha = alpha;
    ev.beta = beta;
    ev.beta_branch = beta_branch;

    // R-shrink: when a job's R-mass reaches 1, keep only the largest R-edge.
    for (int v : {b.edges[sel_e1].job, b.edges[sel_e2].job}) {
      double r_mass = 0.0;
      for (int e : b.edges_of_job[v])
        if (st.in_r[e]) r_mass += st.y[e];
      if (r_mass < 1.0 - kClampTol) continue;
      int keep = -1;
      for (int e : b.edges_of_job[v])
        if (st.in_r[e] && (keep < 0 || st.y[e] > st.y[keep])) keep = e;
      for (int e : b.edges_of_job[v])
        if (st.in_r[e] && e != keep) {
          st.in_r[e] = 0;
          ev.removed_from_r.push_back(e);
        }
    }

    // refresh the floating-R counters of every touched group
    auto refresh = [&](int e) {
      const int g = b.group_of_edge[e];
      if (g < 0) return;
      const auto& gr = b.flat_groups[g];
      counts[g] = detail::floating_r_count(st, b.groups[gr.machine][gr.index]);
    };
    refresh(sel_e1);
    refresh(sel_e2);
    refresh(sel_f1);
    refresh(sel_f2);
    for (int e : ev.removed_from_r) refresh(e);

    ++st.pipage_iterations;
    if (st.trace_enabled) st.phase2_trace.push_back(std::move(ev));
    if (st.pipage_iterations > hard_cap)
      throw std::runtime_error("phase2: exceeded the iteration bound; invariant broken");
  }
}

struct AssignmentOutcome {
  std::vector<int> chosen_edge;     // one per job
  std::vector<int> machine_of_job;  // one per job

  Schedule to_schedule() const { return Schedule{machine_of_job}; }
};

// Phase 3: independently per job, select one incident edge with probability
// equal to its current y-value.
inline AssignmentOutcome phase3_independent(const std::vector<double>& y,
                                            const BipartiteRoundingInstance& b,
                                            SplitMix64& rng) {
  AssignmentOutcome out;
  out.chosen_edge.assign(b.jobs, -1);
  out.machine_of_job.assign(b.jobs, -1);
  for (int v = 0; v < b.jobs; ++v) {
    const double draw = rng.next_double();
    double cum = 0.0;
    int pick = -1;
    for (int e : b.edges_of_job[v]) {
      cum += y[e];
      if (draw < cum) {
        pick = e;
        break;
      }
    }
    if (pick < 0) {  // floating-point shortfall: take the last positive edge
      for (int e : b.edges_of_job[v])
        if (y[e] > 0.0) pick = e;
    }
    if (pick < 0) throw std::logic_error("phase3: job with no positive edge value");
    out.chosen_edge[v] = pick;
    out.machine_of_job[v] = b.edges[pick].machine;
  }
  return out;
}

struct RoundingRun {
  RoundingState state;
  AssignmentOutcome outcome;
};

// Full three-phase rounding, deterministic given the seed.
inline RoundingRun round_with_state(const BipartiteRoundingInstance& b, std::uint64_t seed,
                                    bool trace = false) {
  SplitMix64 rng(seed);
  RoundingRun run;
  run.state = phase1_select_r(b, rng, trace);
  phase2_pipage(run.state, b, rng);
  run.outcome = phase3_independent(run.state.y, b, rng);
  return run;
}

inline AssignmentOutcome round(const BipartiteRoundingInstance& b, std::uint64_t seed) {
  return round_with_state(b, seed).outcome;
}

// Baseline: plain independent randomized rounding of the initial values.
inline AssignmentOutcome independent_round(const BipartiteRoundingInstance& b,
                                           std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> y(b.edge_count());
  for (int e = 0; e < b.edge_count(); ++e) y[e] = b.edges[e].y;
  return phase3_independent(y, b, rng);
}

}  // namespace negsched
