#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "negsched/brute_force.hpp"
#include "negsched/instance.hpp"
#include "negsched/lower_bounds.hpp"
#include "negsched/parallel.hpp"
#include "negsched/relaxation.hpp"
#include "negsched/rounding.hpp"
#include "negsched/rng.hpp"

// Statistical certification of the rounding guarantees: marginal
// preservation, pairwise correlation bounds, expected costs against the
// relaxation value and the exact optimum, the per-prefix approximation
// inequality and the grouped-gain upper bound.
//
// Every report is a pure function of (instance, solution, trials, seed):
// trial t draws its own RNG stream from derive_seed(seed, t), integer
// counters merge exactly, and floating sums are accumulated per fixed-size
// trial chunk and reduced in chunk order, so results are bit-identical for
// any thread count.

namespace negsched {

inline constexpr double kTheoremConstant = kZeta / 20000.0;  // c in the 3/2 - c guarantee
inline constexpr double kFlagSigmas = 4.0;                   // violation threshold in sigmas

enum class RoundingAlgorithm { kNegativeCorrelation, kIndependent };

inline const char* to_string(RoundingAlgorithm a) {
  return a == RoundingAlgorithm::kNegativeCorrelation ? "negcorr" : "independent";
}

inline RoundingAlgorithm algorithm_from_string(const std::string& s) {
  if (s == "negcorr") return RoundingAlgorithm::kNegativeCorrelation;
  if (s == "independent") return RoundingAlgorithm::kIndependent;
  throw std::invalid_argument("unknown rounding algorithm: " + s);
}

// ---------------------------------------------------------------------------
// Trial engine
// ---------------------------------------------------------------------------

namespace detail {

// Smith-order walk data shared by the cost and prefix accumulators.  Prefix
// positions cover each machine's allowed positive-time jobs; zero-time jobs
// contribute nothing to cost or prefix sums.
struct TrialContext {
  const Instance* inst = nullptr;
  const BipartiteRoundingInstance* b = nullptr;
  std::vector<MachineView> views;       // x slot holds the rounding marginals y
  std::vector<int> slot_base;           // flat prefix slot per (machine, position)
  int total_slots = 0;

  static TrialContext build(const Instance& inst, const BipartiteRoundingInstance& b) {
    TrialContext ctx;
    ctx.inst = &inst;
    ctx.b = &b;
    FractionalAssignment y(inst.machines, inst.jobs);
    for (const RoundingEdge& e : b.edges) y.at(e.machine, e.job) = e.y;
    ctx.views.reserve(inst.machines);
    ctx.slot_base.resize(inst.machines);
    for (int i = 0; i < inst.machines; ++i) {
      ctx.views.push_back(machine_view(inst, y, i));
      ctx.slot_base[i] = ctx.total_slots;
      ctx.total_slots += ctx.views.back().size();
    }
    return ctx;
  }
};

struct ChunkAccum {
  double cost_sum = 0.0;
  double cost_sumsq = 0.0;
  std::vector<double> prefix_sum;    // [total_slots], empty when disabled
  std::vector<double> prefix_sumsq;
  std::vector<std::uint32_t> edge_count;  // per edge
  std::vector<std::uint32_t> pair_count;  // per same-machine edge pair, empty when disabled
};

// flat index of the unordered pair (a < b) among machine u's edges
struct PairIndexer {
  std::vector<int> base;           // per machine
  std::vector<int> pos_of_edge;    // position of an edge within its machine list
  int total = 0;

  static PairIndexer build(const BipartiteRoundingInstance& b) {
    PairIndexer px;
    px.base.resize(b.machines);
    px.pos_of_edge.assign(b.edge_count(), -1);
    for (int u = 0; u < b.machines; ++u) {
      px.base[u] = px.total;
      const int d = static_cast<int>(b.edges_of_machine[u].size());
      for (int t = 0; t < d; ++t) px.pos_of_edge[b.edges_of_machine[u][t]] = t;
      px.total += d * (d - 1) / 2;
    }
    return px;
  }

  int index(const BipartiteRoundingInstance& b, int u, int pa, int pb) const {
    // 0 <= pa < pb < d
    const int d = static_cast<int>(b.edges_of_machine[u].size());
    return base[u] + pa * (2 * d - pa - 1) / 2 + (pb - pa - 1);
  }
};

struct TrialSums {
  std::int64_t trials = 0;
  double cost_sum = 0.0, cost_sumsq = 0.0;
  std::vector<double> prefix_sum, prefix_sumsq;
  std::vector<std::uint64_t> edge_count;
  std::vector<std::uint64_t> pair_count;
};

inline TrialSums run_trials(const TrialContext& ctx, std::int64_t trials, std::uint64_t seed,
                            RoundingAlgorithm algo, int threads, bool want_pairs,
                            bool want_prefix) {
  const BipartiteRoundingInstance& b = *ctx.b;
  const PairIndexer px = want_pairs ? PairIndexer::build(b) : PairIndexer{};
  const std::int64_t n_chunks = trial_chunk_count(trials);
  std::vector<ChunkAccum> chunks(n_chunks);

  for_each_trial_chunk(trials, threads, [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
    ChunkAccum& acc = chunks[c];
    acc.edge_count.assign(b.edge_count(), 0);
    if (want_pairs) acc.pair_count.assign(px.total, 0);
    if (want_prefix) {
      acc.prefix_sum.assign(ctx.total_slots, 0.0);
      acc.prefix_sumsq.assign(ctx.total_slots, 0.0);
    }
    std::vector<int> chosen_at_machine;
    for (std::int64_t t = begin; t < end; ++t) {
      const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
      const AssignmentOutcome outcome = (algo == RoundingAlgorithm::kNegativeCorrelation)
                                            ? negsched::round(b, trial_seed)
                                            : independent_round(b, trial_seed);
      for (int e : outcome.chosen_edge) ++acc.edge_count[e];
      if (want_pairs) {
        for (int u = 0; u < b.machines; ++u) {
          chosen_at_machine.clear();
          for (int e : outcome.chosen_edge)
            if (b.edges[e].machine == u) chosen_at_machine.push_back(px.pos_of_edge[e]);
          std::sort(chosen_at_machine.begin(), chosen_at_machine.end());
          for (std::size_t a = 0; a < chosen_at_machine.size(); ++a)
            for (std::size_t d = a + 1; d < chosen_at_machine.size(); ++d)
              ++acc.pair_count[px.index(b, u, chosen_at_machine[a], chosen_at_machine[d])];
        }
      }
      double cost = 0.0;
      for (int i = 0; i < ctx.inst->machines; ++i) {
        const MachineView& v = ctx.views[i];
        double running = 0.0;  // sum of p over assigned jobs so far
        double lhs = 0.0;      // sum of p_j X_j (p_1 X_1 + ... + p_j X_j)
        for (int pos = 0; pos < v.size(); ++pos) {
          if (outcome.machine_of_job[v.job[pos]] == i) {
            running += v.p[pos];
            lhs += v.p[pos] * running;
            cost += v.w[pos] * running;
          }
          if (want_prefix) {
            const int slot = ctx.slot_base[i] + pos;
            acc.prefix_sum[slot] += lhs;
            acc.prefix_sumsq[slot] += lhs * lhs;
          }
        }
      }
      acc.cost_sum += cost;
      acc.cost_sumsq += cost * cost;
    }
  });

  TrialSums sums;
  sums.trials = trials;
  sums.edge_count.assign(b.edge_count(), 0);
  if (want_pairs) sums.pair_count.assign(px.total, 0);
  if (want_prefix) {
    sums.prefix_sum.assign(ctx.total_slots, 0.0);
    sums.prefix_sumsq.assign(ctx.total_slots, 0.0);
  }
  for (const ChunkAccum& acc : chunks) {
    sums.cost_sum += acc.cost_sum;
    sums.cost_sumsq += acc.cost_sumsq;
    for (std::size_t k = 0; k < acc.edge_count.size(); ++k) sums.edge_count[k] += acc.edge_count[k];
    for (std::size_t k = 0; k < acc.pair_count.size(); ++k) sums.pair_count[k] += acc.pair_count[k];
    for (std::size_t k = 0; k < acc.prefix_sum.size(); ++k) {
      sums.prefix_sum[k] += acc.prefix_sum[k];
      sums.prefix_sumsq[k] += acc.prefix_sumsq[k];
    }
  }
  return sums;
}

inline double binomial_stderr(double p, std::int64_t n) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

inline double mean_stderr(double sum, double sumsq, std::int64_t n) {
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(sumsq / static_cast<double>(n) - mean * mean, 0.0);
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Correlation report
// ---------------------------------------------------------------------------

struct EdgeStat {
  int edge = 0;
  int machine = 0, job = 0;
  double y = 0.0;
  std::uint64_t count = 0;
  double freq = 0.0;
  double stderr_est = 0.0;
  bool marginal_flag = false;  // |freq - y| > 4 sqrt(y (1-y) / N)
};

struct PairStat {
  int e1 = 0, e2 = 0;
  bool same_group = false;
  std::uint64_t count = 0;
  double joint = 0.0;
  double stderr_est = 0.0;
  double product = 0.0;  // y_e1 * y_e2
  bool violation_weak = false;
  bool violation_strong = false;
};

struct CorrelationReport {
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  RoundingAlgorithm algorithm = RoundingAlgorithm::kNegativeCorrelation;
  std::vector<EdgeStat> edges;
  std::vector<PairStat> pairs;
  int marginal_flags = 0;
  int weak_violations = 0;
  int strong_violations = 0;
};

inline CorrelationReport estimate_correlations(const BipartiteRoundingInstance& b,
                                               std::int64_t trials, std::uint64_t seed,
                                               RoundingAlgorithm algo, int threads = 1,
                                               const Instance* inst = nullptr) {
  if (trials < 1000)
    throw std::invalid_argument("estimate_correlations: need at least 1000 trials");
  // correlation statistics do not need cost/prefix context; build a minimal one
  Instance dummy;
  const Instance* inst_ptr = inst;
  if (inst_ptr == nullptr) {
    dummy = Instance(b.machines, b.jobs);
    for (const RoundingEdge& e : b.edges) dummy.ptime(e.machine, e.job) = 1.0;
    for (int j = 0; j < b.jobs; ++j) dummy.weights[j] = 1.0;
    inst_ptr = &dummy;
  }
  const detail::TrialContext ctx = detail::TrialContext::build(*inst_ptr, b);
  const detail::TrialSums sums =
      detail::run_trials(ctx, trials, seed, algo, threads, /*want_pairs=*/true,
                         /*want_prefix=*/false);
  const detail::PairIndexer px = detail::PairIndexer::build(b);

  CorrelationReport rep;
  rep.trials = trials;
  rep.seed = seed;
  rep.algorithm = algo;
  const double n = static_cast<double>(trials);
  for (int e = 0; e < b.edge_count(); ++e) {
    EdgeStat es;
    es.edge = e;
    es.machine = b.edges[e].machine;
    es.job = b.edges[e].job;
    es.y = b.edges[e].y;
    es.count = sums.edge_count[e];
    es.freq = es.count / n;
    es.stderr_est = detail::binomial_stderr(es.freq, trials);
    const double band = kFlagSigmas * detail::binomial_stderr(es.y, trials);
    es.marginal_flag = std::abs(es.freq - es.y) > band;
    if (es.marginal_flag) ++rep.marginal_flags;
    rep.edges.push_back(es);
  }
  for (int u = 0; u < b.machines; ++u) {
    const auto& medges = b.edges_of_machine[u];
    for (std::size_t a = 0; a < medges.size(); ++a)
      for (std::size_t c = a + 1; c < medges.size(); ++c) {
        PairStat ps;
        ps.e1 = medges[a];
        ps.e2 = medges[c];
        ps.same_group = b.group_of_edge[ps.e1] >= 0 &&
                        b.group_of_edge[ps.e1] == b.group_of_edge[ps.e2];
        ps.count = sums.pair_count[px.index(b, u, static_cast<int>(a), static_cast<int>(c))];
        ps.joint = ps.count / n;
        ps.stderr_est = detail::binomial_stderr(ps.joint, trials);
        ps.product = b.edges[ps.e1].y * b.edges[ps.e2].y;
        const double slack = kFlagSigmas * ps.stderr_est;
        ps.violation_weak = ps.joint > ps.product + slack;
        ps.violation_strong = ps.same_group && ps.joint > (1.0 - kZeta) * ps.product + slack;
        if (ps.violation_weak) ++rep.weak_violations;
        if (ps.violation_strong) ++rep.strong_violations;
        rep.pairs.push_back(ps);
      }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Expected costs
// ---------------------------------------------------------------------------

// Exact expectation of the schedule cost under independent rounding of x:
// sum_i sum_j w_j p_ij x_ij + sum_i sum_j w_j x_ij * sum_{j' before j} p_ij' x_ij'.
inline double expected_cost_independent(const Instance& inst, const FractionalAssignment& x) {
  double total = 0.0;
  for (int i = 0; i < inst.machines; ++i) {
    const MachineView v = machine_view(inst, x, i);
    double prefix_px = 0.0;
    for (int t = 0; t < v.size(); ++t) {
      total += v.w[t] * v.x[t] * (v.p[t] + prefix_px);
      prefix_px += v.p[t] * v.x[t];
    }
  }
  return total;
}

struct MonteCarloCost {
  std::int64_t trials = 0;
  double mean = 0.0;
  double stderr_est = 0.0;
  double ci95 = 0.0;
};

inline MonteCarloCost expected_cost_monte_carlo(const Instance& inst,
                                                const BipartiteRoundingInstance& b,
                                                std::int64_t trials, std::uint64_t seed,
                                                RoundingAlgorithm algo, int threads = 1) {
  if (trials < 1) throw std::invalid_argument("expected_cost_monte_carlo: trials must be >= 1");
  const detail::TrialContext ctx = detail::TrialContext::build(inst, b);
  const detail::TrialSums sums =
      detail::run_trials(ctx, trials, seed, algo, threads, false, false);
  MonteCarloCost out;
  out.trials = trials;
  out.mean = sums.cost_sum / static_cast<double>(trials);
  out.stderr_est = detail::mean_stderr(sums.cost_sum, sums.cost_sumsq, trials);
  out.ci95 = 1.96 * out.stderr_est;
  return out;
}

// ---------------------------------------------------------------------------
// Prefix inequality and upper-bound audits
// ---------------------------------------------------------------------------

struct PrefixMarginRow {
  int machine = 0;
  int prefix = 0;  // number of leading Smith-order jobs covered
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  double reference = 0.0;  // SDP prefix expression / Lemma bound components
  double bound = 0.0;      // value the Monte Carlo mean must stay below
  double margin = 0.0;     // bound - mc_mean
  bool violation = false;  // margin < -4 sigma
};

// Monte Carlo check of E[sum_{j<=n'} p_j X_j (p_1 X_1 + ... + p_j X_j)]
// <= (3/2 - c) * [SDP prefix expression] for every machine and prefix.
inline std::vector<PrefixMarginRow> prefix_inequality_report(
    const Instance& inst, const SdpSolution& sol, const BipartiteRoundingInstance& b,
    std::int64_t trials, std::uint64_t seed,
    RoundingAlgorithm algo = RoundingAlgorithm::kNegativeCorrelation, int threads = 1) {
  if (trials < 1000)
    throw std::invalid_argument("prefix_inequality_report: need at least 1000 trials");
  const detail::TrialContext ctx = detail::TrialContext::build(inst, b);
  const detail::TrialSums sums = detail::run_trials(ctx, trials, seed, algo, threads, false, true);
  std::vector<PrefixMarginRow> rows;
  const double factor = 1.5 - kTheoremConstant;
  for (int i = 0; i < inst.machines; ++i) {
    const std::vector<double> sdp_prefix = machine_prefix_objectives(inst, sol, i);
    const MachineView& v = ctx.views[i];
    for (int t = 0; t < v.size(); ++t) {
      PrefixMarginRow row;
      row.machine = i;
      row.prefix = t + 1;
      const int slot = ctx.slot_base[i] + t;
      row.mc_mean = sums.prefix_sum[slot] / static_cast<double>(trials);
      row.mc_stderr = detail::mean_stderr(sums.prefix_sum[slot], sums.prefix_sumsq[slot], trials);
      row.reference = sdp_prefix[t];
      row.bound = factor * sdp_prefix[t];
      row.margin = row.bound - row.mc_mean;
      row.violation = row.margin < -kFlagSigmas * row.mc_stderr;
      rows.push_back(row);
    }
  }
  return rows;
}

// Monte Carlo check of the grouped-gain upper bound
// E[prefix LHS] <= (1 - zeta/200) Q + (zeta/200) Qbar + L^2 / 2,
// with Q, L over the prefix and Qbar over its ungrouped jobs (a job counts as
// grouped once its whole group fits inside the prefix).
inline std::vector<PrefixMarginRow> upper_bound_audit(
    const Instance& inst, const SdpSolution& sol, const BipartiteRoundingInstance& b,
    std::int64_t trials, std::uint64_t seed,
    RoundingAlgorithm algo = RoundingAlgorithm::kNegativeCorrelation, int threads = 1) {
  (void)sol;  // bound uses the rounding marginals; sol fixes the pipeline signature
  if (trials < 1000) throw std::invalid_argument("upper_bound_audit: need at least 1000 trials");
  const detail::TrialContext ctx = detail::TrialContext::build(inst, b);
  const detail::TrialSums sums = detail::run_trials(ctx, trials, seed, algo, threads, false, true);
  const auto groups = job_groups(b);
  std::vector<PrefixMarginRow> rows;
  for (int i = 0; i < inst.machines; ++i) {
    const MachineView& v = ctx.views[i];
    std::vector<int> pos_of_job(inst.jobs, -1);
    for (int t = 0; t < v.size(); ++t) pos_of_job[v.job[t]] = t;
    // last Smith position of each group; the group counts once the prefix
    // reaches it
    std::vector<std::pair<int, const std::vector<int>*>> group_ends;
    for (const auto& g : groups[i]) {
      int worst = -1;
      bool usable = true;
      for (int j : g) {
        if (pos_of_job[j] < 0) usable = false;
        worst = std::max(worst, pos_of_job[j]);
      }
      if (usable) group_ends.emplace_back(worst, &g);
    }
    std::vector<char> grouped(inst.jobs, 0);
    double q = 0.0, l = 0.0, q_grouped = 0.0;
    for (int t = 0; t < v.size(); ++t) {
      q += v.x[t] * v.p[t] * v.p[t];
      l += v.x[t] * v.p[t];
      for (const auto& [end, g] : group_ends)
        if (end == t)
          for (int j : *g) {
            grouped[j] = 1;
            const int pj = pos_of_job[j];
            q_grouped += v.x[pj] * v.p[pj] * v.p[pj];
          }
      PrefixMarginRow row;
      row.machine = i;
      row.prefix = t + 1;
      const int slot = ctx.slot_base[i] + t;
      row.mc_mean = sums.prefix_sum[slot] / static_cast<double>(trials);
      row.mc_stderr = detail::mean_stderr(sums.prefix_sum[slot], sums.prefix_sumsq[slot], trials);
      const double q_ungrouped = q - q_grouped;
      row.reference = q;
      row.bound = (1.0 - kZeta / 200.0) * q + (kZeta / 200.0) * q_ungrouped + 0.5 * l * l;
      row.margin = row.bound - row.mc_mean;
      row.violation = row.margin < -kFlagSigmas * row.mc_stderr;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Combined verification (the `verify` command)
// ---------------------------------------------------------------------------

struct RatioReport {
  double sdp_value = 0.0;
  std::optional<double> brute_force_value;
  MonteCarloCost cost;
  double lb_empty_total = 0.0;
  double lb_full_total = 0.0;
  double lb_grouped_total = 0.0;
  std::optional<double> ratio_vs_lb_empty, ratio_vs_lb_full, ratio_vs_lb_grouped;
  std::optional<double> ratio_vs_optimum;
  std::vector<PrefixMarginRow> prefix_rows;
  std::vector<PrefixMarginRow> upper_rows;
};

struct VerifyResult {
  CorrelationReport correlations;
  RatioReport ratios;
  int total_violations = 0;
};

// Aggregates the per-machine, per-prefix lower bounds into instance-level
// bounds through the telescoped objective identity.
inline void aggregate_lower_bounds(const Instance& inst, const SdpSolution& sol,
                                   const std::vector<std::vector<std::vector<int>>>& groups,
                                   RatioReport& out) {
  for (int i = 0; i < inst.machines; ++i) {
    const MachineView v = machine_view(inst, sol.x, i);
    for (int t = 0; t < v.size(); ++t) {
      const double beta_next = (t + 1 < v.size()) ? v.beta[t + 1] : 0.0;
      const double coef = v.beta[t] - beta_next;
      const CorollaryBounds cb = corollary_bounds(inst, sol, i, t + 1, groups[i]);
      out.lb_empty_total += coef * cb.lb_empty;
      out.lb_full_total += coef * cb.lb_full;
      out.lb_grouped_total += coef * cb.lb_grouped;
    }
  }
}

inline VerifyResult run_verification(const Instance& inst, const SdpSolution& sol,
                                     std::int64_t trials, std::uint64_t seed,
                                     RoundingAlgorithm algo, int threads = 1,
                                     std::uint64_t oracle_cap = kDefaultBruteForceCap) {
  const auto [scaled, factor] = scale_to_unit_min_ptime(inst);
  const BipartiteRoundingInstance b = build_groups(scaled, sol.x);

  VerifyResult res;
  res.correlations = estimate_correlations(b, trials, seed, algo, threads, &inst);
  res.ratios.sdp_value = sol.objective;
  res.ratios.cost = expected_cost_monte_carlo(inst, b, trials, seed, algo, threads);
  res.ratios.prefix_rows = prefix_inequality_report(inst, sol, b, trials, seed, algo, threads);
  res.ratios.upper_rows = upper_bound_audit(inst, sol, b, trials, seed, algo, threads);
  if (feasible_assignment_count(inst, oracle_cap) <= oracle_cap) {
    res.ratios.brute_force_value = brute_force_opt(inst, oracle_cap).cost;
    if (*res.ratios.brute_force_value > 0.0)
      res.ratios.ratio_vs_optimum = res.ratios.cost.mean / *res.ratios.brute_force_value;
  }
  aggregate_lower_bounds(inst, sol, job_groups(b), res.ratios);
  if (res.ratios.lb_empty_total > 0.0)
    res.ratios.ratio_vs_lb_empty = res.ratios.cost.mean / res.ratios.lb_empty_total;
  if (res.ratios.lb_full_total > 0.0)
    res.ratios.ratio_vs_lb_full = res.ratios.cost.mean / res.ratios.lb_full_total;
  if (res.ratios.lb_grouped_total > 0.0)
    res.ratios.ratio_vs_lb_grouped = res.ratios.cost.mean / res.ratios.lb_grouped_total;

  res.total_violations = res.correlations.marginal_flags + res.correlations.weak_violations +
                         res.correlations.strong_violations;
  for (const auto& r : res.ratios.prefix_rows) res.total_violations += r.violation ? 1 : 0;
  for (const auto& r : res.ratios.upper_rows) res.total_violations += r.violation ? 1 : 0;
  return res;
}

}  // namespace negsched
