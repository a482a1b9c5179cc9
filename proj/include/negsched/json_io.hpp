#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "negsched/instance.hpp"
#include "negsched/relaxation.hpp"
#include "negsched/cp_solver.hpp"
#include "negsched/rounding.hpp"
#include "negsched/verification.hpp"

// JSON serialization for the on-disk formats: instances, relaxation
// solutions, schedules, rounding instances, trace logs and verification
// reports.  Key order is fixed (ordered_json) and numbers that hold integers
// are emitted as integers, so identical inputs always produce byte-identical
// files.

namespace negsched {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json json_number(double v) {
  if (std::floor(v) == v && std::abs(v) < 9.0e15) return static_cast<long long>(v);
  return v;
}

inline void require_keys(const Json& j, std::initializer_list<const char*> required,
                         const std::string& what) {
  for (const char* k : required)
    if (!j.contains(k)) throw std::invalid_argument(what + ": missing key '" + k + "'");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : required)
      if (it.key() == k) known = true;
    if (!known) throw std::invalid_argument(what + ": unknown key '" + it.key() + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instance
// ---------------------------------------------------------------------------

inline Json instance_to_json(const Instance& inst) {
  Json j;
  j["machines"] = inst.machines;
  j["jobs"] = inst.jobs;
  Json weights = Json::array();
  for (double w : inst.weights) weights.push_back(detail::json_number(w));
  j["weights"] = std::move(weights);
  Json rows = Json::array();
  for (int i = 0; i < inst.machines; ++i) {
    Json row = Json::array();
    for (int jj = 0; jj < inst.jobs; ++jj) {
      if (inst.allowed(i, jj))
        row.push_back(detail::json_number(inst.ptime(i, jj)));
      else
        row.push_back(nullptr);
    }
    rows.push_back(std::move(row));
  }
  j["ptimes"] = std::move(rows);
  return j;
}

inline Instance instance_from_json(const Json& j) {
  detail::require_keys(j, {"machines", "jobs", "weights", "ptimes"}, "instance");
  Instance inst(j.at("machines").get<int>(), j.at("jobs").get<int>());
  const Json& weights = j.at("weights");
  if (!weights.is_array() || static_cast<int>(weights.size()) != inst.jobs)
    throw std::invalid_argument("instance: weights must be an array of length jobs");
  for (int jj = 0; jj < inst.jobs; ++jj) inst.weights[jj] = weights[jj].get<double>();
  const Json& rows = j.at("ptimes");
  if (!rows.is_array() || static_cast<int>(rows.size()) != inst.machines)
    throw std::invalid_argument("instance: ptimes must have one row per machine");
  for (int i = 0; i < inst.machines; ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != inst.jobs)
      throw std::invalid_argument("instance: ptimes row has wrong length");
    for (int jj = 0; jj < inst.jobs; ++jj)
      inst.ptime(i, jj) = row[jj].is_null() ? kForbidden : row[jj].get<double>();
  }
  inst.validate();
  return inst;
}

// ---------------------------------------------------------------------------
// Schedule
// ---------------------------------------------------------------------------

inline Json schedule_to_json(const Schedule& s, std::optional<double> cost = std::nullopt) {
  Json j;
  j["assignment"] = s.assignment;
  if (cost) j["cost"] = detail::json_number(*cost);
  return j;
}

inline Schedule schedule_from_json(const Json& j) {
  if (!j.contains("assignment"))
    throw std::invalid_argument("schedule: missing key 'assignment'");
  Schedule s;
  s.assignment = j.at("assignment").get<std::vector<int>>();
  return s;
}

// ---------------------------------------------------------------------------
// Relaxation solutions
// ---------------------------------------------------------------------------

inline Json fractional_to_json(const FractionalAssignment& x) {
  Json rows = Json::array();
  for (int i = 0; i < x.machines; ++i) {
    Json row = Json::array();
    for (int j = 0; j < x.jobs; ++j) row.push_back(x.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline FractionalAssignment fractional_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::invalid_argument("solution: x must be a matrix");
  FractionalAssignment x(static_cast<int>(j.size()), static_cast<int>(j[0].size()));
  for (int i = 0; i < x.machines; ++i) {
    if (static_cast<int>(j[i].size()) != x.jobs)
      throw std::invalid_argument("solution: ragged x matrix");
    for (int jj = 0; jj < x.jobs; ++jj) x.at(i, jj) = j[i][jj].get<double>();
  }
  return x;
}

inline Json sdp_solution_to_json(const SdpSolution& sol) {
  Json j;
  j["type"] = "sdp";
  j["machines"] = sol.x.machines;
  j["jobs"] = sol.x.jobs;
  j["objective"] = sol.objective;
  j["converged"] = sol.stats.converged;
  j["iterations"] = sol.stats.iterations;
  j["primal_residual"] = sol.stats.primal_residual;
  j["dual_residual"] = sol.stats.dual_residual;
  j["x"] = fractional_to_json(sol.x);
  Json moments = Json::array();
  for (const MomentMatrix& m : sol.moments) {
    Json mat = Json::array();
    for (int r = 0; r < m.entries.dim; ++r) {
      Json row = Json::array();
      for (int c = 0; c < m.entries.dim; ++c) row.push_back(m.entries.at(r, c));
      mat.push_back(std::move(row));
    }
    moments.push_back(std::move(mat));
  }
  j["moments"] = std::move(moments);
  return j;
}

inline SdpSolution sdp_solution_from_json(const Json& j) {
  for (const char* key : {"type", "x", "moments", "objective"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("solution: missing key '") + key + "'");
  if (j.at("type").get<std::string>() != "sdp")
    throw std::invalid_argument("solution: expected type 'sdp'");
  SdpSolution sol;
  sol.x = fractional_from_json(j.at("x"));
  const Json& moments = j.at("moments");
  if (static_cast<int>(moments.size()) != sol.x.machines)
    throw std::invalid_argument("solution: moment count != machine count");
  for (int i = 0; i < sol.x.machines; ++i) {
    MomentMatrix m;
    m.machine = i;
    const Json& mat = moments[i];
    const int dim = static_cast<int>(mat.size());
    if (dim != sol.x.jobs + 1)
      throw std::invalid_argument("solution: moment matrix has wrong dimension");
    m.entries = SymMatrix(dim);
    for (int r = 0; r < dim; ++r) {
      if (static_cast<int>(mat[r].size()) != dim)
        throw std::invalid_argument("solution: ragged moment matrix");
      for (int c = 0; c < dim; ++c) m.entries.at(r, c) = mat[r][c].get<double>();
    }
    sol.moments.push_back(std::move(m));
  }
  sol.objective = j.at("objective").get<double>();
  if (j.contains("converged")) sol.stats.converged = j.at("converged").get<bool>();
  if (j.contains("iterations")) sol.stats.iterations = j.at("iterations").get<int>();
  return sol;
}

inline Json cp_solution_to_json(const CpSolution& sol) {
  Json j;
  j["type"] = "cp";
  j["machines"] = sol.x.machines;
  j["jobs"] = sol.x.jobs;
  j["objective"] = sol.objective;
  j["converged"] = sol.converged;
  j["iterations"] = sol.iterations;
  j["x"] = fractional_to_json(sol.x);
  return j;
}

// Fractional assignment from any solution file (sdp or cp).
inline FractionalAssignment assignment_from_solution_json(const Json& j) {
  if (!j.contains("x")) throw std::invalid_argument("solution: missing key 'x'");
  return fractional_from_json(j.at("x"));
}

// ---------------------------------------------------------------------------
// Rounding instance and trace
// ---------------------------------------------------------------------------

inline Json rounding_instance_to_json(const BipartiteRoundingInstance& b) {
  Json j;
  j["machines"] = b.machines;
  j["jobs"] = b.jobs;
  Json edges = Json::array();
  for (const RoundingEdge& e : b.edges) {
    Json je;
    je["machine"] = e.machine;
    je["job"] = e.job;
    je["y"] = e.y;
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  j["groups"] = b.groups;
  return j;
}

inline BipartiteRoundingInstance rounding_instance_from_json(const Json& j) {
  detail::require_keys(j, {"machines", "jobs", "edges", "groups"}, "rounding instance");
  std::vector<RoundingEdge> edges;
  for (const Json& je : j.at("edges"))
    edges.push_back({je.at("machine").get<int>(), je.at("job").get<int>(), je.at("y").get<double>()});
  auto groups = j.at("groups").get<std::vector<std::vector<std::vector<int>>>>();
  return make_rounding_instance(j.at("machines").get<int>(), j.at("jobs").get<int>(),
                                std::move(edges), std::move(groups));
}

// Trace as JSON-lines: one event per line, replayable in order.
inline std::string trace_to_json_lines(const RoundingRun& run) {
  std::ostringstream out;
  for (const Phase1Pick& p : run.state.phase1_trace) {
    Json j;
    j["phase"] = 1;
    j["job"] = p.job;
    j["cells"] = p.cell_count;
    j["picked"] = p.picked;
    out << j.dump() << "\n";
  }
  for (const PipageEvent& e : run.state.phase2_trace) {
    Json j;
    j["phase"] = 2;
    j["machine"] = e.machine;
    j["group"] = e.group;
    j["tuple"] = {e.e1, e.e2, e.f1, e.f2};
    j["alpha"] = e.alpha;
    j["beta"] = e.beta;
    j["branch"] = e.beta_branch ? "beta" : "alpha";
    j["removed_from_r"] = e.removed_from_r;
    out << j.dump() << "\n";
  }
  Json j;
  j["phase"] = 3;
  j["chosen_edges"] = run.outcome.chosen_edge;
  out << j.dump() << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Verification reports
// ---------------------------------------------------------------------------

inline Json verify_result_to_json(const VerifyResult& res) {
  Json j;
  j["trials"] = res.correlations.trials;
  j["seed"] = res.correlations.seed;
  j["algorithm"] = to_string(res.correlations.algorithm);
  j["sdp_value"] = res.ratios.sdp_value;
  j["brute_force"] =
      res.ratios.brute_force_value ? Json(*res.ratios.brute_force_value) : Json(nullptr);
  j["mean_cost"] = res.ratios.cost.mean;
  j["ci95"] = res.ratios.cost.ci95;
  Json lbs;
  lbs["empty"] = res.ratios.lb_empty_total;
  lbs["full"] = res.ratios.lb_full_total;
  lbs["grouped"] = res.ratios.lb_grouped_total;
  j["lower_bounds"] = std::move(lbs);
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json ratios;
  ratios["vs_lb_empty"] = opt(res.ratios.ratio_vs_lb_empty);
  ratios["vs_lb_full"] = opt(res.ratios.ratio_vs_lb_full);
  ratios["vs_lb_grouped"] = opt(res.ratios.ratio_vs_lb_grouped);
  ratios["vs_optimum"] = opt(res.ratios.ratio_vs_optimum);
  j["ratios"] = std::move(ratios);
  Json violations;
  violations["marginal"] = res.correlations.marginal_flags;
  violations["weak"] = res.correlations.weak_violations;
  violations["strong"] = res.correlations.strong_violations;
  int prefix_v = 0, upper_v = 0;
  for (const auto& r : res.ratios.prefix_rows) prefix_v += r.violation ? 1 : 0;
  for (const auto& r : res.ratios.upper_rows) upper_v += r.violation ? 1 : 0;
  violations["prefix"] = prefix_v;
  violations["upper_bound"] = upper_v;
  violations["total"] = res.total_violations;
  j["violations"] = std::move(violations);

  Json edges = Json::array();
  for (const EdgeStat& e : res.correlations.edges) {
    Json je;
    je["edge"] = e.edge;
    je["machine"] = e.machine;
    je["job"] = e.job;
    je["y"] = e.y;
    je["freq"] = e.freq;
    je["stderr"] = e.stderr_est;
    je["flag"] = e.marginal_flag;
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  Json pairs = Json::array();
  for (const PairStat& p : res.correlations.pairs) {
    Json jp;
    jp["e1"] = p.e1;
    jp["e2"] = p.e2;
    jp["same_group"] = p.same_group;
    jp["joint"] = p.joint;
    jp["product"] = p.product;
    jp["stderr"] = p.stderr_est;
    jp["violation_weak"] = p.violation_weak;
    jp["violation_strong"] = p.violation_strong;
    pairs.push_back(std::move(jp));
  }
  j["pairs"] = std::move(pairs);
  auto margin_rows = [](const std::vector<PrefixMarginRow>& rows) {
    Json arr = Json::array();
    for (const PrefixMarginRow& r : rows) {
      Json jr;
      jr["machine"] = r.machine;
      jr["prefix"] = r.prefix;
      jr["mc_mean"] = r.mc_mean;
      jr["mc_stderr"] = r.mc_stderr;
      jr["bound"] = r.bound;
      jr["margin"] = r.margin;
      jr["violation"] = r.violation;
      arr.push_back(std::move(jr));
    }
    return arr;
  };
  j["prefix_margins"] = margin_rows(res.ratios.prefix_rows);
  j["upper_margins"] = margin_rows(res.ratios.upper_rows);
  return j;
}

inline std::string verify_result_to_table(const VerifyResult& res) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "verification (" << to_string(res.correlations.algorithm) << ", "
      << res.correlations.trials << " trials, seed " << res.correlations.seed << ")\n";
  out << "  sdp value      " << res.ratios.sdp_value << "\n";
  if (res.ratios.brute_force_value)
    out << "  optimum        " << *res.ratios.brute_force_value << "\n";
  out << "  mean cost      " << res.ratios.cost.mean << " +- " << res.ratios.cost.ci95
      << " (95% CI)\n";
  if (res.ratios.ratio_vs_optimum)
    out << "  cost / optimum " << *res.ratios.ratio_vs_optimum << "\n";
  out << "  lower bounds   empty " << res.ratios.lb_empty_total << "  full "
      << res.ratios.lb_full_total << "  grouped " << res.ratios.lb_grouped_total << "\n";
  int prefix_v = 0, upper_v = 0;
  for (const auto& r : res.ratios.prefix_rows) prefix_v += r.violation ? 1 : 0;
  for (const auto& r : res.ratios.upper_rows) upper_v += r.violation ? 1 : 0;
  out << "  violations     marginal " << res.correlations.marginal_flags << "  weak "
      << res.correlations.weak_violations << "  strong " << res.correlations.strong_violations
      << "  prefix " << prefix_v << "  upper " << upper_v << "\n";
  out << "  edge marginals (machine, job, y, freq)\n";
  for (const EdgeStat& e : res.correlations.edges)
    out << "    " << std::setw(3) << e.machine << " " << std::setw(3) << e.job << "  y=" << e.y
        << "  freq=" << e.freq << (e.marginal_flag ? "  FLAG" : "") << "\n";
  out << "  same-group pairs (e1, e2, joint, (1-zeta)*product)\n";
  for (const PairStat& p : res.correlations.pairs) {
    if (!p.same_group) continue;
    out << "    " << std::setw(3) << p.e1 << " " << std::setw(3) << p.e2 << "  joint=" << p.joint
        << "  bound=" << (1.0 - kZeta) * p.product << (p.violation_strong ? "  FLAG" : "")
        << "\n";
  }
  return out.str();
}

inline std::string verify_result_to_csv(const VerifyResult& res) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "kind,a,b,estimate,reference,bound,flag\n";
  for (const EdgeStat& e : res.correlations.edges)
    out << "edge," << e.machine << "," << e.job << "," << e.freq << "," << e.y << ","
        << "" << "," << (e.marginal_flag ? 1 : 0) << "\n";
  for (const PairStat& p : res.correlations.pairs)
    out << (p.same_group ? "pair_group," : "pair,") << p.e1 << "," << p.e2 << "," << p.joint << ","
        << p.product << "," << (p.same_group ? (1.0 - kZeta) * p.product : p.product) << ","
        << ((p.violation_weak || p.violation_strong) ? 1 : 0) << "\n";
  for (const PrefixMarginRow& r : res.ratios.prefix_rows)
    out << "prefix," << r.machine << "," << r.prefix << "," << r.mc_mean << "," << r.reference
        << "," << r.bound << "," << (r.violation ? 1 : 0) << "\n";
  for (const PrefixMarginRow& r : res.ratios.upper_rows)
    out << "upper," << r.machine << "," << r.prefix << "," << r.mc_mean << "," << r.reference
        << "," << r.bound << "," << (r.violation ? 1 : 0) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << contents;
}

inline Json parse_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
}

}  // namespace negsched
