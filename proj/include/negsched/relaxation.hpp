#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "negsched/instance.hpp"
#include "negsched/linalg.hpp"

// Shared types for the convex relaxations: fractional assignments, per-machine
// moment matrices, and the objective evaluators (direct, telescoped and
// per-prefix forms).

namespace negsched {

inline constexpr double kFeasTol = 1e-8;  // assignment / linking tolerance
inline constexpr double kPsdTol = 1e-6;   // minimum-eigenvalue tolerance

struct FractionalAssignment {
  int machines = 0;
  int jobs = 0;
  std::vector<double> x;  // [machines * jobs], zero on forbidden pairs

  FractionalAssignment() = default;
  FractionalAssignment(int m, int n)
      : machines(m), jobs(n), x(static_cast<std::size_t>(m) * n, 0.0) {}

  double at(int i, int j) const { return x[static_cast<std::size_t>(i) * jobs + j]; }
  double& at(int i, int j) { return x[static_cast<std::size_t>(i) * jobs + j]; }

  // Column sums = 1 per job, entries in [-tol, ...] clamped to >= 0, zero on
  // forbidden pairs.
  void validate(const Instance& inst, double tol = kFeasTol) {
    if (machines != inst.machines || jobs != inst.jobs)
      throw std::invalid_argument("fractional assignment: dimension mismatch");
    for (int i = 0; i < machines; ++i)
      for (int j = 0; j < jobs; ++j) {
        double& v = at(i, j);
        if (!inst.allowed(i, j) && v != 0.0)
          throw std::invalid_argument("fractional assignment: mass on a forbidden pair");
        if (v < -tol) throw std::invalid_argument("fractional assignment: negative entry");
        if (v < 0.0) v = 0.0;
      }
    for (int j = 0; j < jobs; ++j) {
      double s = 0.0;
      for (int i = 0; i < machines; ++i) s += at(i, j);
      if (std::abs(s - 1.0) > tol)
        throw std::invalid_argument("fractional assignment: job mass != 1");
    }
  }
};

// Moment matrix of one machine: rows/columns indexed by {empty set} followed
// by the n jobs; entry (S, T) holds the lifted variable x_{S union T}.
// Rows/columns of forbidden pairs are identically zero.
struct MomentMatrix {
  int machine = 0;
  SymMatrix entries;  // (jobs + 1) x (jobs + 1)

  double at(int r, int c) const { return entries.at(r, c); }
};

struct SolverStats {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double rho_final = 0.0;
  bool converged = false;
};

struct SdpSolution {
  FractionalAssignment x;
  std::vector<MomentMatrix> moments;  // one per machine
  double objective = 0.0;
  SolverStats stats;
};

// Per-machine view used by the objective evaluators, the lower bounds and
// the verification reports: the machine's allowed positive-time jobs in
// Smith order with their p, w, beta = w/p and x values.  Zero-time jobs are
// skipped; they contribute nothing to any of these quantities.
struct MachineView {
  int machine = 0;
  std::vector<int> job;  // Smith order
  std::vector<double> p, w, beta, x;

  int size() const { return static_cast<int>(job.size()); }
};

inline MachineView machine_view(const Instance& inst, const FractionalAssignment& x, int i) {
  MachineView v;
  v.machine = i;
  for (int j : smith_order(inst, i).order) {
    const double p = inst.ptime(i, j);
    if (p == 0.0) continue;
    v.job.push_back(j);
    v.p.push_back(p);
    v.w.push_back(inst.weights[j]);
    v.beta.push_back(inst.weights[j] / p);
    v.x.push_back(x.at(i, j));
  }
  return v;
}

// Objective contribution of machine i evaluated directly from the moments:
// sum_j w_j * sum_{j' <= j in Smith order} p_{ij'} * X[{ij}, {ij'}].
inline double machine_objective(const Instance& inst, const SdpSolution& sol, int i) {
  const MachineView v = machine_view(inst, sol.x, i);
  const SymMatrix& m = sol.moments[i].entries;
  double total = 0.0;
  for (int b = 0; b < v.size(); ++b) {
    double inner = 0.0;
    for (int a = 0; a <= b; ++a) inner += v.p[a] * m.at(v.job[b] + 1, v.job[a] + 1);
    total += v.w[b] * inner;
  }
  return total;
}

inline double sdp_objective(const Instance& inst, const SdpSolution& sol) {
  if (static_cast<int>(sol.moments.size()) != inst.machines)
    throw std::invalid_argument("sdp_objective: moment count != machine count");
  double total = 0.0;
  for (int i = 0; i < inst.machines; ++i) total += machine_objective(inst, sol, i);
  return total;
}

// Prefix expressions sum_{j<=n'} p_j (p_1 X[j,1] + ... + p_j X[j,j]) for
// every prefix n' of machine i's Smith order (positive-time jobs).
inline std::vector<double> machine_prefix_objectives(const Instance& inst, const SdpSolution& sol,
                                                     int i) {
  const MachineView v = machine_view(inst, sol.x, i);
  const SymMatrix& m = sol.moments[i].entries;
  std::vector<double> out(v.size());
  double acc = 0.0;
  for (int b = 0; b < v.size(); ++b) {
    double inner = 0.0;
    for (int a = 0; a <= b; ++a) inner += v.p[a] * m.at(v.job[b] + 1, v.job[a] + 1);
    acc += v.p[b] * inner;
    out[b] = acc;
  }
  return out;
}

// Same machine objective through the telescoped identity
// sum_{n'} (beta_{n'} - beta_{n'+1}) * prefixExpr(n'), with beta past the end
// defined as 0.  Agrees with machine_objective up to floating-point noise.
inline double machine_objective_telescoped(const Instance& inst, const SdpSolution& sol, int i) {
  const MachineView v = machine_view(inst, sol.x, i);
  const std::vector<double> prefix = machine_prefix_objectives(inst, sol, i);
  double total = 0.0;
  for (int t = 0; t < v.size(); ++t) {
    const double beta_next = (t + 1 < v.size()) ? v.beta[t + 1] : 0.0;
    total += (v.beta[t] - beta_next) * prefix[t];
  }
  return total;
}

inline double sdp_objective_telescoped(const Instance& inst, const SdpSolution& sol) {
  double total = 0.0;
  for (int i = 0; i < inst.machines; ++i) total += machine_objective_telescoped(inst, sol, i);
  return total;
}

// Rank-one moments z z^T with z = (1, x_i1, ..., x_in) for an integral
// schedule; exact witness that the relaxation extends the integral program.
inline SdpSolution moment_from_integral(const Instance& inst, const Schedule& s) {
  if (!s.feasible(inst)) throw std::invalid_argument("moment_from_integral: infeasible schedule");
  SdpSolution sol;
  sol.x = FractionalAssignment(inst.machines, inst.jobs);
  for (int j = 0; j < inst.jobs; ++j) sol.x.at(s.assignment[j], j) = 1.0;
  sol.moments.resize(inst.machines);
  for (int i = 0; i < inst.machines; ++i) {
    sol.moments[i].machine = i;
    SymMatrix m(inst.jobs + 1);
    std::vector<double> z(inst.jobs + 1, 0.0);
    z[0] = 1.0;
    for (int j = 0; j < inst.jobs; ++j) z[j + 1] = sol.x.at(i, j);
    for (int r = 0; r <= inst.jobs; ++r)
      for (int c = 0; c <= inst.jobs; ++c) m.at(r, c) = z[r] * z[c];
    sol.moments[i].entries = std::move(m);
  }
  sol.objective = schedule_cost(inst, s);
  sol.stats.converged = true;
  return sol;
}

// Product-measure moments for a fractional assignment: diagonal and first
// row/column carry x, off-diagonal entries are x_j * x_j'.  Feasible for the
// relaxation (it is z z^T plus the nonnegative diagonal x - x^2) and used as
// the solver's starting point.
inline SdpSolution product_solution(const Instance& inst, const FractionalAssignment& x) {
  SdpSolution sol;
  sol.x = x;
  sol.moments.resize(inst.machines);
  for (int i = 0; i < inst.machines; ++i) {
    sol.moments[i].machine = i;
    SymMatrix m(inst.jobs + 1);
    m.at(0, 0) = 1.0;
    for (int j = 0; j < inst.jobs; ++j) {
      if (!inst.allowed(i, j)) continue;
      const double xj = x.at(i, j);
      m.at(0, j + 1) = xj;
      m.at(j + 1, 0) = xj;
      m.at(j + 1, j + 1) = xj;
      for (int j2 = j + 1; j2 < inst.jobs; ++j2) {
        if (!inst.allowed(i, j2)) continue;
        const double v = xj * x.at(i, j2);
        m.at(j + 1, j2 + 1) = v;
        m.at(j2 + 1, j + 1) = v;
      }
    }
    sol.moments[i].entries = std::move(m);
  }
  sol.objective = sdp_objective(inst, sol);
  return sol;
}

struct SolutionAudit {
  bool ok = true;
  double max_assignment_error = 0.0;  // | sum_i x_ij - 1 |
  double max_linking_error = 0.0;     // | X[0,j] - X[j,j] | and | x_ij - X[j,j] |
  double min_moment_entry = 0.0;
  double min_eigenvalue = 0.0;
  double x_empty_error = 0.0;  // | X[0,0] - 1 |
};

// Feasibility audit of a returned solution: PSD blocks, linking constraints,
// unit job masses, entrywise nonnegativity, zero rows on forbidden pairs.
inline SolutionAudit audit_solution(const Instance& inst, const SdpSolution& sol,
                                    double feas_tol = kFeasTol, double psd_tol = kPsdTol) {
  SolutionAudit audit;
  for (int j = 0; j < inst.jobs; ++j) {
    double s = 0.0;
    for (int i = 0; i < inst.machines; ++i) s += sol.x.at(i, j);
    audit.max_assignment_error = std::max(audit.max_assignment_error, std::abs(s - 1.0));
  }
  double min_eig = 0.0;
  for (int i = 0; i < inst.machines; ++i) {
    const SymMatrix& m = sol.moments[i].entries;
    audit.x_empty_error = std::max(audit.x_empty_error, std::abs(m.at(0, 0) - 1.0));
    for (int j = 0; j < inst.jobs; ++j) {
      if (!inst.allowed(i, j)) {
        for (int c = 0; c <= inst.jobs; ++c) {
          audit.max_linking_error =
              std::max({audit.max_linking_error, std::abs(m.at(j + 1, c)), std::abs(m.at(c, j + 1))});
        }
        continue;
      }
      audit.max_linking_error =
          std::max(audit.max_linking_error, std::abs(m.at(0, j + 1) - m.at(j + 1, j + 1)));
      audit.max_linking_error =
          std::max(audit.max_linking_error, std::abs(sol.x.at(i, j) - m.at(j + 1, j + 1)));
    }
    for (double v : m.a) audit.min_moment_entry = std::min(audit.min_moment_entry, v);
    const PsdCheck psd = check_psd(m, psd_tol);
    min_eig = std::min(min_eig, psd.min_eigenvalue);
  }
  audit.min_eigenvalue = min_eig;
  audit.ok = audit.max_assignment_error <= feas_tol && audit.max_linking_error <= feas_tol &&
             audit.min_moment_entry >= -feas_tol && audit.min_eigenvalue >= -psd_tol &&
             audit.x_empty_error <= feas_tol;
  return audit;
}

}  // namespace negsched
