#pragma once

#include <cmath>
#include <vector>

#include "negsched/instance.hpp"
#include "negsched/linalg.hpp"
#include "negsched/relaxation.hpp"

// The earlier convex relaxation: minimize max(c^T x, (c^T x + x^T D x) / 2)
// over the product of per-job simplices, where c^T x is the weighted
// processing mass and x^T D x the Smith-ordered quadratic term
//   sum_i sum_j w_j (2 sum_{j' before j} p_ij' x_ij' + p_ij x_ij) x_ij.
//
// Solved by projected subgradient with per-job Euclidean simplex projection;
// kept deliberately simple since the library only needs this relaxation to
// exhibit its 3/2 integrality gap.

namespace negsched {

struct CpSolverConfig {
  int max_iters = 50000;
  double tolerance = 1e-7;  // relative stall threshold on the best value
  int stall_window = 500;   // iterations without improvement before stopping
};

struct CpSolution {
  FractionalAssignment x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

struct CpWorkspace {
  std::vector<SmithOrder> orders;
  explicit CpWorkspace(const Instance& inst) {
    orders.reserve(inst.machines);
    for (int i = 0; i < inst.machines; ++i) orders.push_back(smith_order(inst, i));
  }
};

inline double cp_linear_term(const Instance& inst, const FractionalAssignment& x) {
  double s = 0.0;
  for (int i = 0; i < inst.machines; ++i)
    for (int j = 0; j < inst.jobs; ++j)
      if (inst.allowed(i, j)) s += inst.weights[j] * inst.ptime(i, j) * x.at(i, j);
  return s;
}

inline double cp_quadratic_term(const Instance& inst, const CpWorkspace& ws,
                                const FractionalAssignment& x) {
  double s = 0.0;
  for (int i = 0; i < inst.machines; ++i) {
    double prefix_px = 0.0;  // sum over jobs strictly before in Smith order
    for (int j : ws.orders[i].order) {
      const double xj = x.at(i, j);
      const double pj = inst.ptime(i, j);
      s += inst.weights[j] * (2.0 * prefix_px + pj * xj) * xj;
      prefix_px += pj * xj;
    }
  }
  return s;
}

}  // namespace detail

inline double cp_objective(const Instance& inst, const FractionalAssignment& x) {
  detail::CpWorkspace ws(inst);
  const double lin = detail::cp_linear_term(inst, x);
  const double quad = detail::cp_quadratic_term(inst, ws, x);
  return std::max(lin, 0.5 * lin + 0.5 * quad);
}

inline CpSolution solve_cp(const Instance& inst, const CpSolverConfig& cfg = {}) {
  inst.validate();
  detail::CpWorkspace ws(inst);

  FractionalAssignment x(inst.machines, inst.jobs);
  for (int j = 0; j < inst.jobs; ++j) {
    const auto machines_j = inst.allowed_machines(j);
    for (int i : machines_j) x.at(i, j) = 1.0 / static_cast<double>(machines_j.size());
  }

  auto objective = [&](const FractionalAssignment& p) {
    const double lin = detail::cp_linear_term(inst, p);
    const double quad = detail::cp_quadratic_term(inst, ws, p);
    return std::max(lin, 0.5 * lin + 0.5 * quad);
  };

  CpSolution best;
  best.x = x;
  best.objective = objective(x);

  FractionalAssignment avg = x;  // running sum of iterates
  std::vector<double> grad(x.x.size());
  std::vector<double> simplex;
  const double diameter = std::sqrt(2.0 * inst.jobs);

  double window_best = best.objective;
  int iter = 1;
  for (; iter <= cfg.max_iters; ++iter) {
    const double lin = detail::cp_linear_term(inst, x);
    const double quad = detail::cp_quadratic_term(inst, ws, x);
    const double val = std::max(lin, 0.5 * lin + 0.5 * quad);
    if (val < best.objective) {
      best.objective = val;
      best.x = x;
    }

    // Subgradient of the active piece.
    std::fill(grad.begin(), grad.end(), 0.0);
    const bool linear_active = lin >= 0.5 * lin + 0.5 * quad;
    for (int i = 0; i < inst.machines; ++i) {
      // suffix sums of w x over jobs strictly after k in Smith order
      const auto& order = ws.orders[i].order;
      double suffix_wx = 0.0;
      std::vector<double> suffix(order.size());
      for (int t = static_cast<int>(order.size()) - 1; t >= 0; --t) {
        suffix[t] = suffix_wx;
        suffix_wx += inst.weights[order[t]] * x.at(i, order[t]);
      }
      double prefix_px = 0.0;
      for (std::size_t t = 0; t < order.size(); ++t) {
        const int j = order[t];
        const double pj = inst.ptime(i, j);
        const double wj = inst.weights[j];
        const std::size_t idx = static_cast<std::size_t>(i) * inst.jobs + j;
        const double glin = wj * pj;
        if (linear_active) {
          grad[idx] = glin;
        } else {
          const double gquad = 2.0 * (wj * prefix_px + wj * pj * x.at(i, j) + pj * suffix[t]);
          grad[idx] = 0.5 * glin + 0.5 * gquad;
        }
        prefix_px += pj * x.at(i, j);
      }
    }
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm == 0.0) {
      best.converged = true;
      break;
    }
    const double step = diameter / (gnorm * std::sqrt(static_cast<double>(iter)));
    for (std::size_t k = 0; k < grad.size(); ++k) x.x[k] -= step * grad[k];
    // project each job column back onto its simplex over allowed machines
    for (int j = 0; j < inst.jobs; ++j) {
      simplex.clear();
      for (int i = 0; i < inst.machines; ++i)
        if (inst.allowed(i, j)) simplex.push_back(x.at(i, j));
      project_simplex(simplex);
      int pos = 0;
      for (int i = 0; i < inst.machines; ++i)
        if (inst.allowed(i, j)) x.at(i, j) = simplex[pos++];
        else x.at(i, j) = 0.0;
    }
    for (std::size_t k = 0; k < avg.x.size(); ++k) avg.x[k] += x.x[k];

    if (iter % 100 == 0) {
      FractionalAssignment mean = avg;
      const double inv = 1.0 / (iter + 1.0);
      for (double& v : mean.x) v *= inv;
      const double mval = objective(mean);
      if (mval < best.objective) {
        best.objective = mval;
        best.x = mean;
      }
    }
    if (iter % cfg.stall_window == 0) {
      if (window_best - best.objective <= cfg.tolerance * std::max(1.0, std::abs(best.objective))) {
        best.converged = true;
        break;
      }
      window_best = best.objective;
    }
  }
  best.iterations = std::min(iter, cfg.max_iters);
  return best;
}

}  // namespace negsched
