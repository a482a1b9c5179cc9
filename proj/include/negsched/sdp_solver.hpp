#pragma once

#include <cmath>
#include <vector>

#include "negsched/instance.hpp"
#include "negsched/linalg.hpp"
#include "negsched/parallel.hpp"
#include "negsched/relaxation.hpp"

// First-order solver for the lift-and-project relaxation
//
//   minimize   sum_i <C_i, X_i>
//   subject to X_i[0,0] = 1,
//              X_i[0,j] = X_i[j,0] = X_i[j,j]          (linking)
//              sum_i X_i[j,j] = 1  for every job j     (assignment)
//              X_i >= 0 entrywise,  X_i PSD            (one block per machine)
//
// via two-block ADMM (operator splitting).  One block projects each machine's
// matrix onto the PSD cone through a full Jacobi eigendecomposition with
// negative eigenvalues clipped.  The other block minimizes the linearized
// objective over the affine constraints intersected with the nonnegative
// orthant; that projection is closed-form because the tied coordinates of a
// job (first row + diagonal, equal weight 3 per machine) reduce to a simplex
// projection across machines and the remaining entries are free.
//
// The relaxation is block diagonal with (n+1) x (n+1) blocks, so spectral
// projections stay cheap at the scales this library targets.

namespace negsched {

struct SdpSolverConfig {
  int max_iters = 20000;
  double rho = 1.0;          // initial penalty, self-tuned by residual balancing
  double tolerance = 1e-6;   // primal/dual residual target, relative to iterate scale
  int threads = 1;           // per-machine PSD projections run in parallel
};

namespace detail {

struct SdpBlock {
  int machine = 0;
  std::vector<int> jobs;  // allowed jobs, ascending; local index = position + 1
  int dim = 0;            // jobs.size() + 1
  SymMatrix c;            // objective coefficients
  SymMatrix x, z, u, z_prev;
  std::vector<int> loc;   // global job -> local row, -1 if forbidden
};

inline void build_blocks(const Instance& inst, std::vector<SdpBlock>& blocks) {
  blocks.assign(inst.machines, SdpBlock{});
  for (int i = 0; i < inst.machines; ++i) {
    SdpBlock& b = blocks[i];
    b.machine = i;
    b.loc.assign(inst.jobs, -1);
    for (int j = 0; j < inst.jobs; ++j)
      if (inst.allowed(i, j)) {
        b.loc[j] = static_cast<int>(b.jobs.size()) + 1;
        b.jobs.push_back(j);
      }
    b.dim = static_cast<int>(b.jobs.size()) + 1;
    b.c = SymMatrix(b.dim);
    // C[j,j] = w_j p_ij ; C[j,j'] = C[j',j] = w_j p_ij' / 2 for j' before j,
    // so <C, X> recovers sum_j w_j sum_{j' <= j} p_ij' X[j,j'].
    const SmithOrder so = smith_order(inst, i);
    for (std::size_t bpos = 0; bpos < so.order.size(); ++bpos) {
      const int j = so.order[bpos];
      const int lj = b.loc[j];
      b.c.at(lj, lj) += inst.weights[j] * inst.ptime(i, j);
      for (std::size_t apos = 0; apos < bpos; ++apos) {
        const int j2 = so.order[apos];
        const int lj2 = b.loc[j2];
        const double half = 0.5 * inst.weights[j] * inst.ptime(i, j2);
        b.c.at(lj, lj2) += half;
        b.c.at(lj2, lj) += half;
      }
    }
  }
}

}  // namespace detail

inline SdpSolution solve_sdp(const Instance& inst, const SdpSolverConfig& cfg = {}) {
  inst.validate();
  std::vector<detail::SdpBlock> blocks;
  detail::build_blocks(inst, blocks);
  const int m = inst.machines;

  // Start from the product-measure completion of the uniform assignment:
  // feasible for both blocks, so the first iterations stay well scaled.
  FractionalAssignment x0(inst.machines, inst.jobs);
  for (int j = 0; j < inst.jobs; ++j) {
    const auto machines_j = inst.allowed_machines(j);
    for (int i : machines_j) x0.at(i, j) = 1.0 / static_cast<double>(machines_j.size());
  }
  {
    const SdpSolution warm = product_solution(inst, x0);
    for (int i = 0; i < m; ++i) {
      detail::SdpBlock& b = blocks[i];
      b.x = SymMatrix(b.dim);
      for (int r = 0; r < b.dim; ++r)
        for (int c = 0; c < b.dim; ++c) {
          const int gr = (r == 0) ? 0 : b.jobs[r - 1] + 1;
          const int gc = (c == 0) ? 0 : b.jobs[c - 1] + 1;
          b.x.at(r, c) = warm.moments[i].entries.at(gr, gc);
        }
      b.z = b.x;
      b.z_prev = b.z;
      b.u = SymMatrix(b.dim);
    }
  }

  double rho = cfg.rho;
  SolverStats stats;
  std::vector<double> targets, tied;
  std::vector<double> block_dist(m), block_dual(m), block_nx(m), block_nz(m), block_nu(m);

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    // --- affine/nonnegative block, target V = Z - U - C/rho ---
    // Off-diagonal free entries clip to >= 0; the per-job tied coordinates
    // (first row and diagonal across machines) get a simplex projection of
    // their weighted averages (2*offdiag + diag)/3.
    for (detail::SdpBlock& b : blocks) {
      if (b.x.dim != b.dim) b.x = SymMatrix(b.dim);
      for (int r = 0; r < b.dim; ++r)
        for (int c = 0; c < b.dim; ++c) {
          if (r == 0 || c == 0 || r == c) continue;
          const double v = b.z.at(r, c) - b.u.at(r, c) - b.c.at(r, c) / rho;
          b.x.at(r, c) = std::max(v, 0.0);
        }
      b.x.at(0, 0) = 1.0;
    }
    for (int j = 0; j < inst.jobs; ++j) {
      targets.clear();
      tied.clear();
      for (int i = 0; i < m; ++i) {
        const detail::SdpBlock& b = blocks[i];
        const int lj = b.loc[j];
        if (lj < 0) continue;
        const double v_link = b.z.at(0, lj) - b.u.at(0, lj) - b.c.at(0, lj) / rho;
        const double v_diag = b.z.at(lj, lj) - b.u.at(lj, lj) - b.c.at(lj, lj) / rho;
        targets.push_back((2.0 * v_link + v_diag) / 3.0);
      }
      tied = targets;
      project_simplex(tied);
      int pos = 0;
      for (int i = 0; i < m; ++i) {
        detail::SdpBlock& b = blocks[i];
        const int lj = b.loc[j];
        if (lj < 0) continue;
        const double t = tied[pos++];
        b.x.at(0, lj) = t;
        b.x.at(lj, 0) = t;
        b.x.at(lj, lj) = t;
      }
    }

    // --- PSD block + dual update, independent per machine ---
    parallel_for(m, cfg.threads, [&](std::int64_t ii) {
      detail::SdpBlock& b = blocks[ii];
      b.z_prev = b.z;
      SymMatrix w(b.dim);
      for (std::size_t k = 0; k < w.a.size(); ++k) w.a[k] = b.x.a[k] + b.u.a[k];
      b.z = project_psd(w);
      double dist = 0.0, dual = 0.0, nx = 0.0, nz = 0.0, nu = 0.0;
      for (std::size_t k = 0; k < w.a.size(); ++k) {
        const double pr = b.x.a[k] - b.z.a[k];
        b.u.a[k] += pr;
        dist += pr * pr;
        const double dz = b.z.a[k] - b.z_prev.a[k];
        dual += dz * dz;
        nx += b.x.a[k] * b.x.a[k];
        nz += b.z.a[k] * b.z.a[k];
        nu += b.u.a[k] * b.u.a[k];
      }
      block_dist[ii] = dist;
      block_dual[ii] = dual;
      block_nx[ii] = nx;
      block_nz[ii] = nz;
      block_nu[ii] = nu;
    });
    double dist = 0.0, dual = 0.0, nx = 0.0, nz = 0.0, nu = 0.0;
    for (int i = 0; i < m; ++i) {
      dist += block_dist[i];
      dual += block_dual[i];
      nx += block_nx[i];
      nz += block_nz[i];
      nu += block_nu[i];
    }
    const double r_primal = std::sqrt(dist);
    const double r_dual = rho * std::sqrt(dual);
    stats.iterations = iter;
    stats.primal_residual = r_primal;
    stats.dual_residual = r_dual;
    const double scale_primal = std::max(std::sqrt(nx), std::sqrt(nz));
    const double scale_dual = rho * std::sqrt(nu);
    if (r_primal <= cfg.tolerance * (1.0 + scale_primal) &&
        r_dual <= cfg.tolerance * (1.0 + scale_dual)) {
      stats.converged = true;
      break;
    }
    // Residual balancing: double/halve rho when one residual dominates by 10x.
    if (iter % 25 == 0) {
      if (r_primal > 10.0 * r_dual) {
        rho *= 2.0;
        for (detail::SdpBlock& b : blocks)
          for (double& v : b.u.a) v *= 0.5;
      } else if (r_dual > 10.0 * r_primal) {
        rho *= 0.5;
        for (detail::SdpBlock& b : blocks)
          for (double& v : b.u.a) v *= 2.0;
      }
    }
  }
  stats.rho_final = rho;

  // Return the affine-side iterate: job masses and linking hold exactly by
  // construction; the PSD defect is bounded by the final primal residual.
  SdpSolution sol;
  sol.x = FractionalAssignment(inst.machines, inst.jobs);
  sol.moments.resize(m);
  for (int i = 0; i < m; ++i) {
    const detail::SdpBlock& b = blocks[i];
    sol.moments[i].machine = i;
    SymMatrix full(inst.jobs + 1);
    for (int r = 0; r < b.dim; ++r)
      for (int c = 0; c < b.dim; ++c) {
        const int gr = (r == 0) ? 0 : b.jobs[r - 1] + 1;
        const int gc = (c == 0) ? 0 : b.jobs[c - 1] + 1;
        full.at(gr, gc) = b.x.at(r, c);
      }
    sol.moments[i].entries = std::move(full);
    for (int j : b.jobs) sol.x.at(i, j) = sol.moments[i].entries.at(j + 1, j + 1);
  }
  sol.stats = stats;
  sol.objective = sdp_objective(inst, sol);
  return sol;
}

}  // namespace negsched
