#include <catch2/catch_amalgamated.hpp>

#include "negsched/brute_force.hpp"
#include "negsched/cp_solver.hpp"
#include "negsched/generators.hpp"
#include "negsched/sdp_solver.hpp"
#include "test_fixtures.hpp"

using namespace negsched;

TEST_CASE("sdp solver on the single-job instance") {
  const Instance inst = poisson_instance(1);
  const SdpSolution sol = solve_sdp(inst);
  CHECK(sol.stats.converged);
  CHECK(sol.objective == Catch::Approx(1.0).margin(1e-4));
  CHECK(sol.x.at(0, 0) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("sdp value stays below the integral optimum") {
  const Instance inst = poisson_instance(2);
  const SdpSolution sol = solve_sdp(inst);
  CHECK(sol.stats.converged);
  CHECK(sol.objective <= 2.0 + 1e-4);

  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Instance rnd = random_instance(seed, 5, 3, 0.2, 1, 9, 1, 6);
    const SdpSolution s = solve_sdp(rnd);
    const BruteForceResult opt = brute_force_opt(rnd);
    CHECK(s.objective <= opt.cost + 1e-3 * (1.0 + opt.cost));
  }
}

TEST_CASE("sdp solver is exact on the gap instance") {
  SdpSolverConfig cfg;
  cfg.tolerance = 1e-8;
  cfg.max_iters = 200000;
  const SdpSolution sol = solve_sdp(gap_instance(5), cfg);
  CHECK(sol.stats.converged);
  CHECK(sol.objective >= 40.0 * 0.99);
  CHECK(sol.objective <= 40.0 * 1.01);
}

TEST_CASE("sdp solutions pass the feasibility audit") {
  SdpSolverConfig cfg;
  cfg.tolerance = 1e-9;
  cfg.max_iters = 400000;
  for (std::uint64_t seed : {std::uint64_t{3}, std::uint64_t{11}}) {
    const Instance inst = random_instance(seed, 6, 3, 0.25, 1, 12, 1, 8);
    const SdpSolution sol = solve_sdp(inst, cfg);
    REQUIRE(sol.stats.converged);
    const SolutionAudit audit = audit_solution(inst, sol);
    INFO("linking " << audit.max_linking_error << " sums " << audit.max_assignment_error
                    << " mineig " << audit.min_eigenvalue);
    CHECK(audit.ok);
    CHECK(sol.objective == Catch::Approx(sdp_objective(inst, sol)).epsilon(1e-12));
  }
}

TEST_CASE("sdp solver is deterministic and thread-count independent") {
  const Instance inst = random_instance(17, 6, 3, 0.2, 1, 10, 1, 6);
  SdpSolverConfig cfg;
  cfg.tolerance = 1e-7;
  const SdpSolution a = solve_sdp(inst, cfg);
  const SdpSolution b = solve_sdp(inst, cfg);
  CHECK(a.objective == b.objective);
  CHECK(a.x.x == b.x.x);
  SdpSolverConfig cfg4 = cfg;
  cfg4.threads = 4;
  const SdpSolution c = solve_sdp(inst, cfg4);
  CHECK(a.objective == c.objective);
  CHECK(a.x.x == c.x.x);
}

TEST_CASE("cp solver on the single-job instance") {
  const Instance inst = poisson_instance(1);
  const CpSolution sol = solve_cp(inst);
  CHECK(sol.objective == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("cp objective at the explicit gap fractional point is k^2 + k") {
  for (int k : {5, 20}) {
    const Instance inst = gap_instance(k);
    FractionalAssignment x(inst.machines, inst.jobs);
    for (int j = 0; j < k; ++j) x.at(0, j) = 1.0;
    for (int i = 1; i <= k; ++i) x.at(i, k) = 1.0 / k;
    CHECK(cp_objective(inst, x) == Catch::Approx(static_cast<double>(k) * k + k).epsilon(1e-12));
  }
}

TEST_CASE("cp solver certifies the gap upper bound") {
  const Instance inst = gap_instance(20);
  const CpSolution sol = solve_cp(inst);
  CHECK(sol.objective <= 420.0 + 0.1);
  // the integral optimum is k(k+1)/2 + k^2 = 610, so the gap is at least 1.45
  CHECK(610.0 / sol.objective >= 1.45);
}

TEST_CASE("cp value lower-bounds the sdp value on shared instances") {
  // CP is a weaker relaxation; on the gap instance its optimum sits near
  // k^2 + k while the SDP reaches the integral optimum.
  SdpSolverConfig cfg;
  cfg.tolerance = 1e-8;
  cfg.max_iters = 200000;
  const Instance inst = gap_instance(5);
  const double sdp = solve_sdp(inst, cfg).objective;
  const double cp = solve_cp(inst).objective;
  CHECK(cp <= sdp + 1e-6 * (1.0 + sdp));
}
