#include <catch2/catch_amalgamated.hpp>

#include "negsched/brute_force.hpp"
#include "negsched/generators.hpp"
#include "negsched/linalg.hpp"
#include "negsched/lower_bounds.hpp"
#include "negsched/relaxation.hpp"
#include "test_fixtures.hpp"

using namespace negsched;

TEST_CASE("check_psd on reference matrices") {
  SymMatrix id(3);
  for (int k = 0; k < 3; ++k) id.at(k, k) = 1.0;
  auto r = check_psd(id, 0.0);
  CHECK(r.psd);
  CHECK(r.min_eigenvalue == Catch::Approx(1.0));

  SymMatrix m(2);
  m.at(0, 0) = 1.0;
  m.at(0, 1) = 2.0;
  m.at(1, 0) = 2.0;
  m.at(1, 1) = 1.0;
  r = check_psd(m, 1e-9);
  CHECK_FALSE(r.psd);
  CHECK(r.min_eigenvalue == Catch::Approx(-1.0));  // eigenvalues 3 and -1

  SymMatrix zero(2);
  r = check_psd(zero, 0.0);
  CHECK(r.psd);
  CHECK(r.min_eigenvalue == 0.0);
}

TEST_CASE("check_psd rejects asymmetric input") {
  SymMatrix m(2);
  m.at(0, 1) = 1.0;
  m.at(1, 0) = 0.5;
  CHECK_THROWS_AS(check_psd(m, 0.0), std::invalid_argument);
}

TEST_CASE("jacobi eigensystem reconstructs the matrix") {
  SplitMix64 rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 2 + static_cast<int>(rng.next_below(6));
    SymMatrix m(d);
    for (int r = 0; r < d; ++r)
      for (int c = r; c < d; ++c) {
        const double v = 2.0 * rng.next_double() - 1.0;
        m.at(r, c) = v;
        m.at(c, r) = v;
      }
    const EigenSystem es = jacobi_eigensystem(m);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k)
          acc += es.vectors.at(r, k) * es.values[k] * es.vectors.at(c, k);
        CHECK(acc == Catch::Approx(m.at(r, c)).margin(1e-9));
      }
  }
}

TEST_CASE("psd projection clips negative eigenvalues") {
  SymMatrix m(2);
  m.at(0, 0) = 1.0;
  m.at(0, 1) = 2.0;
  m.at(1, 0) = 2.0;
  m.at(1, 1) = 1.0;
  const SymMatrix p = project_psd(m);
  const auto r = check_psd(p, 1e-12);
  CHECK(r.psd);
  // projection keeps the positive eigenpair: (3/2) * [[1,1],[1,1]]
  CHECK(p.at(0, 0) == Catch::Approx(1.5));
  CHECK(p.at(0, 1) == Catch::Approx(1.5));
}

TEST_CASE("simplex projection") {
  std::vector<double> v{0.4, 0.4};
  project_simplex(v);
  CHECK(v[0] == Catch::Approx(0.5));
  CHECK(v[1] == Catch::Approx(0.5));

  v = {2.0, 0.0, 0.0};
  project_simplex(v);
  CHECK(v[0] == Catch::Approx(1.0));
  CHECK(v[1] == 0.0);

  v = {-5.0};
  project_simplex(v);
  CHECK(v[0] == 1.0);

  SplitMix64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> w(1 + rng.next_below(6));
    for (double& x : w) x = 4.0 * rng.next_double() - 2.0;
    project_simplex(w);
    double sum = 0.0;
    for (double x : w) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("moment_from_integral produces rank-one feasible moments") {
  const Instance single = poisson_instance(1);
  const SdpSolution sol = moment_from_integral(single, Schedule{{0}});
  CHECK(sol.moments[0].entries.at(0, 0) == 1.0);
  CHECK(sol.moments[0].entries.at(0, 1) == 1.0);
  CHECK(sol.moments[0].entries.at(1, 1) == 1.0);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = random_instance(seed, 5, 3, 0.2, 1, 8, 1, 5);
    const Schedule s = negsched::testing::arbitrary_schedule(inst, seed);
    const SdpSolution ms = moment_from_integral(inst, s);
    for (const MomentMatrix& m : ms.moments) CHECK(check_psd(m.entries, 0.0).psd);
    const SolutionAudit audit = audit_solution(inst, ms, 1e-12, 1e-12);
    CHECK(audit.ok);
  }
}

TEST_CASE("sdp objective equals schedule cost on integral moments") {
  const Instance gap5 = gap_instance(5);
  const BruteForceResult opt = brute_force_opt(gap5);
  const SdpSolution sol = moment_from_integral(gap5, opt.schedule);
  CHECK(sdp_objective(gap5, sol) == Catch::Approx(40.0).epsilon(1e-12));

  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Instance inst = random_instance(seed, 4 + seed % 5, 2 + seed % 3, 0.2, 1, 12, 1, 9);
    const Schedule s = negsched::testing::arbitrary_schedule(inst, seed);
    const SdpSolution ms = moment_from_integral(inst, s);
    const double cost = schedule_cost(inst, s);
    CHECK(sdp_objective(inst, ms) == Catch::Approx(cost).epsilon(1e-9));
  }
}

TEST_CASE("telescoped and direct objective evaluation agree") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance inst = random_instance(seed, 4 + seed % 6, 2 + seed % 3, 0.25, 1, 15, 1, 9);
    const Schedule s = negsched::testing::arbitrary_schedule(inst, seed + 7);
    const SdpSolution ms = moment_from_integral(inst, s);
    const double direct = sdp_objective(inst, ms);
    const double tele = sdp_objective_telescoped(inst, ms);
    CHECK(tele == Catch::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("objective with zero off-diagonals reduces to the linear term") {
  const Instance inst = poisson_instance(3);
  FractionalAssignment x = negsched::testing::uniform_assignment(inst);
  SdpSolution sol;
  sol.x = x;
  sol.moments.resize(inst.machines);
  for (int i = 0; i < inst.machines; ++i) {
    sol.moments[i].machine = i;
    SymMatrix m(inst.jobs + 1);
    m.at(0, 0) = 1.0;
    for (int j = 0; j < inst.jobs; ++j) {
      m.at(0, j + 1) = x.at(i, j);
      m.at(j + 1, 0) = x.at(i, j);
      m.at(j + 1, j + 1) = x.at(i, j);
    }
    sol.moments[i].entries = std::move(m);
  }
  double linear = 0.0;
  for (int i = 0; i < inst.machines; ++i)
    for (int j = 0; j < inst.jobs; ++j)
      linear += inst.weights[j] * inst.ptime(i, j) * x.at(i, j);
  CHECK(sdp_objective(inst, sol) == Catch::Approx(linear).epsilon(1e-12));
}

TEST_CASE("lower_bound_lb formula cases") {
  // single job, x = 1, p = 2, S = {job}: 0.5 * (4 + 4) = 4
  Instance inst(1, 1);
  inst.weights = {1.0};
  inst.ptime(0, 0) = 2.0;
  const SdpSolution sol = moment_from_integral(inst, Schedule{{0}});
  CHECK(lower_bound_lb(inst, sol, 0, 1, {0}) == Catch::Approx(4.0));
  // S empty: plain quadratic sum Q
  CHECK(lower_bound_lb(inst, sol, 0, 1, {}) == Catch::Approx(4.0));  // x p^2 = 4

  CHECK_THROWS_AS(lower_bound_lb(inst, sol, 0, 0, {0}), std::invalid_argument);
}

TEST_CASE("integral moments dominate every lower bound") {
  SplitMix64 rng(2024);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance inst = random_instance(seed, 3 + seed % 4, 2 + seed % 2, 0.2, 1, 9, 1, 7);
    const Schedule s = negsched::testing::arbitrary_schedule(inst, seed);
    const SdpSolution sol = moment_from_integral(inst, s);
    for (int i = 0; i < inst.machines; ++i) {
      const std::vector<double> prefix = machine_prefix_objectives(inst, sol, i);
      const MachineView v = machine_view(inst, sol.x, i);
      for (int t = 1; t <= v.size(); ++t) {
        // random subset of the prefix
        std::vector<int> subset;
        for (int a = 0; a < t; ++a)
          if (rng.next_below(2) == 0) subset.push_back(v.job[a]);
        const double lb = lower_bound_lb(inst, sol, i, t, subset);
        CHECK(prefix[t - 1] >= lb - 1e-9 * std::max(1.0, std::abs(prefix[t - 1])));
      }
    }
  }
}

TEST_CASE("corollary bounds match their closed forms") {
  const Instance inst = gap_instance(5);
  const BruteForceResult opt = brute_force_opt(inst);
  const SdpSolution sol = moment_from_integral(inst, opt.schedule);
  // machine 0 carries the five unit jobs with x = 1
  const CorollaryBounds cb = corollary_bounds(inst, sol, 0, 5, {});
  CHECK(cb.q == Catch::Approx(5.0));
  CHECK(cb.l == Catch::Approx(5.0));
  CHECK(cb.lb_empty == Catch::Approx(5.0));
  CHECK(cb.lb_full == Catch::Approx(15.0));
  // no groups: every job is ungrouped, LB(G) degenerates to Q/2 + Qbar/2 = Q
  CHECK(cb.lb_grouped == Catch::Approx(5.0));

  // with all five jobs in one declared group, LB(G) equals LB(full)
  const CorollaryBounds cb2 = corollary_bounds(inst, sol, 0, 5, {{0, 1, 2, 3, 4}});
  CHECK(cb2.lb_grouped == Catch::Approx(15.0));
}

TEST_CASE("audit accepts product moments and flags broken linking") {
  const Instance inst = poisson_instance(3);
  const FractionalAssignment x = negsched::testing::uniform_assignment(inst);
  SdpSolution sol = product_solution(inst, x);
  CHECK(audit_solution(inst, sol).ok);

  sol.moments[0].entries.at(0, 1) += 1e-3;  // break linking
  CHECK_FALSE(audit_solution(inst, sol).ok);
}
