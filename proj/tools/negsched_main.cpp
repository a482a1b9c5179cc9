// Command-line front end: instance generation, relaxation solving, one-shot
// rounding and statistical verification, glued together by JSON files so runs
// can be scripted and reproduced exactly.
//
// Exit codes: 0 success / verified, 2 input or usage error, 3 solver did not
// converge (best iterate still written), 4 verification found violations.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "negsched/brute_force.hpp"
#include "negsched/cp_solver.hpp"
#include "negsched/generators.hpp"
#include "negsched/instance.hpp"
#include "negsched/json_io.hpp"
#include "negsched/rounding.hpp"
#include "negsched/sdp_solver.hpp"
#include "negsched/verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNoConverge = 3;
constexpr int kExitViolation = 4;

int env_default_threads() {
  const char* v = std::getenv("NEGCORR_SCHED_THREADS");
  if (v == nullptr) return 1;
  const int n = std::atoi(v);
  return n >= 1 ? n : 1;
}

void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty())
    std::cout << contents;
  else
    negsched::write_text_file(out_path, contents);
}

std::string dump(const negsched::Json& j) { return j.dump(2) + "\n"; }

std::string format_value(double v) {
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling on unrelated machines: convex relaxations, negatively correlated "
               "rounding, and statistical verification"};
  app.require_subcommand(1);
  int threads = env_default_threads();
  app.add_option("--threads", threads, "worker threads for solver and Monte Carlo")
      ->check(CLI::PositiveNumber);

  // --- generate ---
  auto* gen = app.add_subcommand("generate", "write an instance file");
  gen->require_subcommand(1);
  std::string gen_out;
  gen->add_option("--out", gen_out, "output path (default: stdout)");

  auto* gen_gap = gen->add_subcommand("gap", "integrality-gap family");
  int gap_k = 1;
  gen_gap->add_option("--k", gap_k, "number of unit jobs")->required()->check(CLI::PositiveNumber);

  auto* gen_poisson = gen->add_subcommand("poisson", "m unit jobs on m machines");
  int poisson_m = 1;
  gen_poisson->add_option("--m", poisson_m, "machine count")->required()->check(CLI::PositiveNumber);

  auto* gen_class = gen->add_subcommand("class", "geometric job-class family");
  int cls_classes = 1, cls_jobs = 1, cls_machines = 1;
  double cls_scale = 10.0;
  gen_class->add_option("--classes", cls_classes)->required()->check(CLI::PositiveNumber);
  gen_class->add_option("--scale", cls_scale)->required();
  gen_class->add_option("--jobs-per-class", cls_jobs)->required()->check(CLI::PositiveNumber);
  gen_class->add_option("--machines", cls_machines)->required()->check(CLI::PositiveNumber);

  auto* gen_random = gen->add_subcommand("random", "seeded random instance");
  std::uint64_t rnd_seed = 0;
  int rnd_n = 1, rnd_m = 1, rnd_pmin = 1, rnd_pmax = 100, rnd_wmin = 1, rnd_wmax = 10;
  double rnd_forbidden = 0.0;
  gen_random->add_option("--seed", rnd_seed)->required();
  gen_random->add_option("--n", rnd_n, "jobs")->required()->check(CLI::PositiveNumber);
  gen_random->add_option("--m", rnd_m, "machines")->required()->check(CLI::PositiveNumber);
  gen_random->add_option("--forbidden-prob", rnd_forbidden);
  gen_random->add_option("--p-min", rnd_pmin);
  gen_random->add_option("--p-max", rnd_pmax);
  gen_random->add_option("--w-min", rnd_wmin);
  gen_random->add_option("--w-max", rnd_wmax);

  // --- solve ---
  auto* solve = app.add_subcommand("solve", "solve a convex relaxation of an instance");
  std::string solve_instance, solve_relaxation, solve_out;
  negsched::SdpSolverConfig sdp_cfg;
  negsched::CpSolverConfig cp_cfg;
  solve->add_option("instance", solve_instance, "instance JSON file")->required();
  solve->add_option("--relaxation", solve_relaxation, "sdp or cp")
      ->required()
      ->check(CLI::IsMember({"sdp", "cp"}));
  solve->add_option("--out", solve_out, "solution output path");
  solve->add_option("--sdp-tol", sdp_cfg.tolerance, "residual tolerance");
  solve->add_option("--sdp-max-iters", sdp_cfg.max_iters);
  solve->add_option("--sdp-rho", sdp_cfg.rho, "initial penalty parameter");
  solve->add_option("--cp-max-iters", cp_cfg.max_iters);
  solve->add_option("--cp-tol", cp_cfg.tolerance);

  // --- round ---
  auto* round_cmd = app.add_subcommand("round", "round a fractional solution to a schedule");
  std::string round_instance, round_solution, round_out, round_trace, round_algo = "negcorr";
  std::uint64_t round_seed = 0;
  round_cmd->add_option("instance", round_instance)->required();
  round_cmd->add_option("--solution", round_solution, "solution JSON file")->required();
  round_cmd->add_option("--seed", round_seed)->required();
  round_cmd->add_option("--algorithm", round_algo)->check(CLI::IsMember({"negcorr", "independent"}));
  round_cmd->add_option("--out", round_out, "schedule output path");
  round_cmd->add_option("--trace", round_trace, "write a JSON-lines trace of the rounding run");

  // --- verify ---
  auto* verify = app.add_subcommand("verify", "statistically verify the rounding guarantees");
  std::string verify_instance, verify_solution, verify_out, verify_format = "table",
              verify_algo = "negcorr";
  std::int64_t verify_trials = 0;
  std::uint64_t verify_seed = 0;
  verify->add_option("instance", verify_instance)->required();
  verify->add_option("--solution", verify_solution, "sdp solution JSON file")->required();
  verify->add_option("--trials", verify_trials)->required()->check(CLI::Range(std::int64_t{1000}, std::int64_t{1} << 40));
  verify->add_option("--seed", verify_seed)->required();
  verify->add_option("--algorithm", verify_algo)->check(CLI::IsMember({"negcorr", "independent"}));
  verify->add_option("--format", verify_format)->check(CLI::IsMember({"json", "table", "csv"}));
  verify->add_option("--out", verify_out, "report output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (gen->parsed()) {
      negsched::Instance inst;
      if (gen_gap->parsed()) inst = negsched::gap_instance(gap_k);
      else if (gen_poisson->parsed()) inst = negsched::poisson_instance(poisson_m);
      else if (gen_class->parsed())
        inst = negsched::class_instance(cls_classes, cls_scale, cls_jobs, cls_machines);
      else
        inst = negsched::random_instance(rnd_seed, rnd_n, rnd_m, rnd_forbidden, rnd_pmin,
                                         rnd_pmax, rnd_wmin, rnd_wmax);
      emit(gen_out, dump(negsched::instance_to_json(inst)));
      return kExitOk;
    }

    if (solve->parsed()) {
      const negsched::Instance inst =
          negsched::instance_from_json(negsched::parse_json_file(solve_instance));
      bool converged = false;
      double objective = 0.0;
      negsched::Json out;
      if (solve_relaxation == "sdp") {
        negsched::SdpSolverConfig cfg = sdp_cfg;
        cfg.threads = threads;
        const negsched::SdpSolution sol = negsched::solve_sdp(inst, cfg);
        converged = sol.stats.converged;
        objective = sol.objective;
        out = negsched::sdp_solution_to_json(sol);
      } else {
        const negsched::CpSolution sol = negsched::solve_cp(inst, cp_cfg);
        converged = sol.converged;
        objective = sol.objective;
        out = negsched::cp_solution_to_json(sol);
      }
      if (!solve_out.empty()) negsched::write_text_file(solve_out, dump(out));
      std::cout << "objective " << format_value(objective) << "\n";
      if (!converged) {
        std::cerr << "solver did not converge within the iteration budget\n";
        return kExitNoConverge;
      }
      return kExitOk;
    }

    if (round_cmd->parsed()) {
      const negsched::Instance inst =
          negsched::instance_from_json(negsched::parse_json_file(round_instance));
      negsched::FractionalAssignment x =
          negsched::assignment_from_solution_json(negsched::parse_json_file(round_solution));
      x.validate(inst);
      const auto [scaled, factor] = negsched::scale_to_unit_min_ptime(inst);
      (void)factor;
      const negsched::BipartiteRoundingInstance b = negsched::build_groups(scaled, x);
      const bool want_trace = !round_trace.empty();
      const negsched::RoundingRun run =
          round_algo == "negcorr"
              ? negsched::round_with_state(b, round_seed, want_trace)
              : negsched::RoundingRun{{}, negsched::independent_round(b, round_seed)};
      const negsched::Schedule schedule = run.outcome.to_schedule();
      const double cost = negsched::schedule_cost(inst, schedule);
      emit(round_out, dump(negsched::schedule_to_json(schedule, cost)));
      if (want_trace && round_algo == "negcorr")
        negsched::write_text_file(round_trace, negsched::trace_to_json_lines(run));
      std::cout << "cost " << format_value(cost) << "\n";
      return kExitOk;
    }

    if (verify->parsed()) {
      const negsched::Instance inst =
          negsched::instance_from_json(negsched::parse_json_file(verify_instance));
      negsched::SdpSolution sol =
          negsched::sdp_solution_from_json(negsched::parse_json_file(verify_solution));
      if (sol.x.machines != inst.machines || sol.x.jobs != inst.jobs)
        throw std::invalid_argument("verify: solution dimensions do not match the instance");
      sol.x.validate(inst);
      const negsched::VerifyResult res = negsched::run_verification(
          inst, sol, verify_trials, verify_seed,
          negsched::algorithm_from_string(verify_algo), threads);
      std::string rendered;
      if (verify_format == "json") rendered = dump(negsched::verify_result_to_json(res));
      else if (verify_format == "csv") rendered = negsched::verify_result_to_csv(res);
      else rendered = negsched::verify_result_to_table(res);
      emit(verify_out, rendered);
      return res.total_violations == 0 ? kExitOk : kExitViolation;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
