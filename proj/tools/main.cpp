#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "strategem/errors.hpp"
#include "strategem/log.hpp"

namespace {

std::vector<int> parse_k_list(const std::string& arg) {
  std::vector<int> out;
  std::string token;
  std::stringstream stream(arg);
  while (std::getline(stream, token, ',')) {
    try {
      out.push_back(std::stoi(token));
    } catch (const std::exception&) {
      throw strategem::ValidationError("--k: expected a comma-separated integer list");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace strategem;
  using namespace strategem::cli;

  CLI::App app{"strategem: parallelism-strategy planning and training-time simulation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CommonOptions common;
  std::uint64_t seed_arg = 0;
  bool seed_set = false;
  app.add_option("--config", common.config_path, "experiment config JSON")->expected(1);
  app.add_option("--seed", seed_arg, "override the run seed")
      ->expected(1)
      ->each([&seed_set](const std::string&) { seed_set = true; });
  app.add_option("--out-dir", common.out_dir, "directory for emitted files");
  app.add_option("--jobs", common.jobs, "concurrent sweep runs")->check(CLI::PositiveNumber);

  PlanOptions plan_opt;
  CLI::App* plan = app.add_subcommand("plan", "solve the strategy assignment");
  plan->add_option("--model", plan_opt.model, "resnet50 | vit_b16 | file:<path>");
  plan->add_option("--cluster", plan_opt.cluster, "file:<path> | k=8,mem=32,tput=15,bw=25,lat=5");
  plan->add_option("--params", plan_opt.params_path, "cost-params JSON file");
  plan->add_option("--solver", plan_opt.solver, "dp | exact");
  plan->add_option("--out", plan_opt.out, "plan output path");

  SimulateOptions sim_opt;
  CLI::App* simulate = app.add_subcommand("simulate", "run one training simulation");
  simulate->add_option("--mode", sim_opt.mode, "single | dp | mp | hp | adaptive");
  simulate->add_option("--trace", sim_opt.trace_path, "event trace CSV output");
  simulate->add_option("--metrics", sim_opt.metrics_path, "metrics JSON output");

  SweepOptions sweep_opt;
  std::string k_arg = "1,2,4,8";
  CLI::App* sweep = app.add_subcommand("sweep", "speedup vs device count for every mode");
  sweep->add_option("--k", k_arg, "comma-separated device counts");
  sweep->add_option("--out", sweep_opt.out, "sweep CSV output");

  VerifyOptions verify_opt;
  CLI::App* verify = app.add_subcommand("verify", "training-math equivalence suite");
  verify->add_option("--shards", verify_opt.shards, "data-parallel shard count");
  verify->add_option("--steps", verify_opt.steps, "gradient-descent steps");

  ReportOptions report_opt;
  CLI::App* report = app.add_subcommand("report", "summarize metrics and plan files");
  report->add_option("--metrics", report_opt.metrics_files, "metrics JSON files")
      ->expected(-1);
  report->add_option("--plan", report_opt.plan_file, "plan JSON for strategy listing");

  CLI11_PARSE(app, argc, argv);
  if (seed_set) common.seed = seed_arg;

  try {
    if (plan->parsed()) return cmd_plan(common, plan_opt);
    if (simulate->parsed()) return cmd_simulate(common, sim_opt);
    if (sweep->parsed()) {
      sweep_opt.k_values = parse_k_list(k_arg);
      return cmd_sweep(common, sweep_opt);
    }
    if (verify->parsed()) return cmd_verify(common, verify_opt);
    if (report->parsed()) return cmd_report(common, report_opt);
  } catch (const ValidationError& e) {
    log_error(e.what());
    return 1;
  } catch (const SearchSpaceError& e) {
    log_error(e.what());
    return 1;
  } catch (const InfeasibleError& e) {
    log_error(e.what());
    return 2;
  } catch (const InternalError& e) {
    log_error(std::string("internal invariant violation: ") + e.what());
    return 3;
  } catch (const std::exception& e) {
    log_error(std::string("unexpected error: ") + e.what());
    return 3;
  }
  return 0;
}
