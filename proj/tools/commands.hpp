#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace strategem::cli {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int jobs = 1;
};

struct PlanOptions {
  std::string model;    // resnet50 | vit_b16 | file:<path>
  std::string cluster;  // file:<path> | k=8,mem=32,...
  std::string params_path;
  std::string solver;   // dp | exact
  std::string out = "plan.json";
};

struct SimulateOptions {
  std::string mode = "adaptive";
  std::string trace_path;
  std::string metrics_path = "metrics.json";
};

struct SweepOptions {
  std::vector<int> k_values = {1, 2, 4, 8};
  std::string out = "sweep.csv";
};

struct VerifyOptions {
  int shards = 4;
  int steps = 100;
};

struct ReportOptions {
  std::vector<std::string> metrics_files;
  std::string plan_file;
};

int cmd_plan(const CommonOptions& common, const PlanOptions& opt);
int cmd_simulate(const CommonOptions& common, const SimulateOptions& opt);
int cmd_sweep(const CommonOptions& common, const SweepOptions& opt);
int cmd_verify(const CommonOptions& common, const VerifyOptions& opt);
int cmd_report(const CommonOptions& common, const ReportOptions& opt);

}  // namespace strategem::cli
