#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strategem/cluster.hpp"
#include "strategem/costmodel.hpp"
#include "strategem/simulator.hpp"
#include "strategem/workload.hpp"

namespace strategem {

inline constexpr int kSchemaVersion = 1;

// Raw cluster description in config units; see uniform_cluster for the unit
// conventions (mem GiB, bandwidth decimal GB/s, latency microseconds).
struct ClusterSpec {
  int k = 8;
  double mem_gb = 32.0;
  double throughput_tflops = 15.0;
  double bandwidth_gbps = 25.0;
  double latency_us = 5.0;

  Cluster build() const {
    return uniform_cluster(k, mem_gb, throughput_tflops, bandwidth_gbps, latency_us);
  }
};

struct WorkloadRef {
  std::string model = "resnet50";  // resnet50 | vit_b16 | file:<path>
  int input_resolution = 32;
  int num_classes = 100;
};

struct SolverSpec {
  std::string kind = "dp";  // dp | exact
  int mem_buckets = 4096;
};

// A full experiment description. Unknown fields anywhere in the JSON are
// rejected; a free-form "notes" string is allowed at top level for
// documenting fitted constants.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string notes;
  WorkloadRef workload;
  ClusterSpec cluster;
  TrainingSchedule schedule;
  CostParams cost_params;
  DriftModel drift;
  std::vector<DriftEvent> drift_events;
  SimParams sim;
  SolverSpec solver;
  std::vector<std::string> modes = {"single", "dp", "mp", "hp", "adaptive"};
  std::vector<std::uint64_t> seeds = {42};

  ModelGraph build_graph(const std::string& base_dir = "") const;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

// "k=8,mem=32,tput=15,bw=25,lat=5" or "file:<path>"
ClusterSpec parse_cluster_arg(const std::string& arg, const std::string& base_dir = "");

// Model graph from a generator name or a file: workload JSON.
ModelGraph load_workload(const WorkloadRef& ref, const std::string& base_dir = "");

nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

}  // namespace strategem
