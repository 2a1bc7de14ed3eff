#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strategem/cluster.hpp"
#include "strategem/costmodel.hpp"
#include "strategem/planner.hpp"
#include "strategem/rng.hpp"
#include "strategem/workload.hpp"

namespace strategem {

enum class Mode { Single, DataParallel, ModelParallel, Hybrid, Adaptive };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& name);

// Measurement noise and slow drift applied to true per-component compute
// costs. Noise is multiplicative lognormal on measurements only; drift is a
// per-epoch lognormal random walk on the true costs.
struct DriftModel {
  double sigma_noise = 0.05;
  double sigma_drift = 0.0;

  void validate() const;
};

// Scripted change to one component's true compute cost, applied at the start
// of the given epoch (factor multiplies the running drift multiplier).
struct DriftEvent {
  int epoch = 0;
  int component = 0;
  double factor = 1.0;
};

struct SimParams {
  double profile_cost_s = 0.5;
  double checkpoint_cost_s = 2.0;
  double tau = 0.2;                // relative-change threshold for re-planning
  bool profile_every_epoch = true; // charge profiling each epoch vs only on triggers
  int mem_buckets = 4096;
  bool use_exact_solver = false;   // adaptive mode: exact enumeration vs layered DP
};

// One epoch's measurements: per-component compute times (single-device
// equivalent) and the measured communication/computation ratio of the
// currently executing plan.
struct ProfiledCosts {
  std::vector<double> t_comp;
  double comm_comp_ratio = 0.0;
  int epoch_measured = 0;
};

// One profiling pass over the currently executing plan. Per-component
// measured compute times are single-device equivalents (comparable across
// re-plans): true time scaled by the drift multiplier and by multiplicative
// lognormal measurement noise drawn from `rng` (one gaussian per component;
// none when sigma_noise is zero). The ratio is plan communication over
// measured plan computation per step.
ProfiledCosts profile(const ModelGraph& graph, const Cluster& cluster, const Plan& plan,
                      const TrainingSchedule& schedule, const CostParams& params,
                      const std::vector<double>& true_multipliers, double sigma_noise,
                      int epoch, Xoshiro256pp& rng);

// True iff the measured ratio moved by more than tau relatively, or any
// component's measured compute time did.
bool should_replan(const ProfiledCosts& baseline, const ProfiledCosts& current, double tau);

enum class EventType {
  Forward,
  Backward,
  CommForward,
  CommBackward,
  GradSync,
  ReshardForward,
  ReshardBackward,
  Update,
  Profile,
  Checkpoint,
  Replan,
};

const char* to_string(EventType type);

struct TraceEvent {
  double t_start = 0.0;
  double duration = 0.0;
  EventType type = EventType::Forward;
  int component = -1;
  int epoch = 0;
  std::int64_t batch = -1;
};

struct ReplanRecord {
  int epoch = 0;
  std::uint64_t old_plan_hash = 0;
  std::uint64_t new_plan_hash = 0;
};

struct SimMetrics {
  double total_time = 0.0;       // seconds (simulated)
  double throughput = 0.0;       // samples per second
  double comm_fraction = 0.0;    // communication share of total time
  double peak_mem_per_device = 0.0;  // bytes
  std::vector<ReplanRecord> replan_events;
  int checkpoint_count = 0;
  std::string mode;
  std::uint64_t seed = 0;
};

struct RunResult {
  SimMetrics metrics;
  std::vector<TraceEvent> trace;  // populated only when requested
  Plan final_plan;
};

// Deterministic event-driven simulation of one training run. Identical
// inputs and seed produce a bit-identical trace; the sum of event durations
// equals total_time exactly (the model has no idle time).
RunResult run(const ModelGraph& graph, const Cluster& cluster,
              const TrainingSchedule& schedule, Mode mode, const DriftModel& drift,
              const std::vector<DriftEvent>& drift_events, const CostParams& cost_params,
              const SimParams& sim_params, std::uint64_t seed, bool record_trace);

}  // namespace strategem
