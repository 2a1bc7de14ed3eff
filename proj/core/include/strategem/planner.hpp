#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strategem/cluster.hpp"
#include "strategem/costmodel.hpp"
#include "strategem/workload.hpp"

namespace strategem {

// A complete strategy assignment with its predicted cost.
struct Plan {
  std::vector<Strategy> assignment;        // length L
  std::vector<CostEstimate> per_component; // length L
  double step_time = 0.0;                  // seconds per mini-batch step
  double mem_per_device = 0.0;             // bytes
  bool feasible = false;                   // mem_per_device <= min device capacity
  std::string solver;                      // "exact", "dp", "uniform"
};

// Precomputed per-(component, strategy) costs plus boundary re-shard costs.
// Solvers run on this table; tests can hand-build one to pin oracle values.
struct CostTable {
  std::vector<Strategy> strategies;               // candidate set, canonical order
  std::vector<std::vector<CostEstimate>> cost;    // [component][strategy index]
  // reshard[i][prev][next]: cost of a strategy change at the boundary into
  // component i (i in 1..L-1; row 0 unused).
  std::vector<std::vector<std::vector<double>>> reshard;
  double mem_budget = 0.0;                        // min device capacity, bytes

  int num_components() const { return static_cast<int>(cost.size()); }
  int num_strategies() const { return static_cast<int>(strategies.size()); }
};

CostTable build_cost_table(const ModelGraph& graph, const Cluster& cluster,
                           const TrainingSchedule& schedule, const CostParams& params);

// Total predicted step time of an assignment: per-component compute plus
// communication (max over participating devices; equal per device on a
// homogeneous cluster) plus boundary re-shard costs.
double objective(const std::vector<Strategy>& assignment, const ModelGraph& graph,
                 const Cluster& cluster, const TrainingSchedule& schedule,
                 const CostParams& params);
double objective_on(const std::vector<Strategy>& assignment, const CostTable& table);

// Exhaustive enumeration; globally optimal. Refuses instances with more than
// kMaxExactAssignments candidate assignments.
inline constexpr double kMaxExactAssignments = 1e7;
Plan solve_exact(const ModelGraph& graph, const Cluster& cluster,
                 const TrainingSchedule& schedule, const CostParams& params);
Plan solve_exact_on(const CostTable& table);

// Layered dynamic program over (component, strategy, discretised cumulative
// memory). Memory consumption always rounds up, so a plan reported feasible
// is feasible; with unconstrained memory the chain DP is exact.
Plan solve_dp(const ModelGraph& graph, const Cluster& cluster,
              const TrainingSchedule& schedule, const CostParams& params,
              int mem_buckets = 4096);
Plan solve_dp_on(const CostTable& table, int mem_buckets);

// Same strategy everywhere; HP picks the cost-minimal factorisation
// (ties toward larger d).
Plan uniform_plan(StrategyTag tag, const ModelGraph& graph, const Cluster& cluster,
                  const TrainingSchedule& schedule, const CostParams& params);

std::uint64_t plan_hash(const Plan& plan);

}  // namespace strategem
