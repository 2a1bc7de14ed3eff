#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strategem/cluster.hpp"
#include "strategem/workload.hpp"

namespace strategem {

enum class StrategyTag { DP, MP, HP };

const char* to_string(StrategyTag tag);
StrategyTag strategy_tag_from_string(const std::string& name);

// A per-component parallelisation choice. Degrees satisfy:
//   DP: d = K, m = 1;   MP: d = 1, m = K;   HP: d * m = K with d, m > 1.
struct Strategy {
  StrategyTag tag = StrategyTag::DP;
  int dp_degree = 1;
  int mp_degree = 1;

  static Strategy dp(int k) { return {StrategyTag::DP, k, 1}; }
  static Strategy mp(int k) { return {StrategyTag::MP, 1, k}; }
  static Strategy hp(int d, int m) { return {StrategyTag::HP, d, m}; }

  bool operator==(const Strategy& other) const = default;

  // Canonical order used for deterministic tie-breaking:
  // DP < MP < HP(d ascending).
  bool operator<(const Strategy& other) const {
    if (tag != other.tag) return static_cast<int>(tag) < static_cast<int>(other.tag);
    if (dp_degree != other.dp_degree) return dp_degree < other.dp_degree;
    return mp_degree < other.mp_degree;
  }

  std::string name() const;
  void validate_for(int k) const;
};

// Fitted cost-model constants. None of these are hardware datasheet numbers;
// calibration configs document their provenance.
struct CostParams {
  double bytes_per_param_state = 16.0;  // weights 4 + grads 4 + optimizer 8
  double mp_efficiency = 0.85;          // compute efficiency under any m > 1
  int comm_rounds_mp = 4;               // partial-activation all-reduces per step
  double reshard_factor = 1.0;          // boundary re-layout cost scale
  double dp_overhead_bytes = 0.0;       // per-component gradient-bucket memory, d > 1

  void validate() const;
};

struct CostEstimate {
  double t_comp = 0.0;          // seconds per mini-batch step
  double t_comm = 0.0;          // seconds per mini-batch step
  double mem_per_device = 0.0;  // bytes

  // Breakdown of t_comm: activation all-reduces (model-parallel halves) and
  // gradient synchronisation. t_comm == t_comm_act + t_comm_grad.
  double t_comm_act = 0.0;
  double t_comm_grad = 0.0;
};

// Ring all-reduce over n participants: 2(n-1) steps moving payload/n each,
// 2(n-1)/n * payload / bandwidth + 2(n-1) * latency. Zero for n = 1.
double allreduce_time(double payload_bytes, int n, const Cluster& cluster);

// Per-step cost of running `component` under `strategy`.
CostEstimate estimate(const Component& component, const Strategy& strategy,
                      const Cluster& cluster, const TrainingSchedule& schedule,
                      const CostParams& params);

// Cost of converting the data layout at the boundary into `component` when
// the upstream strategy differs. Includes both the forward and the backward
// crossing; zero when prev == next.
double reshard_cost(const Strategy& prev, const Strategy& next,
                    const Component& component, const Cluster& cluster,
                    const TrainingSchedule& schedule, const CostParams& params);

// All admissible strategies for a K-device cluster, in canonical order.
// K = 1 collapses to the single degenerate DP(1,1).
std::vector<Strategy> strategies_for(int k);

// HP factorisations d * m = K with d, m > 1, d ascending.
std::vector<Strategy> hp_factorizations(int k);

}  // namespace strategem
