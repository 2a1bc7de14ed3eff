#include "strategem/costmodel.hpp"

#include <cmath>
#include <sstream>

#include "strategem/errors.hpp"

namespace strategem {

namespace {
constexpr double kGradientBytesPerParam = 4.0;  // fp32 gradients
}

const char* to_string(StrategyTag tag) {
  switch (tag) {
    case StrategyTag::DP: return "DP";
    case StrategyTag::MP: return "MP";
    case StrategyTag::HP: return "HP";
  }
  return "?";
}

StrategyTag strategy_tag_from_string(const std::string& name) {
  if (name == "DP") return StrategyTag::DP;
  if (name == "MP") return StrategyTag::MP;
  if (name == "HP") return StrategyTag::HP;
  throw ValidationError("unknown strategy tag: " + name);
}

std::string Strategy::name() const {
  std::ostringstream out;
  out << to_string(tag);
  if (tag == StrategyTag::HP) out << "(" << dp_degree << "x" << mp_degree << ")";
  return out.str();
}

void Strategy::validate_for(int k) const {
  if (dp_degree < 1 || mp_degree < 1) {
    throw ValidationError("strategy " + name() + ": degrees must be >= 1");
  }
  if (dp_degree * mp_degree > k) {
    throw ValidationError("strategy " + name() + ": d*m exceeds cluster size " + std::to_string(k));
  }
  switch (tag) {
    case StrategyTag::DP:
      if (dp_degree != k || mp_degree != 1) {
        throw ValidationError("strategy DP requires d = K, m = 1 (K=" + std::to_string(k) + ")");
      }
      break;
    case StrategyTag::MP:
      if (dp_degree != 1 || mp_degree != k) {
        throw ValidationError("strategy MP requires d = 1, m = K (K=" + std::to_string(k) + ")");
      }
      break;
    case StrategyTag::HP:
      if (dp_degree <= 1 || mp_degree <= 1 || dp_degree * mp_degree != k) {
        throw ValidationError("strategy HP requires d*m = K with d, m > 1 (K=" +
                              std::to_string(k) + ")");
      }
      break;
  }
}

void CostParams::validate() const {
  if (!(bytes_per_param_state > 0.0)) {
    throw ValidationError("cost_params: bytes_per_param_state must be positive");
  }
  if (!(mp_efficiency > 0.0) || mp_efficiency > 1.0) {
    throw ValidationError("cost_params: mp_efficiency must be in (0, 1]");
  }
  if (comm_rounds_mp < 0) {
    throw ValidationError("cost_params: comm_rounds_mp must be non-negative");
  }
  if (!(reshard_factor >= 0.0)) {
    throw ValidationError("cost_params: reshard_factor must be non-negative");
  }
  if (!(dp_overhead_bytes >= 0.0)) {
    throw ValidationError("cost_params: dp_overhead_bytes must be non-negative");
  }
}

double allreduce_time(double payload_bytes, int n, const Cluster& cluster) {
  if (n < 1) throw ValidationError("allreduce_time: participant count must be >= 1");
  if (payload_bytes < 0.0) throw ValidationError("allreduce_time: payload must be non-negative");
  if (n == 1) return 0.0;
  const double steps = 2.0 * (n - 1);
  return steps / n * payload_bytes / cluster.link_bandwidth + steps * cluster.link_latency;
}

CostEstimate estimate(const Component& component, const Strategy& strategy,
                      const Cluster& cluster, const TrainingSchedule& schedule,
                      const CostParams& params) {
  strategy.validate_for(cluster.size());
  params.validate();

  const int d = strategy.dp_degree;
  const int m = strategy.mp_degree;
  const double local_batch = static_cast<double>(schedule.global_batch) / d;
  const double act_payload =
      static_cast<double>(component.activation_bytes_per_sample) * local_batch;

  CostEstimate cost;
  const double eff = m > 1 ? params.mp_efficiency : 1.0;
  const double flops = component.flops_fwd + component.flops_bwd;
  const double throughput = cluster.devices.front().throughput;
  cost.t_comp = flops * local_batch / (throughput * eff * m);

  // Activation all-reduces for intra-layer model parallelism (half forward,
  // half backward) plus the gradient all-reduce across replicas.
  cost.t_comm_act = params.comm_rounds_mp * allreduce_time(act_payload, m, cluster);
  cost.t_comm_grad =
      allreduce_time(kGradientBytesPerParam * component.param_count / m, d, cluster);
  cost.t_comm = cost.t_comm_act + cost.t_comm_grad;

  cost.mem_per_device =
      params.bytes_per_param_state * component.param_count / m +
      static_cast<double>(component.activation_bytes_per_sample) * local_batch +
      (d > 1 ? params.dp_overhead_bytes : 0.0);
  return cost;
}

double reshard_cost(const Strategy& prev, const Strategy& next,
                    const Component& component, const Cluster& cluster,
                    const TrainingSchedule& schedule, const CostParams& params) {
  if (prev == next) return 0.0;
  const double payload = static_cast<double>(component.activation_bytes_per_sample) *
                         static_cast<double>(schedule.global_batch);
  // Once forward and once backward across the boundary.
  return 2.0 * params.reshard_factor *
         (payload / cluster.link_bandwidth + cluster.link_latency);
}

std::vector<Strategy> hp_factorizations(int k) {
  std::vector<Strategy> out;
  for (int d = 2; d * 2 <= k; ++d) {
    if (k % d == 0 && k / d > 1) out.push_back(Strategy::hp(d, k / d));
  }
  return out;
}

std::vector<Strategy> strategies_for(int k) {
  if (k < 1) throw ValidationError("strategies_for: K must be >= 1");
  std::vector<Strategy> out;
  out.push_back(Strategy::dp(k));
  if (k > 1) {
    out.push_back(Strategy::mp(k));
    for (const Strategy& s : hp_factorizations(k)) out.push_back(s);
  }
  return out;
}

}  // namespace strategem
