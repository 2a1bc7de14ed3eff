#include "strategem/simulator.hpp"

#include <cmath>
#include <sstream>

#include "strategem/errors.hpp"
#include "strategem/log.hpp"
#include "strategem/rng.hpp"

namespace strategem {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Single: return "single";
    case Mode::DataParallel: return "dp";
    case Mode::ModelParallel: return "mp";
    case Mode::Hybrid: return "hp";
    case Mode::Adaptive: return "adaptive";
  }
  return "?";
}

Mode mode_from_string(const std::string& name) {
  if (name == "single") return Mode::Single;
  if (name == "dp") return Mode::DataParallel;
  if (name == "mp") return Mode::ModelParallel;
  if (name == "hp") return Mode::Hybrid;
  if (name == "adaptive") return Mode::Adaptive;
  throw ValidationError("unknown mode: " + name + " (expected single|dp|mp|hp|adaptive)");
}

void DriftModel::validate() const {
  if (!(sigma_noise >= 0.0)) throw ValidationError("drift: sigma_noise must be non-negative");
  if (!(sigma_drift >= 0.0)) throw ValidationError("drift: sigma_drift must be non-negative");
}

bool should_replan(const ProfiledCosts& baseline, const ProfiledCosts& current, double tau) {
  if (baseline.t_comp.size() != current.t_comp.size()) {
    throw ValidationError("should_replan: component counts differ");
  }
  if (baseline.comm_comp_ratio > 0.0) {
    const double rel = std::fabs(current.comm_comp_ratio - baseline.comm_comp_ratio) /
                       baseline.comm_comp_ratio;
    if (rel > tau) return true;
  }
  for (std::size_t i = 0; i < baseline.t_comp.size(); ++i) {
    if (baseline.t_comp[i] <= 0.0) continue;
    const double rel = std::fabs(current.t_comp[i] - baseline.t_comp[i]) / baseline.t_comp[i];
    if (rel > tau) return true;
  }
  return false;
}

const char* to_string(EventType type) {
  switch (type) {
    case EventType::Forward: return "forward";
    case EventType::Backward: return "backward";
    case EventType::CommForward: return "comm_fwd";
    case EventType::CommBackward: return "comm_bwd";
    case EventType::GradSync: return "grad_sync";
    case EventType::ReshardForward: return "reshard_fwd";
    case EventType::ReshardBackward: return "reshard_bwd";
    case EventType::Update: return "update";
    case EventType::Profile: return "profile";
    case EventType::Checkpoint: return "checkpoint";
    case EventType::Replan: return "replan";
  }
  return "?";
}

namespace {

bool is_comm(EventType type) {
  switch (type) {
    case EventType::CommForward:
    case EventType::CommBackward:
    case EventType::GradSync:
    case EventType::ReshardForward:
    case EventType::ReshardBackward:
      return true;
    default:
      return false;
  }
}

// Per-plan static costs, scaled each epoch by the drift multipliers.
struct PlanCosts {
  std::vector<CostEstimate> base;      // per component, unit multiplier
  std::vector<double> reshard_half;    // boundary into component i, one direction
  double comm_step = 0.0;              // plan-level per-step communication
};

PlanCosts plan_costs(const Plan& plan, const ModelGraph& graph, const Cluster& cluster,
                     const TrainingSchedule& schedule, const CostParams& params) {
  PlanCosts pc;
  const int n = graph.size();
  pc.base.reserve(n);
  pc.reshard_half.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    pc.base.push_back(estimate(graph.components[i], plan.assignment[i], cluster, schedule, params));
    pc.comm_step += pc.base.back().t_comm;
    if (i > 0) {
      const double rc = reshard_cost(plan.assignment[i - 1], plan.assignment[i],
                                     graph.components[i], cluster, schedule, params);
      pc.reshard_half[i] = rc / 2.0;
      pc.comm_step += rc;
    }
  }
  return pc;
}

// Compute time of one component on a single device at the full batch: the
// strategy-independent quantity profiling reports.
double single_device_tcomp(const Component& c, const Cluster& cluster,
                           const TrainingSchedule& schedule) {
  return (c.flops_fwd + c.flops_bwd) * static_cast<double>(schedule.global_batch) /
         cluster.devices.front().throughput;
}

// Measurement noise factors for one epoch: one lognormal draw per component,
// none when sigma is zero.
std::vector<double> measured_multipliers(const std::vector<double>& true_multipliers,
                                         double sigma_noise, Xoshiro256pp& rng) {
  std::vector<double> measured(true_multipliers);
  if (sigma_noise > 0.0) {
    for (double& m : measured) m *= std::exp(sigma_noise * rng.gaussian());
  }
  return measured;
}

ProfiledCosts profile_with(const ModelGraph& graph, const Cluster& cluster,
                           const PlanCosts& costs, const TrainingSchedule& schedule,
                           const std::vector<double>& measured, int epoch) {
  ProfiledCosts p;
  p.epoch_measured = epoch;
  const int n = graph.size();
  p.t_comp.resize(n);
  double comp = 0.0;
  for (int i = 0; i < n; ++i) {
    p.t_comp[i] = single_device_tcomp(graph.components[i], cluster, schedule) * measured[i];
    comp += costs.base[i].t_comp * measured[i];
  }
  p.comm_comp_ratio = comp > 0.0 ? costs.comm_step / comp : 0.0;
  return p;
}

}  // namespace

ProfiledCosts profile(const ModelGraph& graph, const Cluster& cluster, const Plan& plan,
                      const TrainingSchedule& schedule, const CostParams& params,
                      const std::vector<double>& true_multipliers, double sigma_noise,
                      int epoch, Xoshiro256pp& rng) {
  if (static_cast<int>(true_multipliers.size()) != graph.size()) {
    throw ValidationError("profile: multiplier count does not match component count");
  }
  if (static_cast<int>(plan.assignment.size()) != graph.size()) {
    throw ValidationError("profile: plan length does not match component count");
  }
  const PlanCosts costs = plan_costs(plan, graph, cluster, schedule, params);
  const std::vector<double> measured = measured_multipliers(true_multipliers, sigma_noise, rng);
  return profile_with(graph, cluster, costs, schedule, measured, epoch);
}

RunResult run(const ModelGraph& graph, const Cluster& cluster,
              const TrainingSchedule& schedule, Mode mode, const DriftModel& drift,
              const std::vector<DriftEvent>& drift_events, const CostParams& cost_params,
              const SimParams& sim_params, std::uint64_t seed, bool record_trace) {
  schedule.validate();
  drift.validate();
  cost_params.validate();
  if (graph.components.empty()) throw ValidationError("simulator: model has no components");

  const Cluster cl = mode == Mode::Single ? with_device_count(cluster, 1) : cluster;
  const int n = graph.size();
  const std::int64_t batches = schedule.batches_per_epoch();

  std::vector<double> fwd_frac(n);
  for (int i = 0; i < n; ++i) {
    const double total = graph.components[i].flops_fwd + graph.components[i].flops_bwd;
    fwd_frac[i] = total > 0.0 ? graph.components[i].flops_fwd / total : 0.5;
  }

  auto solve_plan = [&](const std::vector<double>& flops_mult) -> Plan {
    ModelGraph scaled = graph;
    for (int i = 0; i < n; ++i) {
      scaled.components[i].flops_fwd *= flops_mult[i];
      scaled.components[i].flops_bwd *= flops_mult[i];
    }
    switch (mode) {
      case Mode::Single:
      case Mode::DataParallel:
        return uniform_plan(StrategyTag::DP, scaled, cl, schedule, cost_params);
      case Mode::ModelParallel:
        return uniform_plan(StrategyTag::MP, scaled, cl, schedule, cost_params);
      case Mode::Hybrid:
        return uniform_plan(StrategyTag::HP, scaled, cl, schedule, cost_params);
      case Mode::Adaptive:
        return sim_params.use_exact_solver
                   ? solve_exact(scaled, cl, schedule, cost_params)
                   : solve_dp(scaled, cl, schedule, cost_params, sim_params.mem_buckets);
    }
    throw InternalError("simulator: unhandled mode");
  };

  RunResult result;
  result.metrics.mode = to_string(mode);
  result.metrics.seed = seed;

  double now = 0.0;
  double comm_time = 0.0;
  int cur_epoch = 0;
  std::int64_t cur_batch = -1;
  auto emit = [&](EventType type, int component, double duration) {
    if (record_trace) {
      result.trace.push_back(TraceEvent{now, duration, type, component, cur_epoch, cur_batch});
    }
    now += duration;
    if (is_comm(type)) comm_time += duration;
  };

  std::vector<double> mult(n, 1.0);        // true drift multipliers
  std::vector<double> measured_mult(n, 1.0);
  Plan plan;
  PlanCosts costs;
  ProfiledCosts baseline;
  bool have_plan = false;

  auto check_feasible = [&](const Plan& p) {
    if (!p.feasible) {
      std::ostringstream msg;
      msg << "simulator: no feasible plan; required " << p.mem_per_device
          << " bytes per device, budget " << cl.min_mem_capacity() << " bytes";
      throw InfeasibleError(msg.str());
    }
  };

  for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
    cur_epoch = epoch;
    cur_batch = -1;

    // True costs move first: random walk plus scripted events.
    if (drift.sigma_drift > 0.0) {
      Xoshiro256pp walk = substream(seed, static_cast<std::uint64_t>(epoch), 1);
      for (int i = 0; i < n; ++i) mult[i] *= std::exp(drift.sigma_drift * walk.gaussian());
    }
    for (const DriftEvent& ev : drift_events) {
      if (ev.epoch == epoch) {
        if (ev.component < 0 || ev.component >= n) {
          throw ValidationError("drift event: component index out of range");
        }
        mult[ev.component] *= ev.factor;
      }
    }

    // Profiling: full (costed) profile per epoch, or only at epoch 0 and on
    // re-plan triggers; measurement noise applies either way.
    Xoshiro256pp noise = substream(seed, static_cast<std::uint64_t>(epoch), 0);
    measured_mult = measured_multipliers(mult, drift.sigma_noise, noise);
    if (sim_params.profile_every_epoch || epoch == 0) {
      emit(EventType::Profile, -1, sim_params.profile_cost_s);
    }

    if (!have_plan) {
      plan = solve_plan(measured_mult);
      check_feasible(plan);
      costs = plan_costs(plan, graph, cl, schedule, cost_params);
      baseline = profile_with(graph, cl, costs, schedule, measured_mult, epoch);
      have_plan = true;
      result.metrics.peak_mem_per_device = plan.mem_per_device;
    } else if (mode == Mode::Adaptive) {
      const ProfiledCosts current = profile_with(graph, cl, costs, schedule, measured_mult, epoch);
      if (should_replan(baseline, current, sim_params.tau)) {
        if (!sim_params.profile_every_epoch) {
          emit(EventType::Profile, -1, sim_params.profile_cost_s);
        }
        const std::uint64_t old_hash = plan_hash(plan);
        plan = solve_plan(measured_mult);
        check_feasible(plan);
        costs = plan_costs(plan, graph, cl, schedule, cost_params);
        baseline = profile_with(graph, cl, costs, schedule, measured_mult, epoch);
        result.metrics.replan_events.push_back(ReplanRecord{epoch, old_hash, plan_hash(plan)});
        result.metrics.peak_mem_per_device =
            std::max(result.metrics.peak_mem_per_device, plan.mem_per_device);
        emit(EventType::Replan, -1, 0.0);
        log_debug("re-planned at epoch " + std::to_string(epoch));
      }
    }

    // Per-component event durations for this epoch (drift scales compute).
    std::vector<double> fwd(n), bwd(n), comm_half(n), sync(n);
    for (int i = 0; i < n; ++i) {
      const double comp = costs.base[i].t_comp * mult[i];
      fwd[i] = comp * fwd_frac[i];
      bwd[i] = comp - fwd[i];
      comm_half[i] = costs.base[i].t_comm_act / 2.0;
      sync[i] = costs.base[i].t_comm_grad;
    }

    for (std::int64_t batch = 0; batch < batches; ++batch) {
      cur_batch = batch;
      for (int i = 0; i < n; ++i) {
        if (costs.reshard_half[i] > 0.0) emit(EventType::ReshardForward, i, costs.reshard_half[i]);
        emit(EventType::Forward, i, fwd[i]);
        if (comm_half[i] > 0.0) emit(EventType::CommForward, i, comm_half[i]);
      }
      for (int i = n - 1; i >= 0; --i) {
        if (comm_half[i] > 0.0) emit(EventType::CommBackward, i, comm_half[i]);
        emit(EventType::Backward, i, bwd[i]);
        if (sync[i] > 0.0) emit(EventType::GradSync, i, sync[i]);
        if (costs.reshard_half[i] > 0.0) emit(EventType::ReshardBackward, i, costs.reshard_half[i]);
      }
      emit(EventType::Update, -1, 0.0);
    }

    // Synthetic validation schedule: improvement probability decays with
    // epoch; improvements trigger a checkpoint.
    cur_batch = -1;
    Xoshiro256pp ckpt = substream(seed, static_cast<std::uint64_t>(epoch), 2);
    if (ckpt.uniform01() < 1.0 / (1.0 + epoch)) {
      emit(EventType::Checkpoint, -1, sim_params.checkpoint_cost_s);
      ++result.metrics.checkpoint_count;
    }
  }

  result.metrics.total_time = now;
  result.metrics.comm_fraction = now > 0.0 ? comm_time / now : 0.0;
  result.metrics.throughput =
      static_cast<double>(schedule.dataset_size) * schedule.epochs / now;
  result.final_plan = plan;
  return result;
}

}  // namespace strategem
