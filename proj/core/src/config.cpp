#include "strategem/config.hpp"

#include <filesystem>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "strategem/errors.hpp"
#include "strategem/io.hpp"

namespace strategem {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& context) {
  if (!j.is_object()) {
    throw ValidationError(context + ": expected a JSON object");
  }
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ValidationError(context + ": unknown field '" + item.key() + "'");
    }
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, const T& fallback, const std::string& context) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(context + ": field '" + key + "' has the wrong type");
  }
}

WorkloadRef parse_workload_ref(const json& j) {
  reject_unknown(j, {"model", "input_resolution", "num_classes"}, "workload");
  WorkloadRef ref;
  ref.model = get_or<std::string>(j, "model", ref.model, "workload");
  ref.input_resolution = get_or<int>(j, "input_resolution", ref.input_resolution, "workload");
  ref.num_classes = get_or<int>(j, "num_classes", ref.num_classes, "workload");
  return ref;
}

ClusterSpec parse_cluster_spec(const json& j) {
  reject_unknown(j, {"k", "mem_gb", "throughput_tflops", "bandwidth_gbps", "latency_us"},
                 "cluster");
  ClusterSpec spec;
  spec.k = get_or<int>(j, "k", spec.k, "cluster");
  spec.mem_gb = get_or<double>(j, "mem_gb", spec.mem_gb, "cluster");
  spec.throughput_tflops = get_or<double>(j, "throughput_tflops", spec.throughput_tflops, "cluster");
  spec.bandwidth_gbps = get_or<double>(j, "bandwidth_gbps", spec.bandwidth_gbps, "cluster");
  spec.latency_us = get_or<double>(j, "latency_us", spec.latency_us, "cluster");
  return spec;
}

TrainingSchedule parse_schedule(const json& j) {
  reject_unknown(j, {"dataset_size", "global_batch", "epochs", "bytes_per_element"}, "schedule");
  TrainingSchedule s;
  s.dataset_size = get_or<std::int64_t>(j, "dataset_size", s.dataset_size, "schedule");
  s.global_batch = get_or<std::int64_t>(j, "global_batch", s.global_batch, "schedule");
  s.epochs = get_or<int>(j, "epochs", s.epochs, "schedule");
  s.bytes_per_element = get_or<int>(j, "bytes_per_element", s.bytes_per_element, "schedule");
  s.validate();
  return s;
}

CostParams parse_cost_params(const json& j) {
  reject_unknown(j,
                 {"bytes_per_param_state", "mp_efficiency", "comm_rounds_mp", "reshard_factor",
                  "dp_overhead_bytes"},
                 "cost_params");
  CostParams p;
  p.bytes_per_param_state = get_or<double>(j, "bytes_per_param_state", p.bytes_per_param_state,
                                           "cost_params");
  p.mp_efficiency = get_or<double>(j, "mp_efficiency", p.mp_efficiency, "cost_params");
  p.comm_rounds_mp = get_or<int>(j, "comm_rounds_mp", p.comm_rounds_mp, "cost_params");
  p.reshard_factor = get_or<double>(j, "reshard_factor", p.reshard_factor, "cost_params");
  p.dp_overhead_bytes = get_or<double>(j, "dp_overhead_bytes", p.dp_overhead_bytes, "cost_params");
  p.validate();
  return p;
}

DriftModel parse_drift(const json& j) {
  reject_unknown(j, {"sigma_noise", "sigma_drift"}, "drift");
  DriftModel d;
  d.sigma_noise = get_or<double>(j, "sigma_noise", d.sigma_noise, "drift");
  d.sigma_drift = get_or<double>(j, "sigma_drift", d.sigma_drift, "drift");
  d.validate();
  return d;
}

std::vector<DriftEvent> parse_drift_events(const json& j) {
  if (!j.is_array()) throw ValidationError("drift_events: expected an array");
  std::vector<DriftEvent> events;
  for (const json& e : j) {
    reject_unknown(e, {"epoch", "component", "factor"}, "drift_events");
    DriftEvent ev;
    ev.epoch = get_or<int>(e, "epoch", 0, "drift_events");
    ev.component = get_or<int>(e, "component", 0, "drift_events");
    ev.factor = get_or<double>(e, "factor", 1.0, "drift_events");
    if (!(ev.factor > 0.0)) throw ValidationError("drift_events: factor must be positive");
    events.push_back(ev);
  }
  return events;
}

SimParams parse_sim(const json& j) {
  reject_unknown(j, {"profile_cost_s", "checkpoint_cost_s", "tau", "profile_every_epoch"}, "sim");
  SimParams s;
  s.profile_cost_s = get_or<double>(j, "profile_cost_s", s.profile_cost_s, "sim");
  s.checkpoint_cost_s = get_or<double>(j, "checkpoint_cost_s", s.checkpoint_cost_s, "sim");
  s.tau = get_or<double>(j, "tau", s.tau, "sim");
  s.profile_every_epoch = get_or<bool>(j, "profile_every_epoch", s.profile_every_epoch, "sim");
  if (s.profile_cost_s < 0.0 || s.checkpoint_cost_s < 0.0) {
    throw ValidationError("sim: costs must be non-negative");
  }
  if (!(s.tau > 0.0)) throw ValidationError("sim: tau must be positive");
  return s;
}

SolverSpec parse_solver(const json& j) {
  reject_unknown(j, {"kind", "mem_buckets"}, "solver");
  SolverSpec s;
  s.kind = get_or<std::string>(j, "kind", s.kind, "solver");
  s.mem_buckets = get_or<int>(j, "mem_buckets", s.mem_buckets, "solver");
  if (s.kind != "dp" && s.kind != "exact") {
    throw ValidationError("solver: kind must be dp or exact");
  }
  if (s.mem_buckets < 16) throw ValidationError("solver: mem_buckets must be >= 16");
  return s;
}

WorkloadSpec parse_workload_file(const json& j) {
  reject_unknown(j, {"name", "components", "schema_version"}, "workload file");
  WorkloadSpec spec;
  spec.name = get_or<std::string>(j, "name", "workload", "workload file");
  if (!j.contains("components") || !j.at("components").is_array()) {
    throw ValidationError("workload file: missing components array");
  }
  for (const json& c : j.at("components")) {
    reject_unknown(c,
                   {"kind", "flops_fwd", "flops_bwd", "param_count",
                    "activation_bytes_per_sample"},
                   "workload component");
    ComponentSpec cs;
    cs.kind = component_kind_from_string(get_or<std::string>(c, "kind", "Conv", "component"));
    cs.flops_fwd = get_or<double>(c, "flops_fwd", 0.0, "component");
    cs.flops_bwd = get_or<double>(c, "flops_bwd", -1.0, "component");
    cs.param_count = get_or<std::int64_t>(c, "param_count", 0, "component");
    cs.activation_bytes_per_sample =
        get_or<std::int64_t>(c, "activation_bytes_per_sample", 0, "component");
    spec.components.push_back(cs);
  }
  return spec;
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / p).string();
}

}  // namespace

ModelGraph load_workload(const WorkloadRef& ref, const std::string& base_dir) {
  if (ref.model == "resnet50") return resnet50_like(ref.input_resolution, ref.num_classes);
  if (ref.model == "vit_b16") return vit_b16_like(ref.input_resolution, ref.num_classes);
  if (ref.model.rfind("file:", 0) == 0) {
    const std::string path = resolve_path(ref.model.substr(5), base_dir);
    json j;
    try {
      j = json::parse(read_file(path));
    } catch (const json::exception& e) {
      throw ValidationError("workload file " + path + ": " + e.what());
    }
    return build_chain(parse_workload_file(j));
  }
  throw ValidationError("workload: unknown model '" + ref.model +
                        "' (expected resnet50 | vit_b16 | file:<path>)");
}

ModelGraph ExperimentConfig::build_graph(const std::string& base_dir) const {
  return load_workload(workload, base_dir);
}

ExperimentConfig parse_experiment_config(const json& j) {
  reject_unknown(j,
                 {"schema_version", "name", "notes", "workload", "cluster", "schedule",
                  "cost_params", "drift", "drift_events", "sim", "solver", "modes", "seeds"},
                 "config");
  const int version = get_or<int>(j, "schema_version", kSchemaVersion, "config");
  if (version != kSchemaVersion) {
    throw ValidationError("config: unsupported schema_version " + std::to_string(version));
  }

  ExperimentConfig config;
  config.name = get_or<std::string>(j, "name", config.name, "config");
  config.notes = get_or<std::string>(j, "notes", config.notes, "config");
  if (j.contains("workload")) config.workload = parse_workload_ref(j.at("workload"));
  if (j.contains("cluster")) config.cluster = parse_cluster_spec(j.at("cluster"));
  if (j.contains("schedule")) config.schedule = parse_schedule(j.at("schedule"));
  if (j.contains("cost_params")) config.cost_params = parse_cost_params(j.at("cost_params"));
  if (j.contains("drift")) config.drift = parse_drift(j.at("drift"));
  if (j.contains("drift_events")) config.drift_events = parse_drift_events(j.at("drift_events"));
  if (j.contains("sim")) config.sim = parse_sim(j.at("sim"));
  if (j.contains("solver")) config.solver = parse_solver(j.at("solver"));
  if (j.contains("modes")) {
    config.modes = get_or<std::vector<std::string>>(j, "modes", config.modes, "config");
    for (const std::string& m : config.modes) mode_from_string(m);  // validate
  }
  if (j.contains("seeds")) {
    config.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", config.seeds, "config");
    if (config.seeds.empty()) throw ValidationError("config: seeds must not be empty");
  }
  config.sim.mem_buckets = config.solver.mem_buckets;
  config.sim.use_exact_solver = config.solver.kind == "exact";
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
  return parse_experiment_config(j);
}

ClusterSpec parse_cluster_arg(const std::string& arg, const std::string& base_dir) {
  if (arg.rfind("file:", 0) == 0) {
    const std::string path = resolve_path(arg.substr(5), base_dir);
    json j;
    try {
      j = json::parse(read_file(path));
    } catch (const json::exception& e) {
      throw ValidationError("cluster file " + path + ": " + e.what());
    }
    return parse_cluster_spec(j);
  }
  // Inline key=value list: k=8,mem=32,tput=15,bw=25,lat=5
  ClusterSpec spec;
  std::stringstream stream(arg);
  std::string token;
  while (std::getline(stream, token, ',')) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("cluster: expected key=value, got '" + token + "'");
    }
    const std::string key = token.substr(0, eq);
    double value;
    try {
      value = std::stod(token.substr(eq + 1));
    } catch (const std::exception&) {
      throw ValidationError("cluster: bad value in '" + token + "'");
    }
    if (key == "k") spec.k = static_cast<int>(value);
    else if (key == "mem" || key == "mem_gb") spec.mem_gb = value;
    else if (key == "tput" || key == "throughput_tflops") spec.throughput_tflops = value;
    else if (key == "bw" || key == "bandwidth_gbps") spec.bandwidth_gbps = value;
    else if (key == "lat" || key == "latency_us") spec.latency_us = value;
    else throw ValidationError("cluster: unknown key '" + key + "'");
  }
  return spec;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& config) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = config.name;
  if (!config.notes.empty()) j["notes"] = config.notes;
  j["workload"] = {{"model", config.workload.model},
                   {"input_resolution", config.workload.input_resolution},
                   {"num_classes", config.workload.num_classes}};
  j["cluster"] = {{"k", config.cluster.k},
                  {"mem_gb", config.cluster.mem_gb},
                  {"throughput_tflops", config.cluster.throughput_tflops},
                  {"bandwidth_gbps", config.cluster.bandwidth_gbps},
                  {"latency_us", config.cluster.latency_us}};
  j["schedule"] = {{"dataset_size", config.schedule.dataset_size},
                   {"global_batch", config.schedule.global_batch},
                   {"epochs", config.schedule.epochs},
                   {"bytes_per_element", config.schedule.bytes_per_element}};
  j["cost_params"] = {{"bytes_per_param_state", config.cost_params.bytes_per_param_state},
                      {"mp_efficiency", config.cost_params.mp_efficiency},
                      {"comm_rounds_mp", config.cost_params.comm_rounds_mp},
                      {"reshard_factor", config.cost_params.reshard_factor},
                      {"dp_overhead_bytes", config.cost_params.dp_overhead_bytes}};
  j["drift"] = {{"sigma_noise", config.drift.sigma_noise},
                {"sigma_drift", config.drift.sigma_drift}};
  if (!config.drift_events.empty()) {
    json events = json::array();
    for (const DriftEvent& e : config.drift_events) {
      events.push_back({{"epoch", e.epoch}, {"component", e.component}, {"factor", e.factor}});
    }
    j["drift_events"] = events;
  }
  j["sim"] = {{"profile_cost_s", config.sim.profile_cost_s},
              {"checkpoint_cost_s", config.sim.checkpoint_cost_s},
              {"tau", config.sim.tau},
              {"profile_every_epoch", config.sim.profile_every_epoch}};
  j["solver"] = {{"kind", config.solver.kind}, {"mem_buckets", config.solver.mem_buckets}};
  j["modes"] = config.modes;
  j["seeds"] = config.seeds;
  return j;
}

}  // namespace strategem
