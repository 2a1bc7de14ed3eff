#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "strategem/config.hpp"
#include "strategem/errors.hpp"
#include "strategem/io.hpp"
#include "strategem/log.hpp"
#include "strategem/planner.hpp"
#include "strategem/reftrainer.hpp"
#include "strategem/rng.hpp"
#include "strategem/simulator.hpp"

namespace strategem::cli {

namespace {

using nlohmann::json;

// Unit conventions echoed into every emitted header.
json units_header() {
  return json{{"mem_gb", "2^30 bytes"},
              {"bandwidth_gbps", "1e9 bytes/s"},
              {"throughput_tflops", "1e12 FLOP/s"},
              {"latency_us", "1e-6 s"}};
}

std::string out_path(const CommonOptions& common, const std::string& name) {
  if (name.empty() || common.out_dir.empty()) return name;
  if (std::filesystem::path(name).is_absolute()) return name;
  return (std::filesystem::path(common.out_dir) / name).string();
}

ExperimentConfig load_config(const CommonOptions& common) {
  ExperimentConfig config;
  if (!common.config_path.empty()) {
    config = load_experiment_config(common.config_path);
  }
  if (common.seed.has_value()) config.seeds = {*common.seed};
  return config;
}

std::string config_base_dir(const CommonOptions& common) {
  if (common.config_path.empty()) return "";
  return std::filesystem::path(common.config_path).parent_path().string();
}

json plan_to_json(const Plan& plan, const ModelGraph& graph, const ExperimentConfig& config) {
  json components = json::array();
  for (int i = 0; i < graph.size(); ++i) {
    const CostEstimate& c = plan.per_component[i];
    components.push_back({{"id", graph.components[i].id},
                          {"kind", to_string(graph.components[i].kind)},
                          {"strategy", to_string(plan.assignment[i].tag)},
                          {"dp_degree", plan.assignment[i].dp_degree},
                          {"mp_degree", plan.assignment[i].mp_degree},
                          {"t_comp_s", c.t_comp},
                          {"t_comm_s", c.t_comm},
                          {"mem_bytes", c.mem_per_device}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"model", graph.name},
              {"solver", plan.solver},
              {"feasible", plan.feasible},
              {"step_time_s", plan.step_time},
              {"mem_per_device_bytes", plan.mem_per_device},
              {"units", units_header()},
              {"params_echo", experiment_config_to_json(config)},
              {"components", components}};
}

json metrics_to_json(const SimMetrics& m, const ExperimentConfig& config) {
  json replans = json::array();
  for (const ReplanRecord& r : m.replan_events) {
    replans.push_back({{"epoch", r.epoch},
                       {"old_plan_hash", r.old_plan_hash},
                       {"new_plan_hash", r.new_plan_hash}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"mode", m.mode},
              {"seed", m.seed},
              {"total_time_s", m.total_time},
              {"throughput_samples_per_s", m.throughput},
              {"comm_fraction", m.comm_fraction},
              {"peak_mem_bytes", m.peak_mem_per_device},
              {"checkpoint_count", m.checkpoint_count},
              {"replan_events", replans},
              {"units", units_header()},
              {"params_echo", experiment_config_to_json(config)}};
}

std::string trace_to_csv(const std::vector<TraceEvent>& trace) {
  std::ostringstream out;
  out << "t_start,duration,event_type,component_id,epoch,batch\n";
  char line[160];
  for (const TraceEvent& e : trace) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%s,%d,%d,%" PRId64 "\n", e.t_start,
                  e.duration, to_string(e.type), e.component, e.epoch,
                  static_cast<std::int64_t>(e.batch));
    out << line;
  }
  return out.str();
}

struct SweepPoint {
  int k = 0;
  Mode mode = Mode::Single;
  bool ok = false;
  std::string error;
  SimMetrics metrics;
};

}  // namespace

int cmd_plan(const CommonOptions& common, const PlanOptions& opt) {
  ExperimentConfig config = load_config(common);
  const std::string base_dir = config_base_dir(common);
  if (!opt.model.empty()) {
    config.workload.model = opt.model;
    if (opt.model == "vit_b16" && config.workload.input_resolution % 16 != 0) {
      config.workload.input_resolution = 224;
    }
  }
  if (!opt.cluster.empty()) config.cluster = parse_cluster_arg(opt.cluster, base_dir);
  if (!opt.solver.empty()) {
    if (opt.solver != "dp" && opt.solver != "exact") {
      throw ValidationError("--solver must be dp or exact");
    }
    config.solver.kind = opt.solver;
  }
  if (!opt.params_path.empty()) {
    json j;
    try {
      j = json::parse(read_file(opt.params_path));
    } catch (const json::exception& e) {
      throw ValidationError(std::string("params file: ") + e.what());
    }
    json wrapped = {{"cost_params", j}};
    ExperimentConfig tmp = parse_experiment_config(wrapped);
    config.cost_params = tmp.cost_params;
  }

  const ModelGraph graph = config.build_graph(base_dir);
  const Cluster cluster = config.cluster.build();
  const Plan plan = config.solver.kind == "exact"
                        ? solve_exact(graph, cluster, config.schedule, config.cost_params)
                        : solve_dp(graph, cluster, config.schedule, config.cost_params,
                                   config.solver.mem_buckets);

  atomic_write_file(out_path(common, opt.out), plan_to_json(plan, graph, config).dump(2) + "\n");
  std::printf("plan: %s solver=%s feasible=%s step_time=%.6gs mem/device=%.6g bytes\n",
              graph.name.c_str(), plan.solver.c_str(), plan.feasible ? "yes" : "no",
              plan.step_time, plan.mem_per_device);
  return plan.feasible ? 0 : 2;
}

int cmd_simulate(const CommonOptions& common, const SimulateOptions& opt) {
  ExperimentConfig config = load_config(common);
  const ModelGraph graph = config.build_graph(config_base_dir(common));
  const Cluster cluster = config.cluster.build();
  const Mode mode = mode_from_string(opt.mode);
  const bool want_trace = !opt.trace_path.empty();

  const RunResult result =
      run(graph, cluster, config.schedule, mode, config.drift, config.drift_events,
          config.cost_params, config.sim, config.seeds.front(), want_trace);

  if (want_trace) {
    atomic_write_file(out_path(common, opt.trace_path), trace_to_csv(result.trace));
  }
  if (!opt.metrics_path.empty()) {
    atomic_write_file(out_path(common, opt.metrics_path),
                      metrics_to_json(result.metrics, config).dump(2) + "\n");
  }
  std::printf("simulate: mode=%s total_time=%.6gs throughput=%.6g samples/s "
              "comm_fraction=%.4f peak_mem=%.6g bytes replans=%zu\n",
              result.metrics.mode.c_str(), result.metrics.total_time,
              result.metrics.throughput, result.metrics.comm_fraction,
              result.metrics.peak_mem_per_device, result.metrics.replan_events.size());
  return 0;
}

int cmd_sweep(const CommonOptions& common, const SweepOptions& opt) {
  if (opt.k_values.empty()) throw ValidationError("sweep: --k must list at least one value");
  for (int k : opt.k_values) {
    if (k < 1) throw ValidationError("sweep: device counts must be >= 1");
  }
  ExperimentConfig config = load_config(common);
  const ModelGraph graph = config.build_graph(config_base_dir(common));
  const std::uint64_t seed = config.seeds.front();

  // Single-device reference, shared by every speedup column.
  const Cluster ref_cluster = [&] {
    ClusterSpec spec = config.cluster;
    spec.k = 1;
    return spec.build();
  }();
  const RunResult single = run(graph, ref_cluster, config.schedule, Mode::Single, config.drift,
                               config.drift_events, config.cost_params, config.sim, seed, false);
  const double t_single = single.metrics.total_time;

  std::vector<SweepPoint> points;
  for (int k : opt.k_values) {
    for (const std::string& mode_name : config.modes) {
      SweepPoint p;
      p.k = k;
      p.mode = mode_from_string(mode_name);
      points.push_back(p);
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= points.size()) return;
      SweepPoint& p = points[idx];
      try {
        ClusterSpec spec = config.cluster;
        spec.k = p.k;
        const RunResult r = run(graph, spec.build(), config.schedule, p.mode, config.drift,
                                config.drift_events, config.cost_params, config.sim, seed, false);
        p.metrics = r.metrics;
        p.ok = true;
      } catch (const std::exception& e) {
        p.error = e.what();
        log_warn("sweep point k=" + std::to_string(p.k) + " mode=" + to_string(p.mode) +
                 " failed: " + p.error);
      }
    }
  };
  const int jobs = std::max(1, common.jobs);
  std::vector<std::thread> threads;
  for (int t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  std::ostringstream csv;
  csv << "k,mode,feasible,total_time_s,speedup,efficiency,comm_fraction,peak_mem_bytes\n";
  std::size_t failures = 0;
  for (const SweepPoint& p : points) {
    if (!p.ok) {
      ++failures;
      csv << p.k << "," << to_string(p.mode) << ",0,,,,,\n";
      continue;
    }
    const double speedup = t_single / p.metrics.total_time;
    char line[256];
    std::snprintf(line, sizeof(line), "%d,%s,1,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.k,
                  to_string(p.mode), p.metrics.total_time, speedup, speedup / p.k,
                  p.metrics.comm_fraction, p.metrics.peak_mem_per_device);
    csv << line;
  }
  atomic_write_file(out_path(common, opt.out), csv.str());
  std::printf("sweep: %zu points, %zu failed, reference single-device time %.6gs\n",
              points.size(), failures, t_single);
  if (failures == points.size()) return 2;
  return 0;
}

int cmd_verify(const CommonOptions& common, const VerifyOptions& opt) {
  using namespace strategem::ref;
  const std::uint64_t seed = common.seed.value_or(42);
  if (opt.steps < 1) throw ValidationError("verify: --steps must be >= 1");
  if (opt.shards < 1) throw ValidationError("verify: --shards must be >= 1");

  const std::vector<int> dims = {6, 16, 8, 4};
  const int samples = std::max(16, opt.shards) * 4;
  const double eta = 0.05;
  const ToyModel model = ToyModel::random(dims, seed);
  const ToyDataset data = ToyDataset::generate(samples, dims.front(), dims.back(), seed + 1);

  int failed = 0;
  auto row = [&failed](const char* name, bool ok, double value, const char* detail) {
    std::printf("  %-34s %s  (%s = %.3g)\n", name, ok ? "PASS" : "FAIL", detail, value);
    if (!ok) ++failed;
  };

  std::printf("reference trainer equivalence suite (seed=%" PRIu64 ", steps=%d, shards=%d)\n",
              seed, opt.steps, opt.shards);

  {
    const auto untouched = train_single(model, data, eta, 0);
    row("steps=0 leaves parameters", untouched == model.params, 0.0, "diff");
    const auto zero_eta = train_single(model, data, 0.0, opt.steps);
    row("eta=0 leaves parameters", zero_eta == model.params, 0.0, "diff");
  }

  const auto reference = train_single(model, data, eta, opt.steps);

  {
    double worst = 0.0;
    for (int k : {1, 2, opt.shards, samples}) {
      if (samples % k != 0) continue;
      const auto dp = train_dp(model, data, eta, opt.steps, k);
      for (std::size_t i = 0; i < dp.size(); ++i) {
        const double denom = std::max(1e-12, std::fabs(reference[i]));
        worst = std::max(worst, std::fabs(dp[i] - reference[i]) / denom);
      }
    }
    row("data-parallel sharding matches", worst <= 1e-6, worst, "max rel diff");
  }

  {
    bool bitwise = true;
    for (int cut = 1; cut < static_cast<int>(dims.size()) - 1; ++cut) {
      const auto mp = train_mp(model, data, eta, opt.steps, cut);
      if (mp != reference) bitwise = false;
    }
    row("model-parallel split bitwise equal", bitwise, 0.0, "diff");
  }

  {
    const auto grad = gradient(model, data.inputs, data.targets);
    Xoshiro256pp rng = substream(seed, 0xFD);
    double worst = 0.0;
    int probes = 0;
    while (probes < 10) {
      const int idx = static_cast<int>(rng.next() % grad.size());
      if (std::fabs(grad[idx]) < 1e-8) continue;
      const double fd = fd_gradient(model, data.inputs, data.targets, idx, 1e-4);
      worst = std::max(worst, std::fabs(fd - grad[idx]) / std::fabs(grad[idx]));
      ++probes;
    }
    row("backprop matches finite differences", worst <= 1e-5, worst, "max rel err");
  }

  std::printf("%s\n", failed == 0 ? "all equivalence checks passed" : "equivalence checks FAILED");
  return failed == 0 ? 0 : 3;
}

int cmd_report(const CommonOptions& common, const ReportOptions& opt) {
  if (opt.metrics_files.empty()) {
    throw ValidationError("report: at least one --metrics file is required");
  }

  struct Row {
    std::string mode;
    double total_time = 0.0;
    double comm_fraction = 0.0;
    double peak_mem = 0.0;
    int checkpoints = 0;
  };
  std::vector<Row> rows;
  for (const std::string& path : opt.metrics_files) {
    json j;
    try {
      j = json::parse(read_file(path));
    } catch (const json::exception& e) {
      throw ValidationError("metrics " + path + ": " + e.what());
    }
    for (const char* field : {"mode", "total_time_s", "comm_fraction", "peak_mem_bytes"}) {
      if (!j.contains(field)) {
        throw ValidationError("metrics " + path + ": missing field '" + field + "'");
      }
    }
    Row row;
    try {
      row.mode = j.at("mode").get<std::string>();
      row.total_time = j.at("total_time_s").get<double>();
      row.comm_fraction = j.at("comm_fraction").get<double>();
      row.peak_mem = j.at("peak_mem_bytes").get<double>();
      row.checkpoints = j.value("checkpoint_count", 0);
    } catch (const json::exception&) {
      throw ValidationError("metrics " + path + ": field has the wrong type");
    }
    rows.push_back(row);
  }

  double t_single = 0.0;
  for (const Row& r : rows) {
    if (r.mode == "single") t_single = r.total_time;
  }

  std::printf("%-10s %14s %10s %12s %10s\n", "mode", "total_time_s", "speedup", "peak_mem_gb",
              "comm_%");
  std::ostringstream summary;
  summary << "mode,total_time_s,speedup,peak_mem_gb,comm_percent,checkpoints\n";
  std::ostringstream shares;
  shares << "mode,compute_fraction,comm_fraction\n";
  for (const Row& r : rows) {
    const double speedup = t_single > 0.0 ? t_single / r.total_time : 0.0;
    const double gb = r.peak_mem / 1073741824.0;
    std::printf("%-10s %14.4f %10.3f %12.3f %10.2f\n", r.mode.c_str(), r.total_time, speedup, gb,
                100.0 * r.comm_fraction);
    summary << r.mode << "," << r.total_time << "," << speedup << "," << gb << ","
            << 100.0 * r.comm_fraction << "," << r.checkpoints << "\n";
    shares << r.mode << "," << 1.0 - r.comm_fraction << "," << r.comm_fraction << "\n";
  }
  atomic_write_file(out_path(common, "summary.csv"), summary.str());
  atomic_write_file(out_path(common, "comm_shares.csv"), shares.str());

  if (!opt.plan_file.empty()) {
    json j;
    try {
      j = json::parse(read_file(opt.plan_file));
    } catch (const json::exception& e) {
      throw ValidationError("plan " + opt.plan_file + ": " + e.what());
    }
    if (!j.contains("components")) {
      throw ValidationError("plan " + opt.plan_file + ": missing field 'components'");
    }
    std::ostringstream strategies;
    strategies << "component_id,kind,strategy,dp_degree,mp_degree\n";
    std::printf("\nper-component strategy selection:\n");
    for (const json& c : j.at("components")) {
      for (const char* field : {"id", "kind", "strategy", "dp_degree", "mp_degree"}) {
        if (!c.contains(field)) {
          throw ValidationError("plan " + opt.plan_file + ": component missing field '" +
                                field + "'");
        }
      }
      std::printf("  %3d %-10s %s(%dx%d)\n", c.at("id").get<int>(),
                  c.at("kind").get<std::string>().c_str(),
                  c.at("strategy").get<std::string>().c_str(), c.at("dp_degree").get<int>(),
                  c.at("mp_degree").get<int>());
      strategies << c.at("id").get<int>() << "," << c.at("kind").get<std::string>() << ","
                 << c.at("strategy").get<std::string>() << "," << c.at("dp_degree").get<int>()
                 << "," << c.at("mp_degree").get<int>() << "\n";
    }
    atomic_write_file(out_path(common, "strategies.csv"), strategies.str());
  }
  return 0;
}

}  // namespace strategem::cli
