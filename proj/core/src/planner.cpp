#include "strategem/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "strategem/errors.hpp"

namespace strategem {

namespace {

void require_solvable(const ModelGraph& graph, const Cluster& cluster) {
  if (graph.components.empty()) throw ValidationError("planner: model has no components");
  if (!cluster.homogeneous()) {
    throw ValidationError("planner: heterogeneous clusters are not supported");
  }
}

Plan finish_plan(const CostTable& table, std::vector<int> choice, const char* solver) {
  Plan plan;
  const int n = table.num_components();
  plan.assignment.reserve(n);
  plan.per_component.reserve(n);
  double time = 0.0;
  double mem = 0.0;
  for (int i = 0; i < n; ++i) {
    const CostEstimate& c = table.cost[i][choice[i]];
    plan.assignment.push_back(table.strategies[choice[i]]);
    plan.per_component.push_back(c);
    time += c.t_comp + c.t_comm;
    mem += c.mem_per_device;
    if (i > 0) time += table.reshard[i][choice[i - 1]][choice[i]];
  }
  plan.step_time = time;
  plan.mem_per_device = mem;
  plan.feasible = mem <= table.mem_budget;
  plan.solver = solver;
  return plan;
}

// Fallback when nothing fits: the memory constraint is separable, so the
// least-violating assignment takes the per-component memory argmin
// (ties by canonical strategy order via strict <).
Plan least_violating(const CostTable& table, const char* solver) {
  const int n = table.num_components();
  std::vector<int> choice(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int s = 1; s < table.num_strategies(); ++s) {
      if (table.cost[i][s].mem_per_device < table.cost[i][choice[i]].mem_per_device) {
        choice[i] = s;
      }
    }
  }
  Plan plan = finish_plan(table, choice, solver);
  plan.feasible = false;
  return plan;
}

}  // namespace

CostTable build_cost_table(const ModelGraph& graph, const Cluster& cluster,
                           const TrainingSchedule& schedule, const CostParams& params) {
  require_solvable(graph, cluster);
  schedule.validate();
  params.validate();

  CostTable table;
  table.strategies = strategies_for(cluster.size());
  table.mem_budget = static_cast<double>(cluster.min_mem_capacity());
  const int n = graph.size();
  const int s = static_cast<int>(table.strategies.size());

  table.cost.assign(n, {});
  for (int i = 0; i < n; ++i) {
    table.cost[i].reserve(s);
    for (const Strategy& strat : table.strategies) {
      table.cost[i].push_back(estimate(graph.components[i], strat, cluster, schedule, params));
    }
  }

  table.reshard.assign(n, {});
  for (int i = 1; i < n; ++i) {
    table.reshard[i].assign(s, std::vector<double>(s, 0.0));
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) {
        table.reshard[i][a][b] = reshard_cost(table.strategies[a], table.strategies[b],
                                              graph.components[i], cluster, schedule, params);
      }
    }
  }
  return table;
}

double objective_on(const std::vector<Strategy>& assignment, const CostTable& table) {
  const int n = table.num_components();
  if (static_cast<int>(assignment.size()) != n) {
    throw ValidationError("objective: assignment length does not match component count");
  }
  // Costs are functions of the degrees alone, so degenerate tags (MP or DP
  // on one device are the same (1,1) layout) resolve by degree match.
  auto index_of = [&table](const Strategy& s) {
    int fallback = -1;
    for (int i = 0; i < table.num_strategies(); ++i) {
      if (table.strategies[i] == s) return i;
      if (table.strategies[i].dp_degree == s.dp_degree &&
          table.strategies[i].mp_degree == s.mp_degree) {
        fallback = i;
      }
    }
    return fallback;
  };
  double total = 0.0;
  int prev = -1;
  for (int i = 0; i < n; ++i) {
    const int s = index_of(assignment[i]);
    if (s < 0) {
      throw ValidationError("objective: assignment uses a strategy invalid for this cluster");
    }
    total += table.cost[i][s].t_comp + table.cost[i][s].t_comm;
    if (i > 0) total += table.reshard[i][prev][s];
    prev = s;
  }
  return total;
}

double objective(const std::vector<Strategy>& assignment, const ModelGraph& graph,
                 const Cluster& cluster, const TrainingSchedule& schedule,
                 const CostParams& params) {
  return objective_on(assignment, build_cost_table(graph, cluster, schedule, params));
}

Plan solve_exact_on(const CostTable& table) {
  const int n = table.num_components();
  const int s = table.num_strategies();

  double space = 1.0;
  for (int i = 0; i < n; ++i) {
    space *= s;
    if (space > kMaxExactAssignments) {
      std::ostringstream msg;
      msg << "solve_exact: search space " << s << "^" << n
          << " exceeds " << kMaxExactAssignments << " assignments; use solve_dp";
      throw SearchSpaceError(msg.str());
    }
  }

  // Odometer enumeration in lexicographic order over the canonical strategy
  // order (component 0 most significant); strict improvement keeps the
  // lexicographically smallest assignment among objective ties.
  std::vector<int> choice(n, 0);
  std::vector<int> best;
  double best_time = std::numeric_limits<double>::infinity();
  bool any_feasible = false;

  while (true) {
    double time = 0.0;
    double mem = 0.0;
    for (int i = 0; i < n; ++i) {
      const CostEstimate& c = table.cost[i][choice[i]];
      time += c.t_comp + c.t_comm;
      mem += c.mem_per_device;
      if (i > 0) time += table.reshard[i][choice[i - 1]][choice[i]];
    }
    if (mem <= table.mem_budget && time < best_time) {
      best_time = time;
      best = choice;
      any_feasible = true;
    }
    int pos = n - 1;
    while (pos >= 0 && choice[pos] == s - 1) choice[pos--] = 0;
    if (pos < 0) break;
    ++choice[pos];
  }

  if (!any_feasible) return least_violating(table, "exact");
  return finish_plan(table, best, "exact");
}

Plan solve_exact(const ModelGraph& graph, const Cluster& cluster,
                 const TrainingSchedule& schedule, const CostParams& params) {
  return solve_exact_on(build_cost_table(graph, cluster, schedule, params));
}

Plan solve_dp_on(const CostTable& table, int mem_buckets) {
  if (mem_buckets < 16) throw ValidationError("solve_dp: mem_buckets must be >= 16");
  const int n = table.num_components();
  const int s = table.num_strategies();
  const double bucket_size = table.mem_budget / mem_buckets;

  // Per-component memory in buckets, rounded up (admissible: cumulative
  // rounded consumption never undercounts true consumption).
  std::vector<std::vector<int>> mem_b(n, std::vector<int>(s, 0));
  bool overflow = false;
  for (int i = 0; i < n && !overflow; ++i) {
    for (int st = 0; st < s; ++st) {
      const double b = std::ceil(table.cost[i][st].mem_per_device / bucket_size);
      if (b > mem_buckets) {
        mem_b[i][st] = mem_buckets + 1;
      } else {
        mem_b[i][st] = std::max(0, static_cast<int>(b));
      }
    }
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // f[st][b]: best time through component i with strategy st and total
  // memory of exactly b buckets (rounded).
  std::vector<std::vector<double>> f(s, std::vector<double>(mem_buckets + 1, kInf));
  std::vector<std::vector<std::vector<int>>> parent(
      n, std::vector<std::vector<int>>(s, std::vector<int>(mem_buckets + 1, -1)));

  for (int st = 0; st < s; ++st) {
    const int mb = mem_b[0][st];
    if (mb > mem_buckets) continue;
    const double t = table.cost[0][st].t_comp + table.cost[0][st].t_comm;
    if (t < f[st][mb]) f[st][mb] = t;
  }

  for (int i = 1; i < n; ++i) {
    std::vector<std::vector<double>> g(s, std::vector<double>(mem_buckets + 1, kInf));
    for (int prev = 0; prev < s; ++prev) {
      for (int b = 0; b <= mem_buckets; ++b) {
        const double base = f[prev][b];
        if (base == kInf) continue;
        for (int st = 0; st < s; ++st) {
          const int nb = b + mem_b[i][st];
          if (nb > mem_buckets) continue;
          const double t = base + table.cost[i][st].t_comp + table.cost[i][st].t_comm +
                           table.reshard[i][prev][st];
          if (t < g[st][nb]) {
            g[st][nb] = t;
            parent[i][st][nb] = prev;
          }
        }
      }
    }
    f.swap(g);
  }

  int best_st = -1;
  int best_b = -1;
  double best_t = kInf;
  for (int st = 0; st < s; ++st) {
    for (int b = 0; b <= mem_buckets; ++b) {
      if (f[st][b] < best_t) {
        best_t = f[st][b];
        best_st = st;
        best_b = b;
      }
    }
  }
  if (best_st < 0) return least_violating(table, "dp");

  std::vector<int> choice(n, 0);
  int st = best_st;
  int b = best_b;
  for (int i = n - 1; i >= 0; --i) {
    choice[i] = st;
    if (i > 0) {
      const int prev = parent[i][st][b];
      b -= mem_b[i][st];
      st = prev;
    }
  }
  return finish_plan(table, choice, "dp");
}

Plan solve_dp(const ModelGraph& graph, const Cluster& cluster,
              const TrainingSchedule& schedule, const CostParams& params,
              int mem_buckets) {
  return solve_dp_on(build_cost_table(graph, cluster, schedule, params), mem_buckets);
}

Plan uniform_plan(StrategyTag tag, const ModelGraph& graph, const Cluster& cluster,
                  const TrainingSchedule& schedule, const CostParams& params) {
  require_solvable(graph, cluster);
  const int k = cluster.size();

  std::vector<Strategy> candidates;
  switch (tag) {
    case StrategyTag::DP:
      candidates.push_back(Strategy::dp(k));
      break;
    case StrategyTag::MP:
      candidates.push_back(Strategy::mp(k));
      break;
    case StrategyTag::HP: {
      candidates = hp_factorizations(k);
      if (candidates.empty()) {
        throw ValidationError("uniform_plan: HP has no valid factorization for K = " +
                              std::to_string(k));
      }
      break;
    }
  }

  const CostTable table = build_cost_table(graph, cluster, schedule, params);
  Plan best;
  bool have = false;
  for (const Strategy& strat : candidates) {
    const auto it = std::find(table.strategies.begin(), table.strategies.end(), strat);
    int idx;
    if (it == table.strategies.end()) {
      // Degenerate tags (e.g. MP on K = 1) are valid but collapse to DP(1,1).
      strat.validate_for(k);
      idx = 0;
    } else {
      idx = static_cast<int>(it - table.strategies.begin());
    }
    Plan plan = finish_plan(table, std::vector<int>(graph.size(), idx), "uniform");
    // Report the requested tag even for the K = 1 degenerate case.
    for (Strategy& s : plan.assignment) s = strat;
    // Prefer feasible plans, then minimal cost; <= breaks ties toward the
    // later (larger d) factorization.
    const bool better = !have ||
                        (plan.feasible && !best.feasible) ||
                        (plan.feasible == best.feasible && plan.step_time <= best.step_time);
    if (better) {
      best = plan;
      have = true;
    }
  }
  return best;
}

std::uint64_t plan_hash(const Plan& plan) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  for (const Strategy& s : plan.assignment) {
    mix(static_cast<std::uint64_t>(s.tag));
    mix(static_cast<std::uint64_t>(s.dp_degree));
    mix(static_cast<std::uint64_t>(s.mp_degree));
  }
  return h;
}

}  // namespace strategem
