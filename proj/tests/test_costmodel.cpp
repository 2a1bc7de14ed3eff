#include <doctest.h>

#include <cmath>
#include <vector>

#include "strategem/costmodel.hpp"
#include "strategem/errors.hpp"
#include "strategem/rng.hpp"
#include "strategem/workload.hpp"

using namespace strategem;

namespace {

// Independent oracle: explicitly simulate the 2(n-1)-step ring schedule
// (reduce-scatter then all-gather). Every step moves payload/n bytes between
// ring neighbours; all transfers in a step overlap, so the step costs one
// chunk transfer plus one hop latency. Summed step by step.
double ring_schedule_oracle(double payload, int n, const Cluster& cluster) {
  if (n == 1) return 0.0;
  const double chunk = payload / n;
  double total = 0.0;
  for (int step = 0; step < n - 1; ++step) {  // reduce-scatter
    total += chunk / cluster.link_bandwidth + cluster.link_latency;
  }
  for (int step = 0; step < n - 1; ++step) {  // all-gather
    total += chunk / cluster.link_bandwidth + cluster.link_latency;
  }
  return total;
}

Component make_component(double flops_fwd, std::int64_t params, std::int64_t act_bytes) {
  Component c;
  c.flops_fwd = flops_fwd;
  c.flops_bwd = 2.0 * flops_fwd;
  c.param_count = params;
  c.activation_bytes_per_sample = act_bytes;
  return c;
}

}  // namespace

TEST_CASE("allreduce closed form matches the ring message-schedule oracle") {
  const std::vector<Cluster> clusters = {
      uniform_cluster(16, 32, 15, 25, 5),
      uniform_cluster(16, 16, 10, 100, 0.5),
      uniform_cluster(16, 64, 120, 2, 50),
  };
  const std::vector<double> payloads = {1e3, 1e6, 1e8};
  double worst = 0.0;
  for (const Cluster& cluster : clusters) {
    for (double payload : payloads) {
      for (int n = 1; n <= 16; ++n) {
        const double closed = allreduce_time(payload, n, cluster);
        const double oracle = ring_schedule_oracle(payload, n, cluster);
        if (oracle == 0.0) {
          CHECK(closed == 0.0);
        } else {
          worst = std::max(worst, std::fabs(closed - oracle) / oracle);
        }
      }
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("allreduce worked examples") {
  const Cluster c = uniform_cluster(8, 32, 15, 25, 5);
  CHECK(allreduce_time(123456.0, 1, c) == 0.0);
  // 2*(3/4)*1e8/25e9 + 6*5e-6
  CHECK(allreduce_time(1e8, 4, c) == doctest::Approx(6.03e-3).epsilon(1e-12));
  // 2*(7/8)*1e8/25e9 + 14*5e-6
  CHECK(allreduce_time(1e8, 8, c) == doctest::Approx(7.0e-3 + 7.0e-5).epsilon(1e-12));
}

TEST_CASE("strategy degree invariants") {
  CHECK_NOTHROW(Strategy::dp(8).validate_for(8));
  CHECK_NOTHROW(Strategy::mp(8).validate_for(8));
  CHECK_NOTHROW(Strategy::hp(2, 4).validate_for(8));
  CHECK_NOTHROW(Strategy::hp(4, 2).validate_for(8));
  CHECK_THROWS_AS(Strategy::dp(4).validate_for(8), ValidationError);
  CHECK_THROWS_AS(Strategy::hp(1, 8).validate_for(8), ValidationError);
  CHECK_THROWS_AS(Strategy::hp(3, 3).validate_for(8), ValidationError);
  CHECK_THROWS_AS(Strategy::hp(4, 4).validate_for(8), ValidationError);

  CHECK(strategies_for(1).size() == 1);  // DP(1,1) only
  CHECK(strategies_for(2).size() == 2);  // DP, MP
  CHECK(strategies_for(8).size() == 4);  // DP, MP, HP(2x4), HP(4x2)
  CHECK(hp_factorizations(7).empty());   // prime
  CHECK(Strategy::dp(8) < Strategy::mp(8));
  CHECK(Strategy::mp(8) < Strategy::hp(2, 4));
  CHECK(Strategy::hp(2, 4) < Strategy::hp(4, 2));
}

TEST_CASE("estimate: degenerate single device") {
  const Cluster c = uniform_cluster(1, 32, 15, 25, 5);
  TrainingSchedule sched;
  sched.global_batch = 64;
  CostParams params;
  const Component comp = make_component(1e9, 1000000, 100000);

  const CostEstimate e = estimate(comp, Strategy::dp(1), c, sched, params);
  CHECK(e.t_comm == 0.0);
  CHECK(e.t_comp == doctest::Approx(3e9 * 64 / 15e12).epsilon(1e-12));
  CHECK(e.mem_per_device ==
        doctest::Approx(16.0 * 1000000 + 100000.0 * 64).epsilon(1e-12));
}

TEST_CASE("estimate: MP splits parameter state across devices") {
  const Cluster c = uniform_cluster(4, 32, 15, 25, 5);
  TrainingSchedule sched;
  sched.global_batch = 1;
  CostParams params;
  params.dp_overhead_bytes = 0.0;
  Component comp = make_component(1e9, 10000000, 0);

  const CostEstimate e = estimate(comp, Strategy::mp(4), c, sched, params);
  // 16 bytes/param * 10e6 params / 4 devices
  CHECK(e.mem_per_device == doctest::Approx(40e6).epsilon(1e-12));
  // d = 1: no gradient sync
  CHECK(e.t_comm_grad == 0.0);
}

TEST_CASE("estimate: DP gradient payload composes with the all-reduce oracle") {
  const Cluster c = uniform_cluster(8, 32, 15, 25, 5);
  TrainingSchedule sched;
  sched.global_batch = 512;
  CostParams params;
  Component comp = make_component(1e10, 25000000, 500000);

  const CostEstimate e = estimate(comp, Strategy::dp(8), c, sched, params);
  CHECK(e.t_comm_act == 0.0);  // m = 1
  CHECK(e.t_comm == doctest::Approx(allreduce_time(1e8, 8, c)).epsilon(1e-12));
}

TEST_CASE("estimate: MP communication counts comm_rounds_mp activation all-reduces") {
  const Cluster c = uniform_cluster(8, 32, 15, 25, 5);
  TrainingSchedule sched;
  sched.global_batch = 16;
  CostParams params;
  params.comm_rounds_mp = 4;
  Component comp = make_component(1e9, 1000, 60000);

  const CostEstimate e = estimate(comp, Strategy::mp(8), c, sched, params);
  const double expected = 4.0 * allreduce_time(60000.0 * 16, 8, c);
  CHECK(e.t_comm_act == doctest::Approx(expected).epsilon(1e-12));

  // HP: activation all-reduce over m at the local batch, plus gradient
  // all-reduce of the per-shard parameters over d.
  const CostEstimate h = estimate(comp, Strategy::hp(2, 4), c, sched, params);
  const double expected_act = 4.0 * allreduce_time(60000.0 * 8, 4, c);
  const double expected_grad = allreduce_time(4.0 * 1000 / 4, 2, c);
  CHECK(h.t_comm_act == doctest::Approx(expected_act).epsilon(1e-12));
  CHECK(h.t_comm_grad == doctest::Approx(expected_grad).epsilon(1e-12));
  CHECK(h.t_comm == doctest::Approx(expected_act + expected_grad).epsilon(1e-12));
}

TEST_CASE("estimate: compute efficiency discount applies to any m > 1") {
  const Cluster c = uniform_cluster(8, 32, 15, 25, 5);
  TrainingSchedule sched;
  sched.global_batch = 64;
  CostParams params;
  params.mp_efficiency = 0.85;
  const Component comp = make_component(1e9, 1000, 1000);

  const double dp = estimate(comp, Strategy::dp(8), c, sched, params).t_comp;
  const double mp = estimate(comp, Strategy::mp(8), c, sched, params).t_comp;
  const double hp = estimate(comp, Strategy::hp(4, 2), c, sched, params).t_comp;
  CHECK(dp == doctest::Approx(3e9 * 8 / 15e12).epsilon(1e-12));
  CHECK(mp == doctest::Approx(dp / 0.85).epsilon(1e-12));
  CHECK(hp == doctest::Approx(dp / 0.85).epsilon(1e-12));  // d*m = K either way
}

TEST_CASE("monotonicity in FLOPs and payload") {
  const Cluster c = uniform_cluster(8, 32, 15, 25, 5);
  TrainingSchedule sched;
  CostParams params;
  Xoshiro256pp rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const double f = 1e6 + rng.uniform01() * 1e12;
    const std::int64_t p = 1 + static_cast<std::int64_t>(rng.uniform01() * 1e8);
    const std::int64_t a = 1 + static_cast<std::int64_t>(rng.uniform01() * 1e7);
    for (const Strategy& s : strategies_for(8)) {
      const CostEstimate lo = estimate(make_component(f, p, a), s, c, sched, params);
      const CostEstimate hi = estimate(make_component(f * 1.7, p * 2, a * 2), s, c, sched, params);
      CHECK(hi.t_comp >= lo.t_comp);
      CHECK(hi.t_comm >= lo.t_comm);
    }
  }
}

TEST_CASE("reshard cost worked examples") {
  const Cluster c = uniform_cluster(8, 32, 15, 25, 5);
  TrainingSchedule sched;
  sched.global_batch = 100;
  CostParams params;
  params.reshard_factor = 1.0;
  Component comp = make_component(1e9, 1000, 100000);  // act * batch = 1e7 bytes

  CHECK(reshard_cost(Strategy::dp(8), Strategy::dp(8), comp, c, sched, params) == 0.0);
  CHECK(reshard_cost(Strategy::dp(8), Strategy::mp(8), comp, c, sched, params) ==
        doctest::Approx(2.0 * (4.0e-4 + 5e-6)).epsilon(1e-12));

  params.reshard_factor = 0.0;
  CHECK(reshard_cost(Strategy::dp(8), Strategy::mp(8), comp, c, sched, params) == 0.0);
  CHECK(reshard_cost(Strategy::hp(2, 4), Strategy::hp(4, 2), comp, c, sched, params) == 0.0);
}

TEST_CASE("K = 1 forces zero communication for every strategy") {
  const Cluster c = uniform_cluster(1, 32, 15, 25, 5);
  TrainingSchedule sched;
  CostParams params;
  const Component comp = make_component(1e9, 1000000, 100000);
  for (const Strategy& s : strategies_for(1)) {
    const CostEstimate e = estimate(comp, s, c, sched, params);
    CHECK(e.t_comm == 0.0);
    CHECK(e.mem_per_device ==
          doctest::Approx(16.0 * comp.param_count +
                          static_cast<double>(comp.activation_bytes_per_sample) *
                              sched.global_batch));
  }
}

TEST_CASE("DP memory exceeds MP memory for parameter-dominated components") {
  const Cluster c = uniform_cluster(8, 32, 15, 25, 5);
  TrainingSchedule sched;
  sched.global_batch = 64;
  CostParams params;
  const Component comp = make_component(1e9, 50000000, 10000);  // params >> activations
  const double dp = estimate(comp, Strategy::dp(8), c, sched, params).mem_per_device;
  const double mp = estimate(comp, Strategy::mp(8), c, sched, params).mem_per_device;
  CHECK(dp > mp);
}
