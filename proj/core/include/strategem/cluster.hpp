#pragma once

#include <cstdint>
#include <vector>

namespace strategem {

struct Device {
  int id = 0;
  std::int64_t mem_capacity = 0;  // bytes
  double throughput = 0.0;        // FLOPs per second
};

// A pool of devices with a uniform all-to-all interconnect described by a
// single (bandwidth, latency) pair. Heterogeneous device fields are
// representable but the planner only accepts homogeneous clusters.
struct Cluster {
  std::vector<Device> devices;
  double link_bandwidth = 0.0;  // bytes per second
  double link_latency = 0.0;    // seconds

  int size() const { return static_cast<int>(devices.size()); }
  std::int64_t min_mem_capacity() const;
  bool homogeneous() const;
};

// Unit conventions, documented in every emitted report header:
// memory is binary gigabytes (2^30 bytes); bandwidth is decimal GB/s (1e9);
// throughput is decimal TFLOP/s (1e12); latency is microseconds.
Cluster uniform_cluster(int k, double mem_gb, double throughput_tflops,
                        double bandwidth_gbps, double latency_us);

// Same per-device hardware, first k devices (used by sweeps).
Cluster with_device_count(const Cluster& cluster, int k);

}  // namespace strategem
