#include "strategem/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "strategem/errors.hpp"

namespace strategem {

std::int64_t Cluster::min_mem_capacity() const {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const Device& d : devices) best = std::min(best, d.mem_capacity);
  return best;
}

bool Cluster::homogeneous() const {
  if (devices.empty()) return true;
  for (const Device& d : devices) {
    if (d.mem_capacity != devices[0].mem_capacity) return false;
    if (d.throughput != devices[0].throughput) return false;
  }
  return true;
}

Cluster uniform_cluster(int k, double mem_gb, double throughput_tflops,
                        double bandwidth_gbps, double latency_us) {
  if (k < 1) throw ValidationError("cluster: device count K must be >= 1");
  if (!(mem_gb > 0.0)) throw ValidationError("cluster: mem_gb must be positive");
  if (!(throughput_tflops > 0.0)) throw ValidationError("cluster: throughput_tflops must be positive");
  if (!(bandwidth_gbps > 0.0)) throw ValidationError("cluster: bandwidth_gbps must be positive");
  if (!(latency_us >= 0.0)) throw ValidationError("cluster: latency_us must be non-negative");

  Cluster cluster;
  cluster.link_bandwidth = bandwidth_gbps * 1e9;
  cluster.link_latency = latency_us * 1e-6;
  cluster.devices.resize(static_cast<std::size_t>(k));
  const std::int64_t mem = static_cast<std::int64_t>(std::llround(mem_gb * 1073741824.0));
  for (int i = 0; i < k; ++i) {
    cluster.devices[i] = Device{i, mem, throughput_tflops * 1e12};
  }
  return cluster;
}

Cluster with_device_count(const Cluster& cluster, int k) {
  if (k < 1) throw ValidationError("cluster: device count K must be >= 1");
  if (k > cluster.size() && cluster.devices.empty()) {
    throw ValidationError("cluster: cannot resize an empty cluster");
  }
  Cluster out;
  out.link_bandwidth = cluster.link_bandwidth;
  out.link_latency = cluster.link_latency;
  out.devices.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    Device d = cluster.devices[std::min<std::size_t>(i, cluster.devices.size() - 1)];
    d.id = i;
    out.devices[i] = d;
  }
  return out;
}

}  // namespace strategem
