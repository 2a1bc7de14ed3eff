#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace strategem {

enum class ComponentKind { Conv, Attention, Mlp, Embedding, Norm, Head };

const char* to_string(ComponentKind kind);
ComponentKind component_kind_from_string(const std::string& name);

// One logical model component (a layer or a fused block). FLOPs are per
// training sample; multiply-accumulate counts via the usual
// k^2 * C_in * C_out * H_out * W_out convolution arithmetic.
struct Component {
  int id = 0;
  ComponentKind kind = ComponentKind::Conv;
  double flops_fwd = 0.0;
  double flops_bwd = 0.0;  // defaults to 2 * flops_fwd when unspecified
  std::int64_t param_count = 0;
  std::int64_t activation_bytes_per_sample = 0;
};

// A strict sequential chain of components. Residual branches are folded into
// their block's component; component ids are 0..L-1 in execution order.
struct ModelGraph {
  std::string name;
  std::vector<Component> components;

  int size() const { return static_cast<int>(components.size()); }
};

struct TrainingSchedule {
  std::int64_t dataset_size = 50000;
  std::int64_t global_batch = 512;
  int epochs = 100;
  int bytes_per_element = 4;

  std::int64_t batches_per_epoch() const {
    return (dataset_size + global_batch - 1) / global_batch;
  }
  void validate() const;
};

// Input description for build_chain. flops_bwd < 0 means "unspecified".
struct ComponentSpec {
  ComponentKind kind = ComponentKind::Conv;
  double flops_fwd = 0.0;
  double flops_bwd = -1.0;
  std::int64_t param_count = 0;
  std::int64_t activation_bytes_per_sample = 0;
};

struct WorkloadSpec {
  std::string name;
  std::vector<ComponentSpec> components;
};

// Builds a validated chain, preserving order and filling the backward-FLOPs
// default. Throws ValidationError naming the offending component.
ModelGraph build_chain(const WorkloadSpec& spec);

// Analytic ResNet-50-style chain: stem + 16 bottleneck blocks (3+4+6+3) +
// classifier head. Parameter counts follow the textbook architecture with
// batch-norm state counted at 4 values per channel.
ModelGraph resnet50_like(int input_resolution, int num_classes);

// Analytic ViT-B/16-style chain: patch embedding + 12 x (attention, MLP) +
// head. Hidden size 768, 12 heads, MLP ratio 4.
ModelGraph vit_b16_like(int input_resolution, int num_classes);

std::int64_t total_params(const ModelGraph& graph);

}  // namespace strategem
