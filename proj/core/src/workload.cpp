#include "strategem/workload.hpp"

#include <cmath>
#include <sstream>

#include "strategem/errors.hpp"

namespace strategem {

const char* to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Conv: return "Conv";
    case ComponentKind::Attention: return "Attention";
    case ComponentKind::Mlp: return "Mlp";
    case ComponentKind::Embedding: return "Embedding";
    case ComponentKind::Norm: return "Norm";
    case ComponentKind::Head: return "Head";
  }
  return "?";
}

ComponentKind component_kind_from_string(const std::string& name) {
  if (name == "Conv") return ComponentKind::Conv;
  if (name == "Attention") return ComponentKind::Attention;
  if (name == "Mlp") return ComponentKind::Mlp;
  if (name == "Embedding") return ComponentKind::Embedding;
  if (name == "Norm") return ComponentKind::Norm;
  if (name == "Head") return ComponentKind::Head;
  throw ValidationError("unknown component kind: " + name);
}

void TrainingSchedule::validate() const {
  if (dataset_size <= 0) throw ValidationError("schedule: dataset_size must be positive");
  if (global_batch <= 0) throw ValidationError("schedule: global_batch must be positive");
  if (epochs <= 0) throw ValidationError("schedule: epochs must be positive");
  if (bytes_per_element <= 0) throw ValidationError("schedule: bytes_per_element must be positive");
}

ModelGraph build_chain(const WorkloadSpec& spec) {
  if (spec.components.empty()) {
    throw ValidationError("workload '" + spec.name + "': component list is empty");
  }
  ModelGraph graph;
  graph.name = spec.name;
  graph.components.reserve(spec.components.size());
  int id = 0;
  for (const ComponentSpec& cs : spec.components) {
    std::ostringstream where;
    where << "workload '" << spec.name << "' component " << id << " (" << to_string(cs.kind) << ")";
    if (!(cs.flops_fwd >= 0.0) || !std::isfinite(cs.flops_fwd)) {
      throw ValidationError(where.str() + ": flops_fwd must be finite and non-negative");
    }
    if (cs.flops_bwd >= 0.0 && !std::isfinite(cs.flops_bwd)) {
      throw ValidationError(where.str() + ": flops_bwd must be finite");
    }
    if (cs.param_count < 0) {
      throw ValidationError(where.str() + ": param_count must be non-negative");
    }
    if (cs.activation_bytes_per_sample < 0) {
      throw ValidationError(where.str() + ": activation_bytes_per_sample must be non-negative");
    }
    Component c;
    c.id = id++;
    c.kind = cs.kind;
    c.flops_fwd = cs.flops_fwd;
    c.flops_bwd = cs.flops_bwd < 0.0 ? 2.0 * cs.flops_fwd : cs.flops_bwd;
    c.param_count = cs.param_count;
    c.activation_bytes_per_sample = cs.activation_bytes_per_sample;
    graph.components.push_back(c);
  }
  return graph;
}

namespace {

constexpr int kActBytesPerElement = 4;  // fp32 activations

// Output spatial size of a stride-s "same"-padded convolution.
int conv_out(int in, int stride) { return (in + stride - 1) / stride; }

struct ResnetBuilder {
  WorkloadSpec spec;

  void add(ComponentKind kind, double flops, std::int64_t params, std::int64_t act_bytes) {
    ComponentSpec cs;
    cs.kind = kind;
    cs.flops_fwd = flops;
    cs.param_count = params;
    cs.activation_bytes_per_sample = act_bytes;
    spec.components.push_back(cs);
  }
};

// conv + batch-norm parameter/FLOP arithmetic. Batch-norm state counts
// 4 values per channel (scale, shift, running mean, running variance);
// convolutions are bias-free as usual when followed by a norm.
std::int64_t conv_params(int k, std::int64_t cin, std::int64_t cout) { return static_cast<std::int64_t>(k) * k * cin * cout; }
std::int64_t bn_params(std::int64_t channels) { return 4 * channels; }
double conv_flops(int k, double cin, double cout, double hout, double wout) {
  return k * k * cin * cout * hout * wout;
}

}  // namespace

ModelGraph resnet50_like(int input_resolution, int num_classes) {
  if (input_resolution < 32) {
    throw ValidationError("resnet50_like: input_resolution must be >= 32");
  }
  if (num_classes < 1) {
    throw ValidationError("resnet50_like: num_classes must be >= 1");
  }

  ResnetBuilder b;
  b.spec.name = "resnet50";

  // Stem: 7x7/2 conv + BN + 3x3/2 max pool.
  int hw = conv_out(input_resolution, 2);
  const double stem_flops = conv_flops(7, 3, 64, hw, hw);
  const std::int64_t stem_params = conv_params(7, 3, 64) + bn_params(64);
  hw = conv_out(hw, 2);  // max pool
  b.add(ComponentKind::Conv, stem_flops, stem_params,
        static_cast<std::int64_t>(64) * hw * hw * kActBytesPerElement);

  // Four stages of bottleneck blocks, 3+4+6+3, widths 64/128/256/512,
  // expansion 4. Stride 2 on the 3x3 conv of the first block of stages 2-4.
  const int blocks_per_stage[4] = {3, 4, 6, 3};
  const int widths[4] = {64, 128, 256, 512};
  std::int64_t cin = 64;
  for (int stage = 0; stage < 4; ++stage) {
    const std::int64_t width = widths[stage];
    const std::int64_t cout = width * 4;
    for (int block = 0; block < blocks_per_stage[stage]; ++block) {
      const bool first = block == 0;
      const int stride = (first && stage > 0) ? 2 : 1;
      const int hw_out = conv_out(hw, stride);

      double flops = conv_flops(1, static_cast<double>(cin), static_cast<double>(width), hw, hw);
      flops += conv_flops(3, static_cast<double>(width), static_cast<double>(width), hw_out, hw_out);
      flops += conv_flops(1, static_cast<double>(width), static_cast<double>(cout), hw_out, hw_out);
      std::int64_t params = conv_params(1, cin, width) + bn_params(width) +
                            conv_params(3, width, width) + bn_params(width) +
                            conv_params(1, width, cout) + bn_params(cout);
      if (first) {
        // Projection shortcut.
        flops += conv_flops(1, static_cast<double>(cin), static_cast<double>(cout), hw_out, hw_out);
        params += conv_params(1, cin, cout) + bn_params(cout);
      }
      b.add(ComponentKind::Conv, flops, params,
            cout * static_cast<std::int64_t>(hw_out) * hw_out * kActBytesPerElement);
      hw = hw_out;
      cin = cout;
    }
  }

  // Head: global average pool + fully connected classifier.
  b.add(ComponentKind::Head, static_cast<double>(cin) * num_classes,
        cin * num_classes + num_classes,
        static_cast<std::int64_t>(num_classes) * kActBytesPerElement);

  return build_chain(b.spec);
}

ModelGraph vit_b16_like(int input_resolution, int num_classes) {
  constexpr int kPatch = 16;
  constexpr std::int64_t kHidden = 768;
  constexpr std::int64_t kHeads = 12;
  constexpr std::int64_t kDepth = 12;
  constexpr std::int64_t kMlpRatio = 4;

  if (input_resolution <= 0 || input_resolution % kPatch != 0) {
    throw ValidationError("vit_b16_like: input_resolution must be divisible by patch size 16");
  }
  if (num_classes < 1) {
    throw ValidationError("vit_b16_like: num_classes must be >= 1");
  }

  const std::int64_t patches = static_cast<std::int64_t>(input_resolution / kPatch) *
                               (input_resolution / kPatch);
  const std::int64_t tokens = patches + 1;  // class token
  const std::int64_t token_act_bytes = tokens * kHidden * kActBytesPerElement;
  const std::int64_t head_dim = kHidden / kHeads;

  ResnetBuilder b;
  b.spec.name = "vit_b16";

  // Patch embedding (16x16/16 conv with bias) + position embeddings + class token.
  b.add(ComponentKind::Embedding,
        static_cast<double>(kPatch) * kPatch * 3 * kHidden * patches,
        conv_params(kPatch, 3, kHidden) + kHidden   // conv weight + bias
            + tokens * kHidden                      // position embeddings
            + kHidden,                              // class token
        token_act_bytes);

  for (std::int64_t layer = 0; layer < kDepth; ++layer) {
    // Attention: layer norm + qkv projection + scores + weighted values +
    // output projection. Linear layers carry biases.
    const double qkv_flops = 3.0 * static_cast<double>(tokens) * kHidden * kHidden;
    const double score_flops = static_cast<double>(kHeads) * tokens * tokens * head_dim;
    const double proj_flops = static_cast<double>(tokens) * kHidden * kHidden;
    b.add(ComponentKind::Attention,
          qkv_flops + 2.0 * score_flops + proj_flops,
          3 * (kHidden * kHidden + kHidden)      // qkv
              + kHidden * kHidden + kHidden      // output projection
              + 2 * kHidden,                     // layer norm
          token_act_bytes);

    // MLP: layer norm + two linear layers with ratio-4 hidden width.
    const std::int64_t mlp_hidden = kHidden * kMlpRatio;
    b.add(ComponentKind::Mlp,
          2.0 * static_cast<double>(tokens) * kHidden * mlp_hidden,
          kHidden * mlp_hidden + mlp_hidden      // fc1
              + mlp_hidden * kHidden + kHidden   // fc2
              + 2 * kHidden,                     // layer norm
          token_act_bytes);
  }

  // Head: final layer norm + classifier on the class token.
  b.add(ComponentKind::Head, static_cast<double>(kHidden) * num_classes,
        2 * kHidden + kHidden * num_classes + num_classes,
        static_cast<std::int64_t>(num_classes) * kActBytesPerElement);

  return build_chain(b.spec);
}

std::int64_t total_params(const ModelGraph& graph) {
  std::int64_t total = 0;
  for (const Component& c : graph.components) total += c.param_count;
  return total;
}

}  // namespace strategem
