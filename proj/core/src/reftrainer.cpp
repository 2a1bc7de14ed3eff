#include "strategem/reftrainer.hpp"

#include <cmath>
#include <string>

#include "strategem/errors.hpp"
#include "strategem/rng.hpp"

namespace strategem::ref {

namespace {

// out = a * b, fixed (i, k, j) loop order for deterministic accumulation.
Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double av = a.at(i, k);
      if (av == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) {
        out.at(i, j) += av * b.at(k, j);
      }
    }
  }
  return out;
}

// out = a^T * b.
Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  Matrix out(a.cols, b.cols);
  for (int k = 0; k < a.rows; ++k) {
    for (int i = 0; i < a.cols; ++i) {
      const double av = a.at(k, i);
      if (av == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) {
        out.at(i, j) += av * b.at(k, j);
      }
    }
  }
  return out;
}

// out = a * b^T.
Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < b.rows; ++j) {
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += a.at(i, k) * b.at(j, k);
      out.at(i, j) = acc;
    }
  }
  return out;
}

struct LayerView {
  int offset_w = 0;
  int offset_b = 0;
  int d_in = 0;
  int d_out = 0;
};

std::vector<LayerView> layer_views(const ToyModel& model) {
  std::vector<LayerView> views;
  int offset = 0;
  for (int l = 0; l + 1 < static_cast<int>(model.dims.size()); ++l) {
    LayerView v;
    v.d_in = model.dims[l];
    v.d_out = model.dims[l + 1];
    v.offset_w = offset;
    v.offset_b = offset + v.d_in * v.d_out;
    offset = v.offset_b + v.d_out;
    views.push_back(v);
  }
  return views;
}

Matrix layer_forward(const ToyModel& model, const LayerView& v, const Matrix& input,
                     bool apply_tanh) {
  Matrix z(input.rows, v.d_out);
  for (int i = 0; i < input.rows; ++i) {
    for (int j = 0; j < v.d_out; ++j) z.at(i, j) = model.params[v.offset_b + j];
  }
  for (int i = 0; i < input.rows; ++i) {
    for (int k = 0; k < v.d_in; ++k) {
      const double av = input.at(i, k);
      if (av == 0.0) continue;
      const double* w = &model.params[v.offset_w + static_cast<std::size_t>(k) * v.d_out];
      for (int j = 0; j < v.d_out; ++j) z.at(i, j) += av * w[j];
    }
  }
  if (apply_tanh) {
    for (double& x : z.data) x = std::tanh(x);
  }
  return z;
}

// Backward through one layer: consumes d(loss)/d(output) and the stored
// input/output activations, accumulates parameter gradients, returns
// d(loss)/d(input).
Matrix layer_backward(const ToyModel& model, const LayerView& v, const Matrix& input,
                      const Matrix& output, const Matrix& d_out, bool had_tanh,
                      std::vector<double>& grad) {
  Matrix dz = d_out;
  if (had_tanh) {
    for (std::size_t i = 0; i < dz.data.size(); ++i) {
      dz.data[i] *= 1.0 - output.data[i] * output.data[i];
    }
  }
  // dW = input^T * dz; db = column sums of dz.
  const Matrix dw = matmul_at_b(input, dz);
  for (int k = 0; k < v.d_in; ++k) {
    for (int j = 0; j < v.d_out; ++j) {
      grad[v.offset_w + static_cast<std::size_t>(k) * v.d_out + j] += dw.at(k, j);
    }
  }
  for (int i = 0; i < dz.rows; ++i) {
    for (int j = 0; j < v.d_out; ++j) grad[v.offset_b + j] += dz.at(i, j);
  }
  // dInput = dz * W^T.
  Matrix w(v.d_in, v.d_out);
  for (int k = 0; k < v.d_in; ++k) {
    for (int j = 0; j < v.d_out; ++j) {
      w.at(k, j) = model.params[v.offset_w + static_cast<std::size_t>(k) * v.d_out + j];
    }
  }
  return matmul_a_bt(dz, w);
}

// Forward/backward over an inclusive layer range [first, last); activations
// for the range are stored in `acts` (acts[0] is the stage input).
struct StageState {
  std::vector<Matrix> acts;
};

Matrix stage_forward(const ToyModel& model, const std::vector<LayerView>& views, int first,
                     int last, const Matrix& input, StageState& state) {
  state.acts.clear();
  state.acts.push_back(input);
  for (int l = first; l < last; ++l) {
    const bool apply_tanh = l < static_cast<int>(views.size()) - 1;
    state.acts.push_back(layer_forward(model, views[l], state.acts.back(), apply_tanh));
  }
  return state.acts.back();
}

Matrix stage_backward(const ToyModel& model, const std::vector<LayerView>& views, int first,
                      int last, const StageState& state, const Matrix& d_output,
                      std::vector<double>& grad) {
  Matrix d = d_output;
  for (int l = last - 1; l >= first; --l) {
    const bool had_tanh = l < static_cast<int>(views.size()) - 1;
    d = layer_backward(model, views[l], state.acts[l - first], state.acts[l - first + 1], d,
                       had_tanh, grad);
  }
  return d;
}

Matrix slice_rows(const Matrix& m, int first, int count) {
  Matrix out(count, m.cols);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < m.cols; ++j) out.at(i, j) = m.at(first + i, j);
  }
  return out;
}

// Gradient over an explicit (inputs, targets) batch via a staged pass with a
// single stage; shared by all trainers.
std::vector<double> batch_gradient(const ToyModel& model, const std::vector<LayerView>& views,
                                   const Matrix& inputs, const Matrix& targets) {
  std::vector<double> grad(model.params.size(), 0.0);
  StageState state;
  const Matrix pred = stage_forward(model, views, 0, static_cast<int>(views.size()), inputs, state);
  Matrix d_pred(pred.rows, pred.cols);
  const double scale = 2.0 / inputs.rows;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    d_pred.data[i] = scale * (pred.data[i] - targets.data[i]);
  }
  stage_backward(model, views, 0, static_cast<int>(views.size()), state, d_pred, grad);
  return grad;
}

void check_finite_loss(const ToyModel& model, const ToyDataset& data, int step) {
  const double l = loss(model, data.inputs, data.targets);
  if (!std::isfinite(l)) {
    throw ValidationError("reftrainer: non-finite loss at step " + std::to_string(step) +
                          " (reduce the learning rate)");
  }
}

}  // namespace

std::int64_t ToyModel::param_count() const {
  std::int64_t total = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    total += static_cast<std::int64_t>(dims[l] + 1) * dims[l + 1];
  }
  return total;
}

ToyModel ToyModel::random(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw ValidationError("ToyModel: need at least input and output dims");
  for (int d : dims) {
    if (d < 1) throw ValidationError("ToyModel: layer dimensions must be positive");
  }
  ToyModel model;
  model.dims = dims;
  model.params.resize(static_cast<std::size_t>(model.param_count()));
  Xoshiro256pp rng = substream(seed, 0xF00D);
  std::size_t idx = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    for (int k = 0; k < dims[l] * dims[l + 1]; ++k) model.params[idx++] = scale * rng.gaussian();
    for (int k = 0; k < dims[l + 1]; ++k) model.params[idx++] = 0.0;
  }
  return model;
}

ToyDataset ToyDataset::generate(int n, int d_in, int d_out, std::uint64_t seed) {
  if (n < 1) throw ValidationError("ToyDataset: need at least one sample");
  ToyDataset data;
  data.inputs = Matrix(n, d_in);
  data.targets = Matrix(n, d_out);
  Xoshiro256pp rng = substream(seed, 0xDA7A);
  for (double& x : data.inputs.data) x = rng.gaussian();
  Matrix w_true(d_in, d_out);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_in));
  for (double& x : w_true.data) x = scale * rng.gaussian();
  data.targets = matmul(data.inputs, w_true);
  for (double& y : data.targets.data) y += 0.1 * rng.gaussian();
  return data;
}

double loss(const ToyModel& model, const Matrix& inputs, const Matrix& targets) {
  const std::vector<LayerView> views = layer_views(model);
  StageState state;
  const Matrix pred = stage_forward(model, views, 0, static_cast<int>(views.size()), inputs, state);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double err = pred.data[i] - targets.data[i];
    total += err * err;
  }
  return total / inputs.rows;
}

std::vector<double> gradient(const ToyModel& model, const Matrix& inputs,
                             const Matrix& targets) {
  return batch_gradient(model, layer_views(model), inputs, targets);
}

std::vector<double> train_single(ToyModel model, const ToyDataset& data, double eta,
                                 int steps) {
  if (eta < 0.0) throw ValidationError("train_single: eta must be non-negative");
  if (steps < 0) throw ValidationError("train_single: steps must be non-negative");
  const std::vector<LayerView> views = layer_views(model);
  for (int step = 0; step < steps; ++step) {
    const std::vector<double> grad = batch_gradient(model, views, data.inputs, data.targets);
    for (std::size_t i = 0; i < model.params.size(); ++i) model.params[i] -= eta * grad[i];
    check_finite_loss(model, data, step);
  }
  return model.params;
}

std::vector<double> train_dp(ToyModel model, const ToyDataset& data, double eta, int steps,
                             int shards) {
  if (shards < 1) throw ValidationError("train_dp: shards must be >= 1");
  if (data.inputs.rows % shards != 0) {
    throw ValidationError("train_dp: sample count " + std::to_string(data.inputs.rows) +
                          " not divisible by " + std::to_string(shards) + " shards");
  }
  const std::vector<LayerView> views = layer_views(model);
  const int shard_rows = data.inputs.rows / shards;

  std::vector<Matrix> shard_x(shards), shard_y(shards);
  for (int s = 0; s < shards; ++s) {
    shard_x[s] = slice_rows(data.inputs, s * shard_rows, shard_rows);
    shard_y[s] = slice_rows(data.targets, s * shard_rows, shard_rows);
  }

  for (int step = 0; step < steps; ++step) {
    // Simulated all-reduce: average shard gradients in shard-index order.
    std::vector<double> avg(model.params.size(), 0.0);
    for (int s = 0; s < shards; ++s) {
      const std::vector<double> g = batch_gradient(model, views, shard_x[s], shard_y[s]);
      for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += g[i];
    }
    const double inv = 1.0 / shards;
    for (std::size_t i = 0; i < model.params.size(); ++i) {
      model.params[i] -= eta * avg[i] * inv;
    }
    check_finite_loss(model, data, step);
  }
  return model.params;
}

std::vector<double> train_mp(ToyModel model, const ToyDataset& data, double eta, int steps,
                             int cut) {
  const std::vector<LayerView> views = layer_views(model);
  const int layers = static_cast<int>(views.size());
  if (cut <= 0 || cut >= layers) {
    throw ValidationError("train_mp: cut must satisfy 0 < cut < " + std::to_string(layers));
  }
  for (int step = 0; step < steps; ++step) {
    std::vector<double> grad(model.params.size(), 0.0);
    // Device 0 runs layers [0, cut); device 1 runs [cut, layers). The
    // activation and its gradient cross the cut.
    StageState stage0, stage1;
    const Matrix boundary = stage_forward(model, views, 0, cut, data.inputs, stage0);
    const Matrix pred = stage_forward(model, views, cut, layers, boundary, stage1);

    Matrix d_pred(pred.rows, pred.cols);
    const double scale = 2.0 / data.inputs.rows;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
      d_pred.data[i] = scale * (pred.data[i] - data.targets.data[i]);
    }
    const Matrix d_boundary = stage_backward(model, views, cut, layers, stage1, d_pred, grad);
    stage_backward(model, views, 0, cut, stage0, d_boundary, grad);

    for (std::size_t i = 0; i < model.params.size(); ++i) model.params[i] -= eta * grad[i];
    check_finite_loss(model, data, step);
  }
  return model.params;
}

double fd_gradient(const ToyModel& model, const Matrix& inputs, const Matrix& targets,
                   int index, double h) {
  ToyModel probe = model;
  probe.params[index] = model.params[index] + h;
  const double up = loss(probe, inputs, targets);
  probe.params[index] = model.params[index] - h;
  const double down = loss(probe, inputs, targets);
  return (up - down) / (2.0 * h);
}

}  // namespace strategem::ref
