#pragma once

#include <cstdint>
#include <vector>

namespace strategem::ref {

// Row-major dense matrix, just enough for the toy trainer.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Fully connected network with tanh hidden activations and a linear output.
// Parameters are a flat vector: per layer, the (d_in x d_out) weight matrix
// row-major, then the d_out bias.
struct ToyModel {
  std::vector<int> dims;        // d_0 (input), ..., d_L (output)
  std::vector<double> params;

  int num_layers() const { return static_cast<int>(dims.size()) - 1; }
  std::int64_t param_count() const;

  // Deterministic random initialisation, scaled by 1/sqrt(d_in) per layer.
  static ToyModel random(const std::vector<int>& dims, std::uint64_t seed);
};

// Synthetic regression data: standard-normal inputs, targets from a fixed
// random linear map plus small noise. Fully determined by the seed.
struct ToyDataset {
  Matrix inputs;   // N x d_in
  Matrix targets;  // N x d_out

  static ToyDataset generate(int n, int d_in, int d_out, std::uint64_t seed);
};

// Mean-squared-error loss: mean over samples of the squared error summed
// over output dimensions.
double loss(const ToyModel& model, const Matrix& inputs, const Matrix& targets);

// Reverse-mode gradient of loss() with respect to every parameter.
std::vector<double> gradient(const ToyModel& model, const Matrix& inputs,
                             const Matrix& targets);

// Full-batch gradient descent; returns the trained parameter vector.
std::vector<double> train_single(ToyModel model, const ToyDataset& data, double eta,
                                 int steps);

// Splits each batch into `shards` equal parts, computes shard gradients
// independently, averages them in shard order (simulated all-reduce), then
// applies one update.
std::vector<double> train_dp(ToyModel model, const ToyDataset& data, double eta,
                             int steps, int shards);

// Runs forward/backward as two sequential stages split before layer `cut`
// (activations and activation gradients cross the cut). Relocates the
// arithmetic without reordering it, so the result is bitwise identical to
// train_single.
std::vector<double> train_mp(ToyModel model, const ToyDataset& data, double eta,
                             int steps, int cut);

// Central finite difference of loss() along one parameter.
double fd_gradient(const ToyModel& model, const Matrix& inputs, const Matrix& targets,
                   int index, double h);

}  // namespace strategem::ref
