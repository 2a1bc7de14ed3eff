#include <doctest.h>

#include <cmath>

#include "strategem/errors.hpp"
#include "strategem/reftrainer.hpp"
#include "strategem/rng.hpp"

using namespace strategem;
using namespace strategem::ref;

namespace {

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max(1e-12, std::fabs(b[i]));
    worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace

TEST_CASE("zero steps and zero learning rate are identities") {
  const ToyModel model = ToyModel::random({4, 8, 3}, 1);
  const ToyDataset data = ToyDataset::generate(32, 4, 3, 2);
  CHECK(train_single(model, data, 0.1, 0) == model.params);
  CHECK(train_single(model, data, 0.0, 100) == model.params);
}

TEST_CASE("one step of a linear model matches the closed-form gradient") {
  // Single linear layer, biases zeroed: theta' = theta - eta*(2/N)*X^T(X theta - Y).
  ToyModel model = ToyModel::random({3, 2}, 7);
  for (int j = 0; j < 2; ++j) model.params[3 * 2 + j] = 0.0;  // zero biases
  const ToyDataset data = ToyDataset::generate(16, 3, 2, 8);
  const double eta = 0.05;

  // Closed form computed independently with explicit loops.
  Matrix pred(16, 2);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 2; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += data.inputs.at(i, k) * model.params[k * 2 + j];
      pred.at(i, j) = acc - data.targets.at(i, j);
    }
  }
  std::vector<double> expected(model.params);
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 2; ++j) {
      double g = 0.0;
      for (int i = 0; i < 16; ++i) g += data.inputs.at(i, k) * pred.at(i, j);
      expected[k * 2 + j] -= eta * (2.0 / 16.0) * g;
    }
  }

  const auto trained = train_single(model, data, eta, 1);
  for (int k = 0; k < 6; ++k) {
    CHECK(trained[k] == doctest::Approx(expected[k]).epsilon(1e-12));
  }
}

TEST_CASE("data-parallel sharding matches full-batch training") {
  const ToyModel model = ToyModel::random({5, 12, 6, 2}, 11);
  const ToyDataset data = ToyDataset::generate(64, 5, 2, 12);
  const double eta = 0.05;
  const auto reference = train_single(model, data, eta, 100);

  CHECK(train_dp(model, data, eta, 100, 1) == reference);  // k = 1 is bitwise
  CHECK(max_rel_diff(train_dp(model, data, eta, 100, 4), reference) <= 1e-6);

  // Extreme sharding, one sample per shard, shorter horizon.
  const auto short_ref = train_single(model, data, eta, 10);
  CHECK(max_rel_diff(train_dp(model, data, eta, 10, 64), short_ref) <= 1e-6);

  CHECK_THROWS_AS(train_dp(model, data, eta, 1, 7), ValidationError);  // 64 % 7 != 0
}

TEST_CASE("model-parallel staging is bitwise identical") {
  const ToyModel model = ToyModel::random({6, 10, 8, 3}, 21);
  const ToyDataset data = ToyDataset::generate(40, 6, 3, 22);
  const double eta = 0.05;
  const auto reference = train_single(model, data, eta, 50);

  for (int cut = 1; cut < 3; ++cut) {
    const auto mp = train_mp(model, data, eta, 50, cut);
    REQUIRE(mp.size() == reference.size());
    for (std::size_t i = 0; i < mp.size(); ++i) CHECK(mp[i] == reference[i]);
  }

  CHECK_THROWS_AS(train_mp(model, data, eta, 1, 0), ValidationError);
  CHECK_THROWS_AS(train_mp(model, data, eta, 1, 3), ValidationError);
}

TEST_CASE("backprop matches central finite differences") {
  const ToyModel model = ToyModel::random({4, 9, 5, 2}, 31);
  const ToyDataset data = ToyDataset::generate(24, 4, 2, 32);
  const auto grad = gradient(model, data.inputs, data.targets);

  Xoshiro256pp rng(33);
  int probes = 0;
  double worst = 0.0;
  while (probes < 10) {
    const int idx = static_cast<int>(rng.next() % grad.size());
    if (std::fabs(grad[idx]) < 1e-8) continue;
    const double fd = fd_gradient(model, data.inputs, data.targets, idx, 1e-4);
    worst = std::max(worst, std::fabs(fd - grad[idx]) / std::fabs(grad[idx]));
    ++probes;
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("divergence aborts with a diagnostic") {
  const ToyModel model = ToyModel::random({4, 8, 2}, 41);
  const ToyDataset data = ToyDataset::generate(16, 4, 2, 42);
  CHECK_THROWS_AS(train_single(model, data, 1e6, 200), ValidationError);
}

TEST_CASE("dataset generation is deterministic in the seed") {
  const ToyDataset a = ToyDataset::generate(8, 3, 2, 5);
  const ToyDataset b = ToyDataset::generate(8, 3, 2, 5);
  const ToyDataset c = ToyDataset::generate(8, 3, 2, 6);
  CHECK(a.inputs.data == b.inputs.data);
  CHECK(a.targets.data == b.targets.data);
  CHECK(a.inputs.data != c.inputs.data);
}

TEST_CASE("parameter count follows the layer dimensions") {
  const ToyModel model = ToyModel::random({4, 8, 2}, 1);
  CHECK(model.param_count() == (4 + 1) * 8 + (8 + 1) * 2);
  CHECK(static_cast<std::int64_t>(model.params.size()) == model.param_count());
}
