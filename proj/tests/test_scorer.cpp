#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tsptw/datagen.hpp"
#include "tsptw/expert.hpp"
#include "tsptw/scorer.hpp"

using namespace tsptw;
using namespace tsptw::policy;

namespace {

std::vector<features::TrainingSample> make_samples(int n, std::size_t instances,
                                                   std::uint64_t seed) {
  auto records = datagen::gen_medium(datagen::MediumParams::for_n(n), instances, seed);
  const auto labeled = expert::label_dataset(records, expert::SolverChoice::kDp);
  std::vector<features::TrainingSample> samples;
  for (const auto& rec : labeled.records) {
    auto part = features::build_training_samples(rec, features::FeatureLevel::kOsla);
    samples.insert(samples.end(), part.begin(), part.end());
  }
  return samples;
}

}  // namespace

TEST_CASE("softmax basics") {
  CHECK(softmax({3.7}) == std::vector<double>{1.0});

  const std::vector<double> base = softmax({0.1, 0.9, -0.4});
  const std::vector<double> shifted = softmax({0.1 + 5.0, 0.9 + 5.0, -0.4 + 5.0});
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i] == doctest::Approx(shifted[i]).epsilon(1e-12));
  }
  double sum = 0.0;
  for (double p : base) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scoring shares weights across candidates") {
  const int dim = features::scorer_input_dim(features::FeatureLevel::kStatic);
  const ScorerParams params = init_scorer(dim, {8, 8}, 3);

  std::vector<double> context(features::kContextDim, 0.3);
  std::vector<double> row(dim - features::kContextDim, 0.1);
  row[3] = -1.2;
  const std::vector<std::vector<double>> rows{row, row, row};
  const std::vector<double> logits = score_candidates(params, rows, context);
  CHECK(logits[0] == logits[1]);
  CHECK(logits[1] == logits[2]);

  std::vector<double> other = row;
  other[0] = 0.9;
  const auto ab = score_candidates(params, {row, other}, context);
  const auto ba = score_candidates(params, {other, row}, context);
  CHECK(ab[0] == ba[1]);
  CHECK(ab[1] == ba[0]);

  CHECK_THROWS_AS(score_candidates(params, {std::vector<double>(5, 0.0)}, context),
                  std::invalid_argument);
}

TEST_CASE("analytic gradients match central differences") {
  const auto samples = make_samples(6, 12, 2718);
  REQUIRE(samples.size() >= 24);
  const int dim = features::scorer_input_dim(features::FeatureLevel::kOsla);

  rng::Stream rs = rng::substream(99, "grad-check");
  const double h = 1e-5;

  for (int batch_idx = 0; batch_idx < 3; ++batch_idx) {
    ScorerParams params = init_scorer(dim, {16, 16, 16}, 1000 + batch_idx);
    std::vector<std::size_t> batch;
    for (int i = 0; i < 8; ++i) batch.push_back(rs.below(samples.size()));

    std::vector<double> grad;
    const double loss = batch_loss_and_grad(params, samples, batch, grad);
    CHECK(std::isfinite(loss));

    for (int probe = 0; probe < 12; ++probe) {
      const std::size_t j = rs.below(params.values.size());
      const double saved = params.values[j];
      params.values[j] = saved + h;
      const double up = batch_loss(params, samples, batch);
      params.values[j] = saved - h;
      const double down = batch_loss(params, samples, batch);
      params.values[j] = saved;

      const double fd = (up - down) / (2.0 * h);
      const double rel = std::abs(grad[j] - fd) / std::max({std::abs(grad[j]), std::abs(fd), 1e-7});
      INFO("coordinate ", j, " analytic ", grad[j], " fd ", fd);
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("gradient reduction does not depend on the worker count") {
  const auto samples = make_samples(6, 10, 515);
  const int dim = features::scorer_input_dim(features::FeatureLevel::kOsla);
  const ScorerParams params = init_scorer(dim, {16, 16}, 7);

  std::vector<std::size_t> batch;
  for (std::size_t i = 0; i < std::min<std::size_t>(samples.size(), 40); ++i) batch.push_back(i);

  std::vector<double> g1, g4;
  const double l1 = batch_loss_and_grad(params, samples, batch, g1, 1);
  const double l4 = batch_loss_and_grad(params, samples, batch, g4, 4);
  CHECK(l1 == l4);
  REQUIRE(g1.size() == g4.size());
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == g4[i]);
}

TEST_CASE("a single sample can be memorized") {
  auto samples = make_samples(6, 6, 31337);
  REQUIRE(!samples.empty());
  // pick a sample with a real choice to make
  features::TrainingSample target;
  for (const auto& s : samples) {
    if (s.state.candidates.size() >= 3) {
      target = s;
      break;
    }
  }
  REQUIRE(target.state.candidates.size() >= 3);

  TrainConfig config;
  config.epochs = 300;
  config.batch_size = 1;
  config.learning_rate = 3e-3;
  config.weight_decay = 0.0;
  config.seed = 5;

  const int dim = features::scorer_input_dim(features::FeatureLevel::kOsla);
  const TrainResult result = train({target}, init_scorer(dim, {16, 16}, 11), config);
  CHECK(result.epoch_loss.back() < 0.01);
  CHECK(result.epoch_loss.front() > result.epoch_loss.back());
}

TEST_CASE("training is reproducible and loss trends down") {
  const auto samples = make_samples(6, 30, 90210);
  REQUIRE(samples.size() >= 100);
  const int dim = features::scorer_input_dim(features::FeatureLevel::kOsla);

  TrainConfig config;
  config.epochs = 6;
  config.batch_size = 32;
  config.seed = 17;

  const TrainResult a = train(samples, init_scorer(dim, {24, 24, 24}, 2), config);
  const TrainResult b = train(samples, init_scorer(dim, {24, 24, 24}, 2), config);
  CHECK(a.epoch_loss == b.epoch_loss);
  CHECK(a.params.values == b.params.values);

  for (std::size_t e = 1; e < a.epoch_loss.size(); ++e) {
    CHECK(a.epoch_loss[e] < a.epoch_loss[e - 1]);
  }
}

TEST_CASE("non-finite losses abort with a diagnostic") {
  const auto samples = make_samples(6, 4, 46);
  const int dim = features::scorer_input_dim(features::FeatureLevel::kOsla);
  ScorerParams params = init_scorer(dim, {8}, 3);
  params.values.back() = std::numeric_limits<double>::quiet_NaN();  // head bias

  TrainConfig config;
  config.epochs = 1;
  config.batch_size = 4;
  CHECK_THROWS_AS(train(samples, params, config), std::runtime_error);
}
