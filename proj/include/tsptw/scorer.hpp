#pragma once

#include <cstdint>
#include <vector>

#include "tsptw/features.hpp"

namespace tsptw::policy {

// Shared per-candidate feed-forward scorer: each hidden layer is
// linear -> layer norm -> relu, then a single linear logit head. Parameters
// live in one flat vector (hidden layers first: W, b, gamma, beta; then the
// head's W, b) so optimizers and finite differences can treat them uniformly.
struct ScorerShape {
  int input_dim = 0;
  std::vector<int> hidden;

  std::size_t parameter_count() const;
  bool operator==(const ScorerShape&) const = default;
};

struct ScorerParams {
  ScorerShape shape;
  std::vector<double> values;
};

// Symmetric uniform fan-in init for the linear weights; norm gains start at 1.
ScorerParams init_scorer(int input_dim, std::vector<int> hidden, std::uint64_t seed);

// One logit per candidate row; rows share the same weights, so scores are
// invariant under candidate reordering.
std::vector<double> score_candidates(const ScorerParams& params,
                                     const std::vector<std::vector<double>>& rows,
                                     const std::vector<double>& context);

std::vector<double> softmax(const std::vector<double>& logits);

// Mean cross-entropy of the expert choices over the indexed samples.
double batch_loss(const ScorerParams& params,
                  const std::vector<features::TrainingSample>& samples,
                  const std::vector<std::size_t>& indices);

// Same, also writing the mean gradient (same flat layout as params.values).
// Accumulation happens in fixed-size blocks reduced in order, so the result
// does not depend on the worker count.
double batch_loss_and_grad(const ScorerParams& params,
                           const std::vector<features::TrainingSample>& samples,
                           const std::vector<std::size_t>& indices, std::vector<double>& grad,
                           int workers = 1);

struct TrainConfig {
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  int batch_size = 256;
  int epochs = 100;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct TrainResult {
  ScorerParams params;
  std::vector<double> epoch_loss;
};

// Mini-batch optimization with decoupled weight decay (decay on the linear
// weights only). Deterministic for a fixed seed. Throws on non-finite loss.
TrainResult train(const std::vector<features::TrainingSample>& samples, ScorerParams initial,
                  const TrainConfig& config);

// Convenience wrapper matching features::CandidateScorer.
features::CandidateScorer make_candidate_scorer(const ScorerParams& params);

}  // namespace tsptw::policy
