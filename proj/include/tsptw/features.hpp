#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsptw/core.hpp"
#include "tsptw/datagen.hpp"

namespace tsptw::features {

inline constexpr int kStaticNodeDim = 7;
inline constexpr int kStaticEdgeDim = 5;
inline constexpr int kDynamicDim = 12;
inline constexpr int kLookaheadDim = 6;
inline constexpr int kContextDim = 9;

// Window values feed the feature encoding as plain numbers; an unconstrained
// end encodes as 0 (legality still ignores it).
inline double encoded_window_end(const TimeWindow& w) {
  return w.end_unconstrained ? 0.0 : w.end;
}

// Per node: x, y, window start, window end, offset from depot (2), distance
// to depot. The depot row zeroes the last three by construction.
struct StaticNodeFeatures {
  int node_count = 0;
  std::vector<std::array<double, kStaticNodeDim>> rows;
};
StaticNodeFeatures static_node_features(const Instance& inst);

// Nearest 20% of nodes per node: edge length plus the four start/end window
// differences. Neighbor lists sorted by distance, nearest first.
struct EdgeFeature {
  int neighbor = -1;
  std::array<double, kStaticEdgeDim> values{};
};
struct StaticEdgeFeatures {
  int neighbor_count = 0;
  std::vector<std::vector<EdgeFeature>> per_node;
};
StaticEdgeFeatures static_edge_features(const Instance& inst);

int edge_neighbor_count(int node_count);

// Per unvisited candidate at the current state: position, offset and distance
// from the current node, visit cost under the waiting rule, window offsets
// from the current clock, window differences against the current node.
struct DynamicFeatures {
  std::vector<int> candidates;
  std::vector<std::array<double, kDynamicDim>> rows;
};
DynamicFeatures dynamic_features(const Instance& inst, const std::vector<int>& prefix,
                                 double now);

// Look-ahead block gathered from a hypothetical continuation:
//   [0] some unvisited node already misses its deadline
//   [1] worst miss    [2] summed miss
//   [3] distance of the cheapest greedy follow-up
//   [4] visit cost of that follow-up
//   [5] information-present flag; 0 zeroes the whole row
using Lookahead = std::array<double, kLookaheadDim>;

// One-step look-ahead for a single candidate; `now` defaults to the true
// propagated clock of the prefix. Throws if the candidate is already visited.
Lookahead osla_features(const Instance& inst, const std::vector<int>& prefix, int candidate);
Lookahead osla_features_at(const Instance& inst, const std::vector<int>& prefix, int candidate,
                           double now);

// Scores candidate rows against a shared context; higher is better. Used to
// plug a trained one-step policy into the multi-step gatherer.
using CandidateScorer =
    std::function<std::vector<double>(const std::vector<std::vector<double>>& rows,
                                      const std::vector<double>& context)>;

// Multi-step look-ahead: rank candidates with the one-step policy, extend the
// top k hypothetically by `steps` greedy picks, then gather the look-ahead
// block from the extended endpoint. Everyone else gets a zeroed row.
struct MuslaFeatures {
  std::vector<int> candidates;
  std::vector<Lookahead> rows;
  std::vector<char> in_top_k;
};
MuslaFeatures musla_features(const Instance& inst, const std::vector<int>& prefix,
                             const CandidateScorer& osla_policy, int top_k, int steps);
MuslaFeatures musla_features_at(const Instance& inst, const std::vector<int>& prefix,
                                const CandidateScorer& osla_policy, int top_k, int steps,
                                double now);

enum class FeatureLevel { kStatic, kDynamic, kOsla, kMusla };

const char* level_name(FeatureLevel level);
std::optional<FeatureLevel> parse_level(const std::string& name);

// Width of one candidate row at a level; the scorer input adds the context.
int candidate_feature_dim(FeatureLevel level);
int scorer_input_dim(FeatureLevel level);

// Static blocks are per-instance; computed once and shared across steps.
struct StaticCache {
  StaticNodeFeatures nodes;
  StaticEdgeFeatures edges;
  std::vector<std::array<double, kStaticEdgeDim>> edge_means;
  std::array<double, kStaticNodeDim> node_mean{};
  double time_scale = 1.0;
};
StaticCache build_static_cache(const Instance& inst);

// Candidate rows and shared context for one construction step. Candidates are
// the unvisited nodes in ascending order.
struct StateFeatures {
  std::vector<int> candidates;
  std::vector<std::vector<double>> rows;
  std::vector<double> context;
};
StateFeatures assemble_state(const Instance& inst, const StaticCache& cache,
                             const std::vector<int>& prefix, double now, FeatureLevel level,
                             const CandidateScorer* osla_policy = nullptr, int top_k = 5,
                             int steps = 1);

struct TrainingSample {
  std::string instance_id;
  int step = 0;
  StateFeatures state;
  int expert_choice = -1;  // index into state.candidates
};

// One sample per construction step along the expert tour; the look-ahead
// blocks are gathered offline at the expert prefixes.
std::vector<TrainingSample> build_training_samples(const datagen::DatasetRecord& record,
                                                   FeatureLevel level,
                                                   const CandidateScorer* osla_policy = nullptr,
                                                   int top_k = 5, int steps = 1);

}  // namespace tsptw::features
