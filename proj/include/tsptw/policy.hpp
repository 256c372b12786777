#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tsptw/core.hpp"
#include "tsptw/features.hpp"
#include "tsptw/scorer.hpp"

namespace tsptw::policy {

// Rule-based baselines. All ties break toward the lowest node index.

// Next node is the one reachable at the earliest clock, waiting included.
Tour greedy_mt(const Instance& inst);

// Next node is the one whose deadline closes first; unconstrained ends rank
// last. Ignores geometry entirely.
Tour greedy_lt(const Instance& inst);

// Next node is the one whose window opens first. Kept as a dataset-quality
// probe rather than a serious solver.
Tour greedy_es(const Instance& inst);

// A trained scorer plus everything needed to rebuild its inputs. Multi-step
// policies carry the one-step scorer that gathered their look-ahead features.
struct Policy {
  features::FeatureLevel level = features::FeatureLevel::kStatic;
  ScorerParams scorer;
  std::optional<ScorerParams> osla_helper;
  int top_k = 5;
  int lookahead_steps = 1;
  std::uint64_t seed = 0;

  void validate() const;  // throws when widths or helpers do not line up
};

enum class DecodeMode { kGreedyArgmax, kSample };

struct DecodeResult {
  Tour tour;
  Schedule schedule;
};

// Builds the tour one node at a time, masking visited nodes and never
// stopping early: deadline misses are recorded, not fatal. `time_offset`
// shifts the clock the features see; legality always uses the true clock.
DecodeResult construct_route(const Instance& inst, const Policy& policy,
                             DecodeMode mode = DecodeMode::kGreedyArgmax,
                             double time_offset = 0.0, std::uint64_t sample_seed = 0);

struct EpsilonGrid {
  std::vector<double> offsets;  // must contain 0, ascending, nonnegative

  void validate() const;
  // {0, 0.01, 0.02, 0.05, 0.1, 0.2} of the instance time scale.
  static EpsilonGrid defaults_for_scale(double time_scale);
};

struct AdaptResult {
  Tour tour;
  Schedule schedule;
  double chosen_epsilon = 0.0;
  bool legal = false;
};

// Decodes once per offset and keeps the shortest legal result; falls back to
// the plain (offset 0) decode when nothing is legal. Never worse on legality
// than the plain decode, since 0 is in the grid.
AdaptResult musla_adapt_solve(const Instance& inst, const Policy& policy,
                              const EpsilonGrid& grid);

}  // namespace tsptw::policy
