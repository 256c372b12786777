#include "tsptw/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tsptw/rng.hpp"

namespace tsptw::policy {

namespace {

template <typename Better>
Tour greedy_tour(const Instance& inst, Better better) {
  Tour tour;
  tour.order.reserve(inst.node_count());
  tour.order.push_back(0);
  std::vector<char> visited(inst.node_count(), 0);
  visited[0] = 1;
  double t = std::max(0.0, inst.windows[0].start);

  for (int step = 0; step < inst.n(); ++step) {
    const int cur = tour.order.back();
    int pick = -1;
    for (int v = 1; v < inst.node_count(); ++v) {
      if (visited[v]) continue;
      if (pick < 0 || better(inst, t, cur, v, pick)) pick = v;
    }
    visited[pick] = 1;
    t = arrival_time(t, inst.dist(cur, pick), inst.windows[pick]);
    tour.order.push_back(pick);
  }
  return tour;
}

}  // namespace

Tour greedy_mt(const Instance& inst) {
  return greedy_tour(inst, [](const Instance& ins, double t, int cur, int v, int best) {
    const double a = arrival_time(t, ins.dist(cur, v), ins.windows[v]);
    const double b = arrival_time(t, ins.dist(cur, best), ins.windows[best]);
    return a < b;
  });
}

Tour greedy_lt(const Instance& inst) {
  auto deadline = [](const TimeWindow& w) {
    return w.end_unconstrained ? std::numeric_limits<double>::infinity() : w.end;
  };
  return greedy_tour(inst, [deadline](const Instance& ins, double, int, int v, int best) {
    return deadline(ins.windows[v]) < deadline(ins.windows[best]);
  });
}

Tour greedy_es(const Instance& inst) {
  return greedy_tour(inst, [](const Instance& ins, double, int, int v, int best) {
    return ins.windows[v].start < ins.windows[best].start;
  });
}

void Policy::validate() const {
  const int want = features::scorer_input_dim(level);
  if (scorer.shape.input_dim != want) {
    throw std::invalid_argument("policy: scorer width " +
                                std::to_string(scorer.shape.input_dim) +
                                " does not match level " + features::level_name(level) +
                                " (needs " + std::to_string(want) + ")");
  }
  if (level == features::FeatureLevel::kMusla) {
    if (!osla_helper) {
      throw std::invalid_argument("policy: musla level needs the one-step helper scorer");
    }
    const int helper_want = features::scorer_input_dim(features::FeatureLevel::kOsla);
    if (osla_helper->shape.input_dim != helper_want) {
      throw std::invalid_argument("policy: helper scorer width does not match the one-step level");
    }
    if (top_k < 1 || lookahead_steps < 0) {
      throw std::invalid_argument("policy: top_k must be >= 1 and lookahead_steps >= 0");
    }
  }
}

DecodeResult construct_route(const Instance& inst, const Policy& policy, DecodeMode mode,
                             double time_offset, std::uint64_t sample_seed) {
  policy.validate();
  const features::StaticCache cache = features::build_static_cache(inst);
  features::CandidateScorer helper;
  if (policy.osla_helper) helper = make_candidate_scorer(*policy.osla_helper);

  rng::Stream sampler = rng::substream(sample_seed, "decode-sample");
  Tour tour;
  tour.order.reserve(inst.node_count());
  tour.order.push_back(0);
  std::vector<int> prefix{0};
  double t = std::max(0.0, inst.windows[0].start);

  for (int step = 0; step < inst.n(); ++step) {
    const features::StateFeatures state =
        features::assemble_state(inst, cache, prefix, t + time_offset, policy.level,
                                 policy.osla_helper ? &helper : nullptr, policy.top_k,
                                 policy.lookahead_steps);
    const std::vector<double> logits = score_candidates(policy.scorer, state.rows, state.context);

    std::size_t pick = 0;
    if (mode == DecodeMode::kSample) {
      const std::vector<double> probs = softmax(logits);
      double u = sampler.next_double();
      for (std::size_t i = 0; i < probs.size(); ++i) {
        u -= probs[i];
        pick = i;
        if (u <= 0.0) break;
      }
    } else {
      for (std::size_t i = 1; i < logits.size(); ++i) {
        if (logits[i] > logits[pick]) pick = i;
      }
    }

    const int next = state.candidates[pick];
    t = arrival_time(t, inst.dist(prefix.back(), next), inst.windows[next]);
    prefix.push_back(next);
    tour.order.push_back(next);
  }

  DecodeResult result;
  result.schedule = tour_schedule(inst, tour);
  result.tour = std::move(tour);
  return result;
}

void EpsilonGrid::validate() const {
  if (offsets.empty() || offsets[0] != 0.0) {
    throw std::invalid_argument("epsilon grid: must start at 0");
  }
  if (!std::is_sorted(offsets.begin(), offsets.end())) {
    throw std::invalid_argument("epsilon grid: offsets must ascend");
  }
}

EpsilonGrid EpsilonGrid::defaults_for_scale(double time_scale) {
  EpsilonGrid grid;
  for (double f : {0.0, 0.01, 0.02, 0.05, 0.1, 0.2}) grid.offsets.push_back(f * time_scale);
  return grid;
}

AdaptResult musla_adapt_solve(const Instance& inst, const Policy& policy,
                              const EpsilonGrid& grid) {
  grid.validate();
  AdaptResult best;
  bool have_best = false;
  AdaptResult fallback;

  for (double eps : grid.offsets) {
    DecodeResult decoded = construct_route(inst, policy, DecodeMode::kGreedyArgmax, eps);
    const bool legal = decoded.schedule.total_timeout == 0.0;
    if (eps == 0.0) {
      fallback.tour = decoded.tour;
      fallback.schedule = decoded.schedule;
      fallback.chosen_epsilon = 0.0;
      fallback.legal = legal;
    }
    if (legal &&
        (!have_best || decoded.schedule.total_length < best.schedule.total_length)) {
      best.tour = std::move(decoded.tour);
      best.schedule = std::move(decoded.schedule);
      best.chosen_epsilon = eps;
      best.legal = true;
      have_best = true;
    }
  }
  return have_best ? best : fallback;
}

}  // namespace tsptw::policy
