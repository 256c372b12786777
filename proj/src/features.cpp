#include "tsptw/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tsptw::features {

namespace {

std::vector<char> visited_flags(const Instance& inst, const std::vector<int>& prefix) {
  std::vector<char> visited(inst.node_count(), 0);
  for (int node : prefix) {
    if (node < 0 || node >= inst.node_count()) {
      throw std::invalid_argument("features: prefix node out of range");
    }
    if (visited[node]) throw std::invalid_argument("features: repeated node in prefix");
    visited[node] = 1;
  }
  if (prefix.empty() || prefix[0] != 0) {
    throw std::invalid_argument("features: prefix must start at the depot");
  }
  return visited;
}

double prefix_clock(const Instance& inst, const std::vector<int>& prefix) {
  return propagate(inst, prefix).visit_times.back();
}

// The f-block of a hypothetical route ending at `endpoint` at time `t_end`:
// which of the still-unvisited nodes is already doomed to be late, by how
// much, and what the cheapest greedy follow-up costs.
Lookahead lookahead_block(const Instance& inst, const std::vector<char>& visited, int endpoint,
                          double t_end) {
  Lookahead f{};
  f[5] = 1.0;
  bool any_candidate = false;
  double max_over = 0.0;
  double sum_over = 0.0;
  int greedy_node = -1;
  double greedy_cost = 0.0;
  for (int v = 0; v < inst.node_count(); ++v) {
    if (visited[v]) continue;
    any_candidate = true;
    const double edge = inst.dist(endpoint, v);
    const TimeWindow& w = inst.windows[v];
    if (!w.end_unconstrained && t_end + edge > w.end) {
      const double over = t_end + edge - w.end;
      max_over = std::max(max_over, over);
      sum_over += over;
      f[0] = 1.0;
    }
    const double cost = std::max(edge + t_end, w.start) - t_end;
    if (greedy_node < 0 || cost < greedy_cost) {
      greedy_node = v;
      greedy_cost = cost;
    }
  }
  if (!any_candidate) return f;  // last node: nothing ahead, flag only
  f[1] = max_over;
  f[2] = sum_over;
  f[3] = inst.dist(endpoint, greedy_node);
  f[4] = greedy_cost;
  return f;
}

}  // namespace

StaticNodeFeatures static_node_features(const Instance& inst) {
  StaticNodeFeatures out;
  out.node_count = inst.node_count();
  out.rows.resize(inst.node_count());
  const Point depot = inst.coords[0];
  for (int i = 0; i < inst.node_count(); ++i) {
    const Point& p = inst.coords[i];
    const TimeWindow& w = inst.windows[i];
    out.rows[i] = {p.x,          p.y,          w.start, encoded_window_end(w),
                   p.x - depot.x, p.y - depot.y, inst.dist(i, 0)};
  }
  return out;
}

int edge_neighbor_count(int node_count) {
  const int k = std::max(1, (node_count + 4) / 5);  // ceil(0.2 m)
  return std::min(k, node_count - 1);
}

StaticEdgeFeatures static_edge_features(const Instance& inst) {
  StaticEdgeFeatures out;
  const int m = inst.node_count();
  out.neighbor_count = edge_neighbor_count(m);
  out.per_node.resize(m);
  std::vector<std::pair<double, int>> by_dist;
  for (int i = 0; i < m; ++i) {
    by_dist.clear();
    for (int j = 0; j < m; ++j) {
      if (j != i) by_dist.emplace_back(inst.dist(i, j), j);
    }
    std::sort(by_dist.begin(), by_dist.end());
    const double s_i = inst.windows[i].start;
    const double e_i = encoded_window_end(inst.windows[i]);
    auto& list = out.per_node[i];
    list.reserve(out.neighbor_count);
    for (int r = 0; r < out.neighbor_count; ++r) {
      const int j = by_dist[r].second;
      const double s_j = inst.windows[j].start;
      const double e_j = encoded_window_end(inst.windows[j]);
      list.push_back(EdgeFeature{j, {by_dist[r].first, s_j - s_i, e_j - s_i, s_j - e_i, e_j - e_i}});
    }
  }
  return out;
}

DynamicFeatures dynamic_features(const Instance& inst, const std::vector<int>& prefix,
                                 double now) {
  const std::vector<char> visited = visited_flags(inst, prefix);
  const int cur = prefix.back();
  const Point cur_pos = inst.coords[cur];
  const double s_cur = inst.windows[cur].start;
  const double e_cur = encoded_window_end(inst.windows[cur]);

  DynamicFeatures out;
  for (int v = 0; v < inst.node_count(); ++v) {
    if (visited[v]) continue;
    const Point& p = inst.coords[v];
    const TimeWindow& w = inst.windows[v];
    const double edge = inst.dist(cur, v);
    const double visit_cost = std::max(edge + now, w.start) - now;
    const double e_v = encoded_window_end(w);
    out.candidates.push_back(v);
    out.rows.push_back({p.x, p.y, p.x - cur_pos.x, p.y - cur_pos.y, edge, visit_cost,
                        w.start - now, e_v - now, w.start - s_cur, e_v - s_cur, w.start - e_cur,
                        e_v - e_cur});
  }
  return out;
}

Lookahead osla_features_at(const Instance& inst, const std::vector<int>& prefix, int candidate,
                           double now) {
  std::vector<char> visited = visited_flags(inst, prefix);
  if (candidate < 0 || candidate >= inst.node_count() || visited[candidate]) {
    throw std::invalid_argument("osla_features: candidate must be an unvisited node");
  }
  const double edge = inst.dist(prefix.back(), candidate);
  const double t_next = arrival_time(now, edge, inst.windows[candidate]);
  visited[candidate] = 1;
  return lookahead_block(inst, visited, candidate, t_next);
}

Lookahead osla_features(const Instance& inst, const std::vector<int>& prefix, int candidate) {
  return osla_features_at(inst, prefix, candidate, prefix_clock(inst, prefix));
}

const char* level_name(FeatureLevel level) {
  switch (level) {
    case FeatureLevel::kStatic: return "static";
    case FeatureLevel::kDynamic: return "dynamic";
    case FeatureLevel::kOsla: return "osla";
    case FeatureLevel::kMusla: return "musla";
  }
  return "?";
}

std::optional<FeatureLevel> parse_level(const std::string& name) {
  if (name == "static") return FeatureLevel::kStatic;
  if (name == "dynamic") return FeatureLevel::kDynamic;
  if (name == "osla") return FeatureLevel::kOsla;
  if (name == "musla") return FeatureLevel::kMusla;
  return std::nullopt;
}

int candidate_feature_dim(FeatureLevel level) {
  int dim = kStaticNodeDim + kStaticEdgeDim;
  if (level == FeatureLevel::kStatic) return dim;
  dim += kDynamicDim;
  if (level == FeatureLevel::kDynamic) return dim;
  dim += kLookaheadDim;
  if (level == FeatureLevel::kOsla) return dim;
  return dim + kLookaheadDim;
}

int scorer_input_dim(FeatureLevel level) { return candidate_feature_dim(level) + kContextDim; }

StaticCache build_static_cache(const Instance& inst) {
  StaticCache cache;
  cache.nodes = static_node_features(inst);
  cache.edges = static_edge_features(inst);
  cache.edge_means.resize(inst.node_count());
  for (int i = 0; i < inst.node_count(); ++i) {
    auto& mean = cache.edge_means[i];
    mean.fill(0.0);
    const auto& list = cache.edges.per_node[i];
    for (const EdgeFeature& e : list) {
      for (int c = 0; c < kStaticEdgeDim; ++c) mean[c] += e.values[c];
    }
    if (!list.empty()) {
      for (int c = 0; c < kStaticEdgeDim; ++c) mean[c] /= static_cast<double>(list.size());
    }
  }
  cache.node_mean.fill(0.0);
  for (const auto& row : cache.nodes.rows) {
    for (int c = 0; c < kStaticNodeDim; ++c) cache.node_mean[c] += row[c];
  }
  for (int c = 0; c < kStaticNodeDim; ++c) {
    cache.node_mean[c] /= static_cast<double>(inst.node_count());
  }
  cache.time_scale = inst.n() >= 1 ? datagen::expected_tour_constant(inst.n()) : 1.0;
  return cache;
}

namespace {

StateFeatures assemble_impl(const Instance& inst, const StaticCache& cache,
                            const std::vector<int>& prefix, double now, FeatureLevel level,
                            const CandidateScorer* osla_policy, int top_k, int steps);

MuslaFeatures musla_impl(const Instance& inst, const StaticCache& cache,
                         const std::vector<int>& prefix, const CandidateScorer& osla_policy,
                         int top_k, int steps, double now,
                         const StateFeatures* osla_state_hint) {
  if (top_k < 1) throw std::invalid_argument("musla_features: top_k must be >= 1");
  if (steps < 0) throw std::invalid_argument("musla_features: steps must be >= 0");

  StateFeatures local;
  const StateFeatures* osla_state = osla_state_hint;
  if (!osla_state) {
    local = assemble_impl(inst, cache, prefix, now, FeatureLevel::kOsla, nullptr, 0, 0);
    osla_state = &local;
  }

  MuslaFeatures out;
  out.candidates = osla_state->candidates;
  const std::size_t c = out.candidates.size();
  out.rows.assign(c, Lookahead{});
  out.in_top_k.assign(c, 0);
  if (c == 0) return out;

  const std::vector<double> scores = osla_policy(osla_state->rows, osla_state->context);
  if (scores.size() != c) {
    throw std::invalid_argument("musla_features: policy returned wrong score count");
  }

  std::vector<std::size_t> ranking(c);
  std::iota(ranking.begin(), ranking.end(), 0);
  std::stable_sort(ranking.begin(), ranking.end(), [&scores](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];  // ties keep ascending node order
  });

  const std::size_t picks = std::min<std::size_t>(top_k, c);
  for (std::size_t r = 0; r < picks; ++r) {
    const std::size_t ci = ranking[r];
    out.in_top_k[ci] = 1;
    // Not enough route left to look `steps` ahead and still see anything.
    if (static_cast<int>(c) - 1 < steps + 1) continue;

    std::vector<int> ext = prefix;
    ext.push_back(out.candidates[ci]);
    double t = arrival_time(now, inst.dist(prefix.back(), out.candidates[ci]),
                            inst.windows[out.candidates[ci]]);
    for (int s = 0; s < steps; ++s) {
      const StateFeatures st =
          assemble_impl(inst, cache, ext, t, FeatureLevel::kOsla, nullptr, 0, 0);
      const std::vector<double> ext_scores = osla_policy(st.rows, st.context);
      if (ext_scores.size() != st.candidates.size()) {
        throw std::invalid_argument("musla_features: policy returned wrong score count");
      }
      std::size_t best = 0;
      for (std::size_t j = 1; j < ext_scores.size(); ++j) {
        if (ext_scores[j] > ext_scores[best]) best = j;
      }
      const int next = st.candidates[best];
      t = arrival_time(t, inst.dist(ext.back(), next), inst.windows[next]);
      ext.push_back(next);
    }

    std::vector<char> visited(inst.node_count(), 0);
    for (int node : ext) visited[node] = 1;
    out.rows[ci] = lookahead_block(inst, visited, ext.back(), t);
  }
  return out;
}

StateFeatures assemble_impl(const Instance& inst, const StaticCache& cache,
                            const std::vector<int>& prefix, double now, FeatureLevel level,
                            const CandidateScorer* osla_policy, int top_k, int steps) {
  StateFeatures out;
  const DynamicFeatures dynamic = dynamic_features(inst, prefix, now);
  out.candidates = dynamic.candidates;
  const std::size_t c = out.candidates.size();

  const int dim = candidate_feature_dim(level);
  out.rows.assign(c, {});
  for (std::size_t i = 0; i < c; ++i) {
    const int v = out.candidates[i];
    std::vector<double>& row = out.rows[i];
    row.reserve(dim);
    row.insert(row.end(), cache.nodes.rows[v].begin(), cache.nodes.rows[v].end());
    row.insert(row.end(), cache.edge_means[v].begin(), cache.edge_means[v].end());
    if (level != FeatureLevel::kStatic) {
      row.insert(row.end(), dynamic.rows[i].begin(), dynamic.rows[i].end());
    }
    if (level == FeatureLevel::kOsla || level == FeatureLevel::kMusla) {
      const Lookahead f = osla_features_at(inst, prefix, v, now);
      row.insert(row.end(), f.begin(), f.end());
    }
  }

  // The static level must not see the construction state, or the ablation
  // stops being an ablation; its clock entries stay zero.
  const int i_step = static_cast<int>(prefix.size()) - 1;
  out.context.assign(cache.node_mean.begin(), cache.node_mean.end());
  if (level == FeatureLevel::kStatic) {
    out.context.push_back(0.0);
    out.context.push_back(0.0);
  } else {
    out.context.push_back(inst.n() > 0 ? static_cast<double>(i_step) / inst.n() : 0.0);
    out.context.push_back(now / cache.time_scale);
  }

  if (level == FeatureLevel::kMusla) {
    if (!osla_policy) {
      throw std::invalid_argument("assemble_state: musla level needs a one-step policy");
    }
    // Rows currently end at the one-step block, so `out` doubles as the
    // ranking input.
    const MuslaFeatures blocks =
        musla_impl(inst, cache, prefix, *osla_policy, top_k, steps, now, &out);
    for (std::size_t i = 0; i < c; ++i) {
      out.rows[i].insert(out.rows[i].end(), blocks.rows[i].begin(), blocks.rows[i].end());
    }
  }
  return out;
}

}  // namespace

MuslaFeatures musla_features_at(const Instance& inst, const std::vector<int>& prefix,
                                const CandidateScorer& osla_policy, int top_k, int steps,
                                double now) {
  const StaticCache cache = build_static_cache(inst);
  return musla_impl(inst, cache, prefix, osla_policy, top_k, steps, now, nullptr);
}

MuslaFeatures musla_features(const Instance& inst, const std::vector<int>& prefix,
                             const CandidateScorer& osla_policy, int top_k, int steps) {
  return musla_features_at(inst, prefix, osla_policy, top_k, steps,
                           prefix_clock(inst, prefix));
}

StateFeatures assemble_state(const Instance& inst, const StaticCache& cache,
                             const std::vector<int>& prefix, double now, FeatureLevel level,
                             const CandidateScorer* osla_policy, int top_k, int steps) {
  return assemble_impl(inst, cache, prefix, now, level, osla_policy, top_k, steps);
}

std::vector<TrainingSample> build_training_samples(const datagen::DatasetRecord& record,
                                                   FeatureLevel level,
                                                   const CandidateScorer* osla_policy, int top_k,
                                                   int steps) {
  if (!record.expert_tour) {
    throw std::invalid_argument("build_training_samples: record has no expert tour");
  }
  if (level == FeatureLevel::kMusla && !osla_policy) {
    throw std::invalid_argument("build_training_samples: musla level needs a one-step policy");
  }
  const Instance& inst = record.instance;
  const Tour& expert = *record.expert_tour;
  if (!is_permutation_from_depot(inst, expert)) {
    throw std::invalid_argument("build_training_samples: expert tour is not a permutation");
  }

  const StaticCache cache = build_static_cache(inst);
  std::vector<TrainingSample> samples;
  samples.reserve(inst.n());

  std::vector<int> prefix{0};
  double now = std::max(0.0, inst.windows[0].start);
  for (int i = 0; i < inst.n(); ++i) {
    TrainingSample sample;
    sample.instance_id = record.id;
    sample.step = i;
    sample.state = assemble_impl(inst, cache, prefix, now, level, osla_policy, top_k, steps);

    const int next = expert.order[i + 1];
    const auto it =
        std::lower_bound(sample.state.candidates.begin(), sample.state.candidates.end(), next);
    if (it == sample.state.candidates.end() || *it != next) {
      throw std::logic_error("build_training_samples: expert choice not in candidate set");
    }
    sample.expert_choice = static_cast<int>(it - sample.state.candidates.begin());
    samples.push_back(std::move(sample));

    now = arrival_time(now, inst.dist(prefix.back(), next), inst.windows[next]);
    prefix.push_back(next);
  }
  return samples;
}

}  // namespace tsptw::features
