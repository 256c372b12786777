#include "tsptw/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsptw::datagen {

double expected_tour_constant(int n) {
  if (n < 1) throw std::invalid_argument("expected_tour_constant: n must be >= 1");
  return kUnitSquareMeanDistance * (n + 1);
}

MediumParams MediumParams::for_n(int n) {
  MediumParams p;
  p.n = n;
  p.t_n = expected_tour_constant(n);
  return p;
}

namespace {

std::string record_id(const char* kind, std::uint64_t seed, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s-s%llu-%06zu", kind,
                static_cast<unsigned long long>(seed), index);
  return buf;
}

Instance sample_coords(int n, rng::Stream& rs) {
  Instance inst;
  inst.coords.resize(n + 1);
  inst.windows.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    inst.coords[i].x = rs.next_double();
    inst.coords[i].y = rs.next_double();
  }
  inst.windows[0] = TimeWindow::unconstrained();
  return inst;
}

void sample_medium_windows(Instance& inst, double t_n, double alpha, double beta,
                           rng::Stream& rs) {
  for (int i = 1; i <= inst.n(); ++i) {
    const double start = t_n * rs.next_double();
    const double width = t_n * rs.uniform(alpha, beta);
    inst.windows[i] = TimeWindow{start, start + width, false};
  }
}

// 2 groups below n=35, otherwise uniform over [2, 7]; never more groups than
// nodes available.
int pick_group_count(int n, int available, rng::Stream& rs) {
  if (available < 1) {
    throw std::invalid_argument("group split: no nodes available for regrouping");
  }
  int k = (n < 35) ? 2 : rs.uniform_int(2, 7);
  return std::min(k, available);
}

// Seeded shuffle then round-robin; members kept sorted per group.
std::vector<GroupInfo> split_into_groups(std::vector<int> nodes, int k, rng::Stream& rs) {
  rs.shuffle(nodes);
  std::vector<GroupInfo> groups(k);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    groups[i % k].members.push_back(nodes[i]);
  }
  for (auto& g : groups) std::sort(g.members.begin(), g.members.end());
  return groups;
}

std::vector<int> non_depot_nodes(int n) {
  std::vector<int> nodes(n);
  for (int i = 0; i < n; ++i) nodes[i] = i + 1;
  return nodes;
}

}  // namespace

std::vector<DatasetRecord> gen_medium(const MediumParams& params, std::size_t count,
                                      std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("gen_medium: count must be >= 1");
  if (params.n < 1) throw std::invalid_argument("gen_medium: n must be >= 1");
  if (!(params.alpha > 0.0) || params.alpha > params.beta) {
    throw std::invalid_argument("gen_medium: need 0 < alpha <= beta");
  }
  const double t_n = params.scale();

  std::vector<DatasetRecord> records;
  records.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    rng::Stream rs = rng::substream(seed, "medium", idx);
    DatasetRecord rec;
    rec.id = record_id("medium", seed, idx);
    rec.instance = sample_coords(params.n, rs);
    sample_medium_windows(rec.instance, t_n, params.alpha, params.beta, rs);
    rec.meta.generator = "medium";
    rec.meta.seed = seed;
    rec.meta.params = {{"n", double(params.n)},
                       {"alpha", params.alpha},
                       {"beta", params.beta},
                       {"t_n", t_n}};
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

// Shared skeleton of the two Hard variants; `eval_windows` switches steps 1
// and 3 between random Medium sampling and constant windows.
std::vector<DatasetRecord> gen_hard(const HardParams& params, std::size_t count,
                                    std::uint64_t seed, bool eval_windows) {
  if (count < 1) throw std::invalid_argument("gen_hard: count must be >= 1");
  const int regroup = params.regrouped_count();
  if (regroup < 1) {
    throw std::invalid_argument("gen_hard: n too small, no nodes to regroup");
  }
  if (!(params.group_fraction > 0.0 && params.group_fraction < 1.0)) {
    throw std::invalid_argument("gen_hard: group_fraction must lie in (0,1)");
  }
  const double t_n = params.scale();
  const char* kind = eval_windows ? "hard-eval" : "hard-train";

  std::vector<DatasetRecord> records;
  records.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    rng::Stream rs = rng::substream(seed, kind, idx);
    DatasetRecord rec;
    rec.id = record_id(kind, seed, idx);
    rec.instance = sample_coords(params.n, rs);

    // Step 1: base windows.
    if (eval_windows) {
      for (int i = 1; i <= params.n; ++i) {
        rec.instance.windows[i] = TimeWindow{0.0, t_n, false};
      }
    } else {
      sample_medium_windows(rec.instance, t_n, params.alpha, params.beta, rs);
    }

    // Step 2: pick nodes and split them.
    const int k = pick_group_count(params.n, regroup, rs);
    std::vector<int> nodes = non_depot_nodes(params.n);
    rs.shuffle(nodes);
    nodes.resize(regroup);
    std::vector<GroupInfo> groups = split_into_groups(std::move(nodes), k, rs);

    // Step 3: per-group windows at the group's own scale.
    for (auto& g : groups) {
      const double t_p = expected_tour_constant(static_cast<int>(g.members.size()));
      for (int node : g.members) {
        if (eval_windows) {
          rec.instance.windows[node] = TimeWindow{0.0, t_p, false};
        } else {
          const double start = t_p * rs.next_double();
          const double width = t_p * rs.uniform(params.alpha, params.beta);
          rec.instance.windows[node] = TimeWindow{start, start + width, false};
        }
      }
    }

    // Step 4: shift each group.
    for (auto& g : groups) {
      g.shift = t_n * rs.next_double();
      for (int node : g.members) {
        rec.instance.windows[node].start += g.shift;
        rec.instance.windows[node].end += g.shift;
      }
    }

    rec.meta.generator = kind;
    rec.meta.seed = seed;
    rec.meta.params = {{"n", double(params.n)},
                       {"alpha", params.alpha},
                       {"beta", params.beta},
                       {"t_n", t_n},
                       {"group_fraction", params.group_fraction},
                       {"k_p", double(k)}};
    rec.meta.groups = std::move(groups);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::vector<DatasetRecord> gen_hard_train(const HardParams& params, std::size_t count,
                                          std::uint64_t seed) {
  return gen_hard(params, count, seed, false);
}

std::vector<DatasetRecord> gen_hard_eval(const HardParams& params, std::size_t count,
                                         std::uint64_t seed) {
  return gen_hard(params, count, seed, true);
}

std::vector<DatasetRecord> gen_weak_no_start(int n, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("gen_weak_no_start: count must be >= 1");
  MediumParams medium = MediumParams::for_n(n);
  std::vector<DatasetRecord> records;
  records.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    rng::Stream rs = rng::substream(seed, "weak-nostart", idx);
    DatasetRecord rec;
    rec.id = record_id("weak-nostart", seed, idx);
    rec.instance = sample_coords(n, rs);
    sample_medium_windows(rec.instance, medium.scale(), medium.alpha, medium.beta, rs);
    for (int i = 1; i <= n; ++i) rec.instance.windows[i].start = 0.0;
    rec.meta.generator = "weak-nostart";
    rec.meta.seed = seed;
    rec.meta.params = {{"n", double(n)},
                       {"alpha", medium.alpha},
                       {"beta", medium.beta},
                       {"t_n", medium.scale()}};
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<DatasetRecord> gen_unconstrained(int n, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("gen_unconstrained: count must be >= 1");
  std::vector<DatasetRecord> records;
  records.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    rng::Stream rs = rng::substream(seed, "unconstrained", idx);
    DatasetRecord rec;
    rec.id = record_id("unconstrained", seed, idx);
    rec.instance = sample_coords(n, rs);
    for (int i = 1; i <= n; ++i) rec.instance.windows[i] = TimeWindow::unconstrained();
    rec.meta.generator = "unconstrained";
    rec.meta.seed = seed;
    rec.meta.params = {{"n", double(n)}};
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<DatasetRecord> gen_grouped_medium(int n, std::size_t count, std::uint64_t seed,
                                              int group_count) {
  if (count < 1) throw std::invalid_argument("gen_grouped_medium: count must be >= 1");
  if (n < 1) throw std::invalid_argument("gen_grouped_medium: n must be >= 1");
  if (group_count > n) throw std::invalid_argument("gen_grouped_medium: more groups than nodes");
  const double alpha = 0.5;
  const double beta = 0.75;

  std::vector<DatasetRecord> records;
  records.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    rng::Stream rs = rng::substream(seed, "grouped-medium", idx);
    DatasetRecord rec;
    rec.id = record_id("grouped-medium", seed, idx);
    rec.instance = sample_coords(n, rs);

    const int k = group_count > 0 ? group_count : pick_group_count(n, n, rs);
    std::vector<GroupInfo> groups = split_into_groups(non_depot_nodes(n), k, rs);

    // Stack groups in time: each group starts where the previous one ended.
    double shift = 0.0;
    for (auto& g : groups) {
      g.shift = shift;
      const double t_p = expected_tour_constant(static_cast<int>(g.members.size()));
      double group_max_end = shift;
      for (int node : g.members) {
        const double start = shift + t_p * rs.next_double();
        const double width = t_p * rs.uniform(alpha, beta);
        rec.instance.windows[node] = TimeWindow{start, start + width, false};
        group_max_end = std::max(group_max_end, start + width);
      }
      shift = group_max_end;
    }

    rec.meta.generator = "grouped-medium";
    rec.meta.seed = seed;
    rec.meta.params = {{"n", double(n)}, {"alpha", alpha}, {"beta", beta}, {"k_p", double(k)}};
    rec.meta.groups = std::move(groups);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<DatasetRecord> mix_training_corpus(const std::vector<DatasetRecord>& medium,
                                               const std::vector<DatasetRecord>& hard,
                                               const std::vector<DatasetRecord>& supplement,
                                               const MixRatio& ratio, std::uint64_t seed) {
  if (ratio.medium < 0 || ratio.hard < 0 || ratio.supplement < 0 ||
      (ratio.medium == 0 && ratio.hard == 0 && ratio.supplement == 0)) {
    throw std::invalid_argument("mix_training_corpus: ratio must have a positive part");
  }
  std::size_t unit = SIZE_MAX;
  auto cap = [&unit](const std::vector<DatasetRecord>& part, int r) {
    if (r > 0) unit = std::min(unit, part.size() / r);
  };
  cap(medium, ratio.medium);
  cap(hard, ratio.hard);
  cap(supplement, ratio.supplement);
  if (unit == 0) throw std::invalid_argument("mix_training_corpus: a source is too small");

  std::vector<DatasetRecord> corpus;
  corpus.reserve(unit * (ratio.medium + ratio.hard + ratio.supplement));
  auto take = [&corpus, unit](const std::vector<DatasetRecord>& part, int r) {
    corpus.insert(corpus.end(), part.begin(), part.begin() + unit * r);
  };
  take(medium, ratio.medium);
  take(hard, ratio.hard);
  take(supplement, ratio.supplement);

  rng::Stream rs = rng::substream(seed, "mix");
  rs.shuffle(corpus);
  return corpus;
}

}  // namespace tsptw::datagen
