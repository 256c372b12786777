#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "support/oracles.hpp"
#include "tsptw/datagen.hpp"
#include "tsptw/expert.hpp"
#include "tsptw/policy.hpp"

using namespace tsptw;
using namespace tsptw::policy;

namespace {

Policy zero_policy(features::FeatureLevel level) {
  Policy pol;
  pol.level = level;
  pol.scorer = init_scorer(features::scorer_input_dim(level), {8, 8}, 1);
  for (double& v : pol.scorer.values) v = 0.0;
  // keep norm gains at zero too: every logit collapses to the zero head bias
  return pol;
}

Policy trained_osla_policy(std::uint64_t seed) {
  auto records = datagen::gen_medium(datagen::MediumParams::for_n(6), 120, seed);
  const auto labeled = expert::label_dataset(records, expert::SolverChoice::kDp);
  std::vector<features::TrainingSample> samples;
  for (const auto& rec : labeled.records) {
    auto part = features::build_training_samples(rec, features::FeatureLevel::kOsla);
    samples.insert(samples.end(), part.begin(), part.end());
  }
  TrainConfig config;
  config.epochs = 40;
  config.batch_size = 64;
  config.learning_rate = 3e-3;
  config.seed = seed;
  const int dim = features::scorer_input_dim(features::FeatureLevel::kOsla);
  TrainResult result = train(samples, init_scorer(dim, {24, 24}, seed), config);

  Policy pol;
  pol.level = features::FeatureLevel::kOsla;
  pol.scorer = std::move(result.params);
  return pol;
}

}  // namespace

TEST_CASE("greedy-mt picks the earliest reachable node") {
  // waiting dominates: the near node opens far too late
  Instance inst;
  inst.coords = {{0, 0}, {0.1, 0}, {0.5, 0}};
  inst.windows = {TimeWindow::unconstrained(), {100.0, 200.0, false}, {0.0, 50.0, false}};
  const Tour tour = greedy_mt(inst);
  CHECK(tour.order == std::vector<int>{0, 2, 1});

  // without windows it is plain nearest neighbour
  rng::Stream rs = rng::substream(5, "mt-nn");
  for (int trial = 0; trial < 40; ++trial) {
    Instance open = oracles::random_instance(7, rs, 1.0);
    for (auto& w : open.windows) w = TimeWindow::unconstrained();
    const Tour got = greedy_mt(open);
    std::vector<char> visited(open.node_count(), 0);
    visited[0] = 1;
    int cur = 0;
    for (std::size_t k = 1; k < got.order.size(); ++k) {
      int nearest = -1;
      for (int v = 1; v < open.node_count(); ++v) {
        if (visited[v]) continue;
        if (nearest < 0 || open.dist(cur, v) < open.dist(cur, nearest)) nearest = v;
      }
      CHECK(got.order[k] == nearest);
      visited[nearest] = 1;
      cur = nearest;
    }
    CHECK(is_permutation_from_depot(open, got));
  }
}

TEST_CASE("greedy-lt sorts by deadline and ignores geometry") {
  Instance inst;
  inst.coords = {{0, 0}, {0.9, 0.9}, {0.1, 0.1}, {0.5, 0.5}};
  inst.windows = {TimeWindow::unconstrained(),
                  {0.0, 3.0, false},
                  {0.0, 9.0, false},
                  {0.0, 1.0, false}};
  CHECK(greedy_lt(inst).order == std::vector<int>{0, 3, 1, 2});

  // moving nodes around changes nothing
  Instance moved = inst;
  moved.coords = {{0, 0}, {0.2, 0.1}, {0.8, 0.3}, {0.4, 0.9}};
  CHECK(greedy_lt(moved).order == greedy_lt(inst).order);

  Instance open;
  open.coords = {{0, 0}, {0.9, 0.9}, {0.1, 0.1}};
  open.windows.assign(3, TimeWindow::unconstrained());
  CHECK(greedy_lt(open).order == std::vector<int>{0, 1, 2});  // all tied: index order
}

TEST_CASE("greedy-es sorts by window opening") {
  Instance inst;
  inst.coords = {{0, 0}, {0.5, 0.5}, {0.2, 0.8}, {0.9, 0.1}};
  inst.windows = {TimeWindow::unconstrained(),
                  {5.0, 9.0, false},
                  {1.0, 9.0, false},
                  {3.0, 9.0, false}};
  CHECK(greedy_es(inst).order == std::vector<int>{0, 2, 3, 1});

  Instance tied = inst;
  for (int i = 1; i <= 3; ++i) tied.windows[i].start = 2.0;
  CHECK(greedy_es(tied).order == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("policy validation catches mismatches") {
  Policy pol = zero_policy(features::FeatureLevel::kDynamic);
  pol.level = features::FeatureLevel::kOsla;  // width no longer matches
  CHECK_THROWS_AS(pol.validate(), std::invalid_argument);

  Policy musla = zero_policy(features::FeatureLevel::kMusla);
  CHECK_THROWS_AS(musla.validate(), std::invalid_argument);  // no helper
  musla.osla_helper = init_scorer(features::scorer_input_dim(features::FeatureLevel::kOsla),
                                  {8}, 2);
  CHECK_NOTHROW(musla.validate());
}

TEST_CASE("decoding masks visited nodes and never halts") {
  const auto records = datagen::gen_medium(datagen::MediumParams::for_n(8), 10, 77);

  const Policy zeros = zero_policy(features::FeatureLevel::kDynamic);
  for (const auto& rec : records) {
    const DecodeResult result = construct_route(rec.instance, zeros);
    CHECK(is_permutation_from_depot(rec.instance, result.tour));
    // all logits tie at zero, so decode falls back to index order
    CHECK(result.tour.order == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8});
  }

  // musla-level decode with an untrained helper still yields permutations
  Policy musla = zero_policy(features::FeatureLevel::kMusla);
  musla.osla_helper = init_scorer(features::scorer_input_dim(features::FeatureLevel::kOsla),
                                  {8, 8}, 9);
  const DecodeResult a = construct_route(records[0].instance, musla);
  const DecodeResult b = construct_route(records[0].instance, musla);
  CHECK(is_permutation_from_depot(records[0].instance, a.tour));
  CHECK(a.tour.order == b.tour.order);  // deterministic
}

TEST_CASE("positively scaling the head leaves decodes unchanged") {
  const auto records = datagen::gen_medium(datagen::MediumParams::for_n(7), 5, 31);
  Policy pol;
  pol.level = features::FeatureLevel::kDynamic;
  pol.scorer = init_scorer(features::scorer_input_dim(pol.level), {16, 16}, 21);

  Policy scaled = pol;
  const std::size_t head_params = 16 + 1;  // last hidden width + bias
  for (std::size_t i = scaled.scorer.values.size() - head_params;
       i < scaled.scorer.values.size(); ++i) {
    scaled.scorer.values[i] *= 3.0;
  }
  for (const auto& rec : records) {
    CHECK(construct_route(rec.instance, pol).tour.order ==
          construct_route(rec.instance, scaled).tour.order);
  }
}

TEST_CASE("epsilon grid validation") {
  EpsilonGrid good = EpsilonGrid::defaults_for_scale(10.0);
  CHECK_NOTHROW(good.validate());
  CHECK(good.offsets.front() == 0.0);
  CHECK(std::is_sorted(good.offsets.begin(), good.offsets.end()));

  EpsilonGrid no_zero{{0.1, 0.2}};
  CHECK_THROWS_AS(no_zero.validate(), std::invalid_argument);
  EpsilonGrid unsorted{{0.0, 0.3, 0.2}};
  CHECK_THROWS_AS(unsorted.validate(), std::invalid_argument);
}

TEST_CASE("adapt with the degenerate grid is the plain decode") {
  const auto records = datagen::gen_medium(datagen::MediumParams::for_n(7), 8, 41);
  const Policy pol = trained_osla_policy(123);
  for (const auto& rec : records) {
    const AdaptResult adapt = musla_adapt_solve(rec.instance, pol, EpsilonGrid{{0.0}});
    const DecodeResult plain = construct_route(rec.instance, pol);
    CHECK(adapt.tour.order == plain.tour.order);
    CHECK(adapt.chosen_epsilon == 0.0);
  }
}

TEST_CASE("adapt never loses on legality and sometimes rescues") {
  const Policy pol = trained_osla_policy(123);
  const auto eval_records = datagen::gen_medium(datagen::MediumParams::for_n(6), 150, 777);
  const EpsilonGrid grid =
      EpsilonGrid::defaults_for_scale(datagen::expected_tour_constant(6));

  int base_illegal = 0;
  int adapt_illegal = 0;
  int rescued = 0;
  for (const auto& rec : eval_records) {
    const DecodeResult base = construct_route(rec.instance, pol);
    const AdaptResult adapt = musla_adapt_solve(rec.instance, pol, grid);
    const bool base_ok = base.schedule.total_timeout == 0.0;
    if (!base_ok) ++base_illegal;
    if (!adapt.legal) ++adapt_illegal;
    if (!base_ok && adapt.legal) {
      ++rescued;
      CHECK(adapt.chosen_epsilon > 0.0);
      CHECK(check_legality(rec.instance, adapt.tour).is_legal);
    }
    if (base_ok) {
      REQUIRE(adapt.legal);  // zero offset sits in the grid
      CHECK(adapt.schedule.total_length <= base.schedule.total_length);
    }
  }
  CHECK(adapt_illegal <= base_illegal);
  INFO("base illegal ", base_illegal, ", rescued ", rescued);
  CHECK(base_illegal > 0);  // the corpus does pressure this policy
  CHECK(rescued > 0);       // and the offset sweep actually helps somewhere
}
