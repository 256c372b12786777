#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tsptw/core.hpp"
#include "tsptw/rng.hpp"

using namespace tsptw;

namespace {

Instance square_instance() {
  Instance inst;
  inst.coords = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  inst.windows.assign(4, TimeWindow::unconstrained());
  return inst;
}

}  // namespace

TEST_CASE("distance basics") {
  CHECK(distance({0, 0}, {0, 0}) == 0.0);
  CHECK(distance({0, 0}, {3.0 / 5, 4.0 / 5}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(distance({0.2, 0.1}, {0.7, 0.5}) == doctest::Approx(std::sqrt(0.41)).epsilon(1e-15));
  // symmetry
  CHECK(distance({0.3, 0.9}, {0.8, 0.2}) == distance({0.8, 0.2}, {0.3, 0.9}));
}

TEST_CASE("propagate follows the waiting rule") {
  Instance inst;
  inst.coords = {{0, 0}, {0, 1}};
  inst.windows = {TimeWindow::unconstrained(), {2.0, 5.0, false}};

  Schedule sched = propagate(inst, {0, 1});
  CHECK(sched.visit_times[1] == 2.0);
  CHECK(sched.waits[1] == doctest::Approx(1.0));
  CHECK(sched.lateness[1] == 0.0);

  inst.windows[1] = {0.0, 0.5, false};
  sched = propagate(inst, {0, 1});
  CHECK(sched.visit_times[1] == 1.0);
  CHECK(sched.lateness[1] == doctest::Approx(0.5));
  CHECK(sched.total_timeout == doctest::Approx(0.5));

  sched = propagate(inst, {0});
  CHECK(sched.visit_times[0] == 0.0);
}

TEST_CASE("propagate rejects malformed prefixes") {
  Instance inst = square_instance();
  CHECK_THROWS_AS(propagate(inst, {0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(propagate(inst, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(propagate(inst, {}), std::invalid_argument);
  CHECK_THROWS_AS(propagate(inst, {0, 9}), std::invalid_argument);
}

TEST_CASE("tour_length includes the return edge") {
  Instance inst = square_instance();
  CHECK(tour_length(inst, Tour{{0, 1, 2, 3}}) == doctest::Approx(4.0));

  Instance pair;
  pair.coords = {{0, 0}, {0, 1}};
  pair.windows.assign(2, TimeWindow::unconstrained());
  CHECK(tour_length(pair, Tour{{0, 1}}) == doctest::Approx(2.0));
}

TEST_CASE("tour_length matches an independent edge sum on random instances") {
  rng::Stream rs = rng::substream(11, "core-len");
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = oracles::random_instance(6, rs);
    std::vector<int> order{0, 1, 2, 3, 4, 5, 6};
    rng::Stream shuf = rng::substream(11, "core-len-shuffle", trial);
    std::vector<int> tail(order.begin() + 1, order.end());
    shuf.shuffle(tail);
    std::copy(tail.begin(), tail.end(), order.begin() + 1);
    CHECK(tour_length(inst, Tour{order}) ==
          doctest::Approx(oracles::closed_tour_length(inst, order)).epsilon(1e-12));
  }
}

TEST_CASE("check_legality verdicts") {
  Instance inst = square_instance();
  const LegalityReport wide = check_legality(inst, Tour{{0, 1, 2, 3}});
  CHECK(wide.is_legal);
  CHECK(wide.total_timeout == 0.0);

  Instance tight;
  tight.coords = {{0, 0}, {0, 1}};
  tight.windows = {TimeWindow::unconstrained(), {0.0, 0.5, false}};
  const LegalityReport late = check_legality(tight, Tour{{0, 1}});
  CHECK_FALSE(late.is_legal);
  CHECK(late.total_timeout == doctest::Approx(0.5));

  const LegalityReport dup = check_legality(inst, Tour{{0, 1, 1, 2}});
  CHECK_FALSE(dup.is_legal);
  CHECK_FALSE(dup.is_permutation);
  CHECK(dup.reason == "not a permutation");
}

TEST_CASE("waiting rule agrees with the recursive oracle on random prefixes") {
  rng::Stream rs = rng::substream(42, "core-prop");
  for (int trial = 0; trial < 400; ++trial) {
    const Instance inst = oracles::random_instance(8, rs);
    const std::vector<int> prefix = oracles::random_prefix(inst, rs);
    const Schedule sched = propagate(inst, prefix);
    for (std::size_t k = 0; k < prefix.size(); ++k) {
      CHECK(sched.visit_times[k] ==
            doctest::Approx(oracles::visit_time_recursive(inst, prefix, k)).epsilon(1e-12));
    }
    // monotone clocks, nonnegative waits
    for (std::size_t k = 1; k < prefix.size(); ++k) {
      CHECK(sched.visit_times[k] >= sched.visit_times[k - 1]);
      CHECK(sched.waits[k] >= 0.0);
    }
  }
}

TEST_CASE("legality holds exactly when the timeout is zero") {
  rng::Stream rs = rng::substream(43, "core-legal");
  for (int trial = 0; trial < 300; ++trial) {
    const Instance inst = oracles::random_instance(7, rs);
    std::vector<int> order{0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<int> tail(order.begin() + 1, order.end());
    rs.shuffle(tail);
    std::copy(tail.begin(), tail.end(), order.begin() + 1);
    const LegalityReport report = check_legality(inst, Tour{order});
    CHECK(report.is_permutation);
    CHECK(report.is_legal == (report.total_timeout == 0.0));
  }
}

TEST_CASE("scaling every length and window scales the schedule") {
  rng::Stream rs = rng::substream(44, "core-scale");
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = oracles::random_instance(6, rs);
    const double c = rs.uniform(0.2, 5.0);
    Instance scaled = inst;
    for (auto& p : scaled.coords) {
      p.x *= c;
      p.y *= c;
    }
    for (auto& w : scaled.windows) {
      w.start *= c;
      if (!w.end_unconstrained) w.end *= c;
    }
    const std::vector<int> order{0, 1, 2, 3, 4, 5, 6};
    const Schedule base = propagate(inst, order);
    const Schedule big = propagate(scaled, order);
    for (std::size_t k = 0; k < order.size(); ++k) {
      CHECK(big.visit_times[k] == doctest::Approx(c * base.visit_times[k]).epsilon(1e-9));
    }
    CHECK(big.total_length == doctest::Approx(c * base.total_length).epsilon(1e-9));
    CHECK(big.total_timeout == doctest::Approx(c * base.total_timeout).epsilon(1e-9));
  }
}
