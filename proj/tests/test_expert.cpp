#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "support/oracles.hpp"
#include "tsptw/datagen.hpp"
#include "tsptw/expert.hpp"

using namespace tsptw;
using namespace tsptw::expert;

namespace {

Instance square_with_forced_corner() {
  Instance inst;
  inst.coords = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  inst.windows.assign(4, TimeWindow::unconstrained());
  inst.windows[3] = {0.0, 1.5, false};  // corner (1,0) must come first
  return inst;
}

}  // namespace

TEST_CASE("brute force on hand instances") {
  Instance square;
  square.coords = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  square.windows.assign(4, TimeWindow::unconstrained());
  const auto free_square = brute_force_solve(square);
  REQUIRE(free_square.has_value());
  CHECK(free_square->length == doctest::Approx(4.0));
  CHECK(free_square->tour.order == std::vector<int>{0, 1, 2, 3});  // lexicographic tie-break

  const auto forced = brute_force_solve(square_with_forced_corner());
  REQUIRE(forced.has_value());
  CHECK(forced->tour.order == std::vector<int>{0, 3, 2, 1});
  CHECK(forced->length == doctest::Approx(4.0));

  Instance impossible;
  impossible.coords = {{0, 0}, {0, 1}};
  impossible.windows = {TimeWindow::unconstrained(), {0.0, 0.1, false}};
  CHECK_FALSE(brute_force_solve(impossible).has_value());

  Instance huge;
  huge.coords.assign(13, Point{});
  huge.windows.assign(13, TimeWindow::unconstrained());
  CHECK_THROWS_AS(brute_force_solve(huge), std::invalid_argument);
}

TEST_CASE("dp agrees with brute force on random mediums") {
  const auto records = datagen::gen_medium(datagen::MediumParams::for_n(8), 30, 123);
  int feasible = 0;
  for (const auto& rec : records) {
    const auto bf = brute_force_solve(rec.instance);
    const auto dp = dp_solve(rec.instance);
    REQUIRE(bf.has_value() == dp.has_value());
    if (bf) {
      ++feasible;
      CHECK(dp->length == bf->length);  // identical arithmetic, exact match
      CHECK(check_legality(rec.instance, dp->tour).is_legal);
      CHECK(tour_length(rec.instance, dp->tour) == dp->length);
    }
  }
  CHECK(feasible > 0);
}

TEST_CASE("dp without windows reduces to plain shortest tour") {
  const auto records = datagen::gen_unconstrained(9, 20, 321);
  for (const auto& rec : records) {
    const auto dp = dp_solve(rec.instance);
    const auto hk = oracles::held_karp_length(rec.instance);
    REQUIRE(dp.has_value());
    REQUIRE(hk.has_value());
    CHECK(dp->length == doctest::Approx(*hk).epsilon(1e-12));
  }
}

TEST_CASE("dp frontiers carry no dominated label") {
  const auto records = datagen::gen_medium(datagen::MediumParams::for_n(8), 20, 55);
  for (const auto& rec : records) {
    DpTable table;
    dp_solve_traced(rec.instance, &table);
    for (const auto& frontier : table.frontiers) {
      for (std::size_t a = 0; a < frontier.size(); ++a) {
        // sorted by length ascending, arrival strictly descending
        if (a + 1 < frontier.size()) {
          CHECK(frontier[a].length < frontier[a + 1].length);
          CHECK(frontier[a].arrival > frontier[a + 1].arrival);
        }
        for (std::size_t b = 0; b < frontier.size(); ++b) {
          if (a == b) continue;
          const bool dominates = frontier[a].length <= frontier[b].length &&
                                 frontier[a].arrival <= frontier[b].arrival;
          CHECK_FALSE(dominates);
        }
      }
    }
  }
}

TEST_CASE("labeling screens infeasible instances") {
  auto records = datagen::gen_unconstrained(6, 10, 77);
  // poison one instance with an unreachable deadline
  records[3].instance.windows[2] = {0.0, 1e-6, false};
  records[3].instance.coords[2] = {0.9, 0.9};
  records[3].instance.coords[0] = {0.0, 0.0};

  const LabelResult result = label_dataset(records, SolverChoice::kDp);
  CHECK(result.screened_out == 1);
  CHECK(result.records.size() == 9);
  for (const auto& rec : result.records) {
    REQUIRE(rec.expert_tour.has_value());
    REQUIRE(rec.expert_length.has_value());
    CHECK(check_legality(rec.instance, *rec.expert_tour).is_legal);
    CHECK(tour_length(rec.instance, *rec.expert_tour) == *rec.expert_length);
  }

  // relabeling is idempotent
  const LabelResult again = label_dataset(result.records, SolverChoice::kDp);
  CHECK(again.screened_out == 0);
  REQUIRE(again.records.size() == result.records.size());
  for (std::size_t i = 0; i < again.records.size(); ++i) {
    CHECK(again.records[i].expert_length == result.records[i].expert_length);
    CHECK(again.records[i].expert_tour->order == result.records[i].expert_tour->order);
  }
}

TEST_CASE("labeling matches between serial and parallel runs") {
  auto records = datagen::gen_medium(datagen::MediumParams::for_n(8), 16, 88);
  const LabelResult serial = label_dataset(records, SolverChoice::kDp, kDpDefaultMaxN, 1);
  const LabelResult parallel = label_dataset(records, SolverChoice::kDp, kDpDefaultMaxN, 4);
  REQUIRE(serial.records.size() == parallel.records.size());
  CHECK(serial.screened_out == parallel.screened_out);
  for (std::size_t i = 0; i < serial.records.size(); ++i) {
    CHECK(serial.records[i].expert_tour->order == parallel.records[i].expert_tour->order);
    CHECK(*serial.records[i].expert_length == *parallel.records[i].expert_length);
  }
}

TEST_CASE("external solutions are checked before attaching") {
  auto records = datagen::gen_unconstrained(4, 3, 99);
  const auto solved0 = dp_solve(records[0].instance);
  REQUIRE(solved0.has_value());

  const std::string path = "import_test.sol";
  {
    std::ofstream out(path);
    out << records[0].id;
    for (int v : solved0->tour.order) out << ' ' << v;
    out << "\n";
    out << records[1].id << " 0 2 1 3 4\n";   // legal (unconstrained)
    out << records[1].id << " 0 1 2 3 4\n";   // duplicate, should win
    out << records[2].id << " 0 1 1 2 3\n";   // not a permutation
    out << "nonsense-id 0 1 2 3 4\n";
  }

  const ImportResult result = import_external_solutions(records, path);
  CHECK(result.attached == 2);
  CHECK(result.rejected == 2);
  REQUIRE(result.records[0].expert_tour.has_value());
  CHECK(result.records[1].expert_tour->order == std::vector<int>{0, 1, 2, 3, 4});
  CHECK_FALSE(result.records[2].expert_tour.has_value());
  CHECK(result.diagnostics.size() == 3);  // duplicate note + 2 rejections

  std::remove(path.c_str());
}

TEST_CASE("illegal external tours are rejected") {
  auto records = datagen::gen_unconstrained(3, 1, 100);
  records[0].instance.windows[2] = {0.0, 1e-9, false};
  records[0].instance.coords[2] = {0.9, 0.9};
  records[0].instance.coords[0] = {0.0, 0.0};

  const std::string path = "import_illegal.sol";
  {
    std::ofstream out(path);
    out << records[0].id << " 0 1 2 3\n";
  }
  const ImportResult result = import_external_solutions(records, path);
  CHECK(result.attached == 0);
  CHECK(result.rejected == 1);
  CHECK_FALSE(result.records[0].expert_tour.has_value());
  std::remove(path.c_str());
}
