#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsptw/core.hpp"
#include "tsptw/datagen.hpp"

namespace tsptw::expert {

inline constexpr int kBruteForceMaxN = 10;
inline constexpr int kDpDefaultMaxN = 18;

struct Solution {
  Tour tour;
  double length = 0.0;
};

// Exhaustive search over all permutations. Returns the legal minimum-length
// tour, ties broken by lexicographically smallest order; absent when no legal
// tour exists. Refuses n > kBruteForceMaxN.
std::optional<Solution> brute_force_solve(const Instance& inst);

// One non-dominated (length, arrival) pair of a DP state. Shorter tours can
// arrive later, so a single criterion loses optimal continuations; the
// frontier keeps every trade-off that might still win.
struct ParetoLabel {
  double length = 0.0;
  double arrival = 0.0;
  std::int16_t prev_last = -1;  // previous endpoint, -1 for first moves
  std::int32_t prev_index = -1; // label position in the predecessor frontier
};

// Exact set DP over (visited subset, last node) with Pareto (length, arrival)
// frontiers. Matches brute force wherever both run. Refuses n > max_n.
std::optional<Solution> dp_solve(const Instance& inst, int max_n = kDpDefaultMaxN);

// Same solve but hands back the final label table for inspection. Frontier of
// state (mask, last) sits at frontiers[mask * n + last - 1], masks over
// non-depot nodes with bit i-1 for node i.
struct DpTable {
  int n = 0;
  std::vector<std::vector<ParetoLabel>> frontiers;
};
std::optional<Solution> dp_solve_traced(const Instance& inst, DpTable* table,
                                        int max_n = kDpDefaultMaxN);

enum class SolverChoice { kDp, kBruteForce };

// Attaches expert tours; infeasible instances are screened out of the corpus.
struct LabelResult {
  std::vector<datagen::DatasetRecord> records;
  std::size_t screened_out = 0;
};
LabelResult label_dataset(std::vector<datagen::DatasetRecord> records, SolverChoice choice,
                          int max_n = kDpDefaultMaxN, int workers = 1);

// Reads rows of the form `<id> <space-separated permutation>` and attaches the
// tours that pass the legality check. Duplicate ids: last row wins.
struct ImportResult {
  std::vector<datagen::DatasetRecord> records;
  std::vector<std::string> diagnostics;
  std::size_t attached = 0;
  std::size_t rejected = 0;
};
ImportResult import_external_solutions(std::vector<datagen::DatasetRecord> records,
                                       const std::string& solution_path);

}  // namespace tsptw::expert
