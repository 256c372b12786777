#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tsptw/core.hpp"
#include "tsptw/datagen.hpp"

namespace tsptw::eval {

// Relative length excess over the expert tour. Callers filter to legal rows.
double gap(double length, double expert_length);

// S = gamma * illegal + (1 - gamma) * gap, both in percent.
double weighted_score(double illegal_pct, double gap_pct, double gamma);

struct InstanceRow {
  std::string id;
  bool legal = false;
  bool labeled = false;
  double length = 0.0;
  double gap_vs_expert = 0.0;  // meaningful when legal && labeled
  double total_timeout = 0.0;
  double wall_seconds = 0.0;
};

struct SolverReport {
  std::string solver;
  std::vector<InstanceRow> rows;
  double illegal_rate_pct = 0.0;
  double mean_gap_pct = 0.0;        // over legal, labeled rows
  double mean_total_timeout = 0.0;
  double seconds_per_1000 = 0.0;
  int workers = 1;
};

using Solver = std::function<Tour(const datagen::DatasetRecord&)>;

// Runs the solver on every record. The gap aggregate only sees rows that are
// both legal and expert-labeled. Throws on an empty corpus.
SolverReport evaluate(const std::vector<datagen::DatasetRecord>& records, const Solver& solver,
                      const std::string& name, int workers = 1);

struct SolverPoint {
  std::string solver;
  double illegal_pct = 0.0;
  double gap_pct = 0.0;
};

struct SweepRow {
  std::string solver;
  double gamma = 0.0;
  double score = 0.0;
};

// Gamma range where neither objective dwarfs the other: the ratio of the two
// score terms stays within [1/10, 10]. Boundaries are NaN when undefined
// (either metric is zero).
struct SweepBand {
  std::string solver;
  double gamma_lo = 0.0;
  double gamma_hi = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepBand> bands;
};

SweepResult score_sweep(const std::vector<SolverPoint>& points,
                        const std::vector<double>& gammas);
SweepResult score_sweep(const std::vector<SolverReport>& reports,
                        const std::vector<double>& gammas);

// Runs the three greedy rules over a labeled corpus and flags corpora where
// a trivial rule already wins (too easy) or where labeling had to drop most
// instances (too hard).
struct ProbeReport {
  struct GreedyLine {
    std::string name;
    double illegal_pct = 0.0;
    double gap_pct = 0.0;
  };
  std::vector<GreedyLine> lines;
  double screened_fraction = 0.0;
  bool too_easy = false;
  bool too_hard = false;
};

inline constexpr double kProbeEasyPct = 1.0;
inline constexpr double kProbeHardScreenFraction = 0.5;

ProbeReport dataset_probe(const std::vector<datagen::DatasetRecord>& labeled,
                          std::size_t screened_out = 0);

// Corpus whose windows are read off a nearest-neighbour tour's visit times;
// the classic way existing benchmarks accidentally make themselves trivial.
// Kept as the probe's positive fixture.
std::vector<datagen::DatasetRecord> solution_derived_fixture(int n, std::size_t count,
                                                             std::uint64_t seed,
                                                             double width_factor = 0.05);

}  // namespace tsptw::eval
