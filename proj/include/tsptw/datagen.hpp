#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsptw/core.hpp"
#include "tsptw/rng.hpp"

namespace tsptw::datagen {

// Mean distance between two uniform points in the unit square.
inline constexpr double kUnitSquareMeanDistance = 0.5214;

// Expected length of a random tour over n+1 uniform unit-square points; the
// scale every window sampler works at.
double expected_tour_constant(int n);

struct MediumParams {
  int n = 20;
  double alpha = 0.5;
  double beta = 0.75;
  double t_n = 0.0;  // <= 0 means expected_tour_constant(n)

  double scale() const { return t_n > 0.0 ? t_n : expected_tour_constant(n); }
  static MediumParams for_n(int n);
};

struct HardParams {
  int n = 20;
  double group_fraction = 0.3;
  // Window sampling inside groups follows the Medium rule with these factors.
  double alpha = 0.5;
  double beta = 0.75;
  double t_n = 0.0;

  double scale() const { return t_n > 0.0 ? t_n : expected_tour_constant(n); }
  int regrouped_count() const { return static_cast<int>(group_fraction * n); }
};

struct GroupInfo {
  double shift = 0.0;
  std::vector<int> members;
};

struct RecordMeta {
  std::string generator;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
  std::vector<GroupInfo> groups;
};

struct DatasetRecord {
  std::string id;
  Instance instance;
  std::optional<Tour> expert_tour;
  std::optional<double> expert_length;
  RecordMeta meta;
};

std::vector<DatasetRecord> gen_medium(const MediumParams& params, std::size_t count,
                                      std::uint64_t seed);

// Four-step construction: Medium windows, regroup floor(0.3 n) nodes into k_p
// groups, resample each group at its own scale, shift each group by a random
// offset. Group membership and shifts are kept in the record metadata.
std::vector<DatasetRecord> gen_hard_train(const HardParams& params, std::size_t count,
                                          std::uint64_t seed);

// Same structure with constant windows: [0, T_n] outside groups and
// [t_p, t_p + T_{n_p}] inside them.
std::vector<DatasetRecord> gen_hard_eval(const HardParams& params, std::size_t count,
                                         std::uint64_t seed);

// Medium sampling with every start forced to 0.
std::vector<DatasetRecord> gen_weak_no_start(int n, std::size_t count, std::uint64_t seed);

// Both window sides disabled; plain TSP instances.
std::vector<DatasetRecord> gen_unconstrained(int n, std::size_t count, std::uint64_t seed);

// All nodes split into groups whose windows are stacked so that consecutive
// groups never overlap in time. group_count 0 picks the Hard rule.
std::vector<DatasetRecord> gen_grouped_medium(int n, std::size_t count, std::uint64_t seed,
                                              int group_count = 0);

struct MixRatio {
  int medium = 1;
  int hard = 1;
  int supplement = 3;
};

// Takes records in ratio medium:hard:supplement and shuffles the result
// deterministically. Unit size is the largest that every nonzero part can
// serve.
std::vector<DatasetRecord> mix_training_corpus(const std::vector<DatasetRecord>& medium,
                                               const std::vector<DatasetRecord>& hard,
                                               const std::vector<DatasetRecord>& supplement,
                                               const MixRatio& ratio, std::uint64_t seed);

}  // namespace tsptw::datagen
