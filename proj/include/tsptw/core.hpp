#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace tsptw {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// A window with end_unconstrained set has no deadline; `end` is then
// meaningless for legality and encoded as 0 by the feature layer.
struct TimeWindow {
  double start = 0.0;
  double end = 0.0;
  bool end_unconstrained = false;

  static TimeWindow unconstrained() { return TimeWindow{0.0, 0.0, true}; }

  double lateness(double t) const {
    return end_unconstrained ? 0.0 : std::max(0.0, t - end);
  }
};

// Node 0 is the depot. Generated instances keep coordinates in the unit
// square; imported ones may not.
struct Instance {
  std::vector<Point> coords;
  std::vector<TimeWindow> windows;

  int n() const { return static_cast<int>(coords.size()) - 1; }
  int node_count() const { return static_cast<int>(coords.size()); }

  double dist(int i, int j) const { return distance(coords[i], coords[j]); }

  // Throws std::invalid_argument on structural problems (size mismatch,
  // missing depot, inverted window, negative start).
  void validate() const;
};

struct Tour {
  std::vector<int> order;  // order[0] == 0 for well-formed tours
};

// Visit times for a (possibly partial) route. total_length includes the
// return edge only when produced by tour_schedule.
struct Schedule {
  std::vector<double> visit_times;
  std::vector<double> waits;
  std::vector<double> lateness;
  double total_length = 0.0;
  double total_timeout = 0.0;
};

// Waiting rule: arriving before the window opens means waiting until it does.
inline double arrival_time(double t_prev, double edge_len, const TimeWindow& w) {
  return std::max(t_prev + edge_len, w.start);
}

// Propagates visit times along a prefix that starts at the depot. Lateness is
// recorded but never stops propagation. Throws on malformed prefixes
// (empty, not starting at 0, out-of-range or repeated nodes).
Schedule propagate(const Instance& inst, const std::vector<int>& prefix);

// Full-tour schedule; adds the return edge to total_length. The return to the
// depot carries no time constraint.
Schedule tour_schedule(const Instance& inst, const Tour& tour);

// Length of the closed tour, return edge included. Requires a permutation.
double tour_length(const Instance& inst, const Tour& tour);

bool is_permutation_from_depot(const Instance& inst, const Tour& tour);

// All failure modes are encoded in the report; never throws.
struct LegalityReport {
  bool is_legal = false;
  bool is_permutation = false;
  std::string reason;
  std::vector<double> lateness;
  double total_timeout = 0.0;
};

LegalityReport check_legality(const Instance& inst, const Tour& tour);

}  // namespace tsptw
