#include "tsptw/core.hpp"

#include <stdexcept>

namespace tsptw {

void Instance::validate() const {
  if (coords.empty() || coords.size() != windows.size()) {
    throw std::invalid_argument("instance: coords/windows size mismatch or empty");
  }
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i].x) || !std::isfinite(coords[i].y)) {
      throw std::invalid_argument("instance: non-finite coordinate at node " + std::to_string(i));
    }
    const TimeWindow& w = windows[i];
    if (w.start < 0.0 || !std::isfinite(w.start)) {
      throw std::invalid_argument("instance: negative or non-finite window start at node " +
                                  std::to_string(i));
    }
    if (!w.end_unconstrained && (w.end < w.start || !std::isfinite(w.end))) {
      throw std::invalid_argument("instance: window ends before it starts at node " +
                                  std::to_string(i));
    }
  }
}

Schedule propagate(const Instance& inst, const std::vector<int>& prefix) {
  if (prefix.empty()) throw std::invalid_argument("propagate: empty prefix");
  if (prefix[0] != 0) throw std::invalid_argument("propagate: prefix must start at the depot");

  std::vector<char> seen(inst.node_count(), 0);
  Schedule sched;
  sched.visit_times.reserve(prefix.size());
  sched.waits.reserve(prefix.size());
  sched.lateness.reserve(prefix.size());

  double t = 0.0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const int node = prefix[i];
    if (node < 0 || node >= inst.node_count()) {
      throw std::invalid_argument("propagate: node out of range");
    }
    if (seen[node]) throw std::invalid_argument("propagate: repeated node in prefix");
    seen[node] = 1;

    double wait = 0.0;
    if (i == 0) {
      t = std::max(0.0, inst.windows[0].start);
      wait = t;
    } else {
      const double edge = inst.dist(prefix[i - 1], node);
      const double arrive = arrival_time(t, edge, inst.windows[node]);
      wait = arrive - (t + edge);
      sched.total_length += edge;
      t = arrive;
    }
    const double late = inst.windows[node].lateness(t);
    sched.visit_times.push_back(t);
    sched.waits.push_back(wait);
    sched.lateness.push_back(late);
    sched.total_timeout += late;
  }
  return sched;
}

Schedule tour_schedule(const Instance& inst, const Tour& tour) {
  Schedule sched = propagate(inst, tour.order);
  if (tour.order.size() != static_cast<std::size_t>(inst.node_count())) {
    throw std::invalid_argument("tour_schedule: tour does not cover all nodes");
  }
  sched.total_length += inst.dist(tour.order.back(), 0);
  return sched;
}

bool is_permutation_from_depot(const Instance& inst, const Tour& tour) {
  if (tour.order.size() != static_cast<std::size_t>(inst.node_count())) return false;
  if (tour.order.empty() || tour.order[0] != 0) return false;
  std::vector<char> seen(inst.node_count(), 0);
  for (int node : tour.order) {
    if (node < 0 || node >= inst.node_count() || seen[node]) return false;
    seen[node] = 1;
  }
  return true;
}

double tour_length(const Instance& inst, const Tour& tour) {
  if (!is_permutation_from_depot(inst, tour)) {
    throw std::invalid_argument("tour_length: not a permutation starting at the depot");
  }
  double len = 0.0;
  for (std::size_t i = 1; i < tour.order.size(); ++i) {
    len += inst.dist(tour.order[i - 1], tour.order[i]);
  }
  len += inst.dist(tour.order.back(), 0);
  return len;
}

LegalityReport check_legality(const Instance& inst, const Tour& tour) {
  LegalityReport report;
  if (!is_permutation_from_depot(inst, tour)) {
    report.is_permutation = false;
    report.is_legal = false;
    report.reason = "not a permutation";
    return report;
  }
  report.is_permutation = true;
  Schedule sched = tour_schedule(inst, tour);
  report.lateness = std::move(sched.lateness);
  report.total_timeout = sched.total_timeout;
  report.is_legal = report.total_timeout == 0.0;
  if (!report.is_legal) report.reason = "deadline violated";
  return report;
}

}  // namespace tsptw
