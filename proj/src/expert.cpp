#include "tsptw/expert.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "tsptw/parallel.hpp"

namespace tsptw::expert {

std::optional<Solution> brute_force_solve(const Instance& inst) {
  const int n = inst.n();
  if (n > kBruteForceMaxN) {
    throw std::invalid_argument("brute_force_solve: instance too large (n > " +
                                std::to_string(kBruteForceMaxN) + ")");
  }
  const double t0 = std::max(0.0, inst.windows[0].start);
  if (inst.windows[0].lateness(t0) > 0.0) return std::nullopt;
  if (n == 0) return Solution{Tour{{0}}, 0.0};

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i + 1;

  bool found = false;
  double best_len = 0.0;
  std::vector<int> best_perm;

  // Lexicographic enumeration plus strict improvement keeps the smallest
  // order among equal-length optima.
  do {
    double t = t0;
    double len = 0.0;
    bool legal = true;
    int prev = 0;
    for (int node : perm) {
      const double edge = inst.dist(prev, node);
      len += edge;
      t = arrival_time(t, edge, inst.windows[node]);
      if (inst.windows[node].lateness(t) > 0.0) {
        legal = false;
        break;
      }
      prev = node;
    }
    if (!legal) continue;
    len += inst.dist(prev, 0);
    if (!found || len < best_len) {
      found = true;
      best_len = len;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (!found) return std::nullopt;
  Tour tour;
  tour.order.reserve(n + 1);
  tour.order.push_back(0);
  tour.order.insert(tour.order.end(), best_perm.begin(), best_perm.end());
  return Solution{std::move(tour), best_len};
}

namespace {

// Sort candidates, then skyline-scan: a label survives only if it arrives
// strictly earlier than every shorter-or-equal one already kept.
void prune_to_frontier(std::vector<ParetoLabel>& labels) {
  std::sort(labels.begin(), labels.end(), [](const ParetoLabel& a, const ParetoLabel& b) {
    if (a.length != b.length) return a.length < b.length;
    if (a.arrival != b.arrival) return a.arrival < b.arrival;
    if (a.prev_last != b.prev_last) return a.prev_last < b.prev_last;
    return a.prev_index < b.prev_index;
  });
  std::size_t kept = 0;
  double min_arrival = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].arrival < min_arrival) {
      min_arrival = labels[i].arrival;
      labels[kept++] = labels[i];
    }
  }
  labels.resize(kept);
}

std::optional<Solution> dp_solve_impl(const Instance& inst, DpTable* table_out, int max_n) {
  const int n = inst.n();
  if (n > max_n) {
    throw std::invalid_argument("dp_solve: instance too large (n > " + std::to_string(max_n) +
                                ")");
  }
  const double t0 = std::max(0.0, inst.windows[0].start);
  if (inst.windows[0].lateness(t0) > 0.0) return std::nullopt;
  if (n == 0) return Solution{Tour{{0}}, 0.0};

  const std::uint32_t full = (1u << n) - 1;
  std::vector<std::vector<ParetoLabel>> frontiers(static_cast<std::size_t>(full + 1) * n);
  auto at = [&frontiers, n](std::uint32_t mask, int last) -> std::vector<ParetoLabel>& {
    return frontiers[static_cast<std::size_t>(mask) * n + (last - 1)];
  };

  auto admissible = [&inst](double from_time, int from, int to, double* arrive) {
    const double edge = inst.dist(from, to);
    const double t = arrival_time(from_time, edge, inst.windows[to]);
    if (inst.windows[to].lateness(t) > 0.0) return false;
    *arrive = t;
    return true;
  };

  for (int v = 1; v <= n; ++v) {
    double arrive;
    if (admissible(t0, 0, v, &arrive)) {
      at(1u << (v - 1), v).push_back(ParetoLabel{inst.dist(0, v), arrive, -1, -1});
    }
  }

  std::vector<ParetoLabel> buffer;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if ((mask & (mask - 1)) == 0) continue;  // single-bit states are seeds
    for (int last = 1; last <= n; ++last) {
      if (!(mask & (1u << (last - 1)))) continue;
      const std::uint32_t prev_mask = mask & ~(1u << (last - 1));
      buffer.clear();
      for (int prev = 1; prev <= n; ++prev) {
        if (!(prev_mask & (1u << (prev - 1)))) continue;
        const auto& src = at(prev_mask, prev);
        const double edge = inst.dist(prev, last);
        for (std::size_t li = 0; li < src.size(); ++li) {
          const double t = arrival_time(src[li].arrival, edge, inst.windows[last]);
          if (inst.windows[last].lateness(t) > 0.0) continue;
          buffer.push_back(ParetoLabel{src[li].length + edge, t, static_cast<std::int16_t>(prev),
                                       static_cast<std::int32_t>(li)});
        }
      }
      prune_to_frontier(buffer);
      at(mask, last) = buffer;
    }
  }

  bool found = false;
  double best_total = 0.0;
  int best_last = -1;
  std::int32_t best_index = -1;
  for (int last = 1; last <= n; ++last) {
    const auto& labels = at(full, last);
    for (std::size_t li = 0; li < labels.size(); ++li) {
      const double total = labels[li].length + inst.dist(last, 0);
      if (!found || total < best_total) {
        found = true;
        best_total = total;
        best_last = last;
        best_index = static_cast<std::int32_t>(li);
      }
    }
  }
  if (!found) {
    if (table_out) *table_out = DpTable{n, std::move(frontiers)};
    return std::nullopt;
  }

  std::vector<int> reversed;
  std::uint32_t mask = full;
  int last = best_last;
  std::int32_t index = best_index;
  while (last != -1) {
    reversed.push_back(last);
    const ParetoLabel& label = at(mask, last)[index];
    mask &= ~(1u << (last - 1));
    index = label.prev_index;
    last = label.prev_last;
  }

  Tour tour;
  tour.order.reserve(n + 1);
  tour.order.push_back(0);
  tour.order.insert(tour.order.end(), reversed.rbegin(), reversed.rend());
  if (table_out) *table_out = DpTable{n, std::move(frontiers)};
  return Solution{std::move(tour), best_total};
}

}  // namespace

std::optional<Solution> dp_solve(const Instance& inst, int max_n) {
  return dp_solve_impl(inst, nullptr, max_n);
}

std::optional<Solution> dp_solve_traced(const Instance& inst, DpTable* table, int max_n) {
  return dp_solve_impl(inst, table, max_n);
}

LabelResult label_dataset(std::vector<datagen::DatasetRecord> records, SolverChoice choice,
                          int max_n, int workers) {
  std::vector<std::optional<Solution>> solved(records.size());
  parallel_for(records.size(), workers, [&](std::size_t i) {
    solved[i] = (choice == SolverChoice::kBruteForce) ? brute_force_solve(records[i].instance)
                                                      : dp_solve(records[i].instance, max_n);
  });

  LabelResult result;
  result.records.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!solved[i]) {
      ++result.screened_out;
      continue;
    }
    records[i].expert_tour = solved[i]->tour;
    records[i].expert_length = solved[i]->length;
    result.records.push_back(std::move(records[i]));
  }
  return result;
}

ImportResult import_external_solutions(std::vector<datagen::DatasetRecord> records,
                                       const std::string& solution_path) {
  std::ifstream in(solution_path);
  if (!in) throw std::invalid_argument("import: cannot open " + solution_path);

  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < records.size(); ++i) by_id[records[i].id] = i;

  ImportResult result;
  std::vector<char> has_import(records.size(), 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id;
    row >> id;
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      result.diagnostics.push_back("line " + std::to_string(line_no) + ": unknown id " + id);
      ++result.rejected;
      continue;
    }
    Tour tour;
    int node;
    while (row >> node) tour.order.push_back(node);
    if (row.fail() && !row.eof()) {
      result.diagnostics.push_back("line " + std::to_string(line_no) + ": malformed row");
      ++result.rejected;
      continue;
    }
    datagen::DatasetRecord& rec = records[it->second];
    const LegalityReport report = check_legality(rec.instance, tour);
    if (!report.is_legal) {
      result.diagnostics.push_back("line " + std::to_string(line_no) + ": id " + id +
                                   " rejected (" + report.reason + ")");
      ++result.rejected;
      continue;
    }
    if (has_import[it->second]) {
      result.diagnostics.push_back("line " + std::to_string(line_no) + ": duplicate id " + id +
                                   ", keeping the later row");
    } else {
      has_import[it->second] = 1;
      ++result.attached;
    }
    rec.expert_length = tour_length(rec.instance, tour);
    rec.expert_tour = std::move(tour);
  }
  result.records = std::move(records);
  return result;
}

}  // namespace tsptw::expert
