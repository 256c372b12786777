#include "tsptw/eval.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tsptw/parallel.hpp"
#include "tsptw/policy.hpp"
#include "tsptw/rng.hpp"

namespace tsptw::eval {

double gap(double length, double expert_length) {
  if (!(expert_length > 0.0)) {
    throw std::invalid_argument("gap: expert length must be positive");
  }
  return length / expert_length - 1.0;
}

double weighted_score(double illegal_pct, double gap_pct, double gamma) {
  return gamma * illegal_pct + (1.0 - gamma) * gap_pct;
}

SolverReport evaluate(const std::vector<datagen::DatasetRecord>& records, const Solver& solver,
                      const std::string& name, int workers) {
  if (records.empty()) throw std::invalid_argument("evaluate: empty corpus");

  SolverReport report;
  report.solver = name;
  report.workers = std::max(1, workers);
  report.rows.resize(records.size());

  parallel_for(records.size(), workers, [&](std::size_t i) {
    const datagen::DatasetRecord& rec = records[i];
    InstanceRow row;
    row.id = rec.id;
    row.labeled = rec.expert_length.has_value();

    const auto start = std::chrono::steady_clock::now();
    const Tour tour = solver(rec);
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                           .count();

    const LegalityReport legality = check_legality(rec.instance, tour);
    row.legal = legality.is_legal;
    row.total_timeout = legality.total_timeout;
    if (legality.is_permutation) row.length = tour_length(rec.instance, tour);
    if (row.legal && row.labeled) row.gap_vs_expert = gap(row.length, *rec.expert_length);
    report.rows[i] = std::move(row);
  });

  std::size_t illegal = 0;
  std::size_t gap_rows = 0;
  double gap_sum = 0.0;
  double timeout_sum = 0.0;
  double wall_sum = 0.0;
  for (const InstanceRow& row : report.rows) {
    if (!row.legal) ++illegal;
    if (row.legal && row.labeled) {
      gap_sum += row.gap_vs_expert;
      ++gap_rows;
    }
    timeout_sum += row.total_timeout;
    wall_sum += row.wall_seconds;
  }
  const double count = static_cast<double>(records.size());
  report.illegal_rate_pct = 100.0 * static_cast<double>(illegal) / count;
  report.mean_gap_pct = gap_rows > 0 ? 100.0 * gap_sum / static_cast<double>(gap_rows) : 0.0;
  report.mean_total_timeout = timeout_sum / count;
  report.seconds_per_1000 = (wall_sum / report.workers) / count * 1000.0;
  return report;
}

namespace {

// gamma * illegal == r * (1 - gamma) * gap  =>  gamma = r g / (i + r g)
double band_boundary(double illegal, double gp, double ratio) {
  if (!(illegal > 0.0) || !(gp > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return ratio * gp / (illegal + ratio * gp);
}

}  // namespace

SweepResult score_sweep(const std::vector<SolverPoint>& points,
                        const std::vector<double>& gammas) {
  SweepResult result;
  for (const SolverPoint& p : points) {
    for (double g : gammas) {
      result.rows.push_back(SweepRow{p.solver, g, weighted_score(p.illegal_pct, p.gap_pct, g)});
    }
    result.bands.push_back(SweepBand{p.solver, band_boundary(p.illegal_pct, p.gap_pct, 0.1),
                                     band_boundary(p.illegal_pct, p.gap_pct, 10.0)});
  }
  return result;
}

SweepResult score_sweep(const std::vector<SolverReport>& reports,
                        const std::vector<double>& gammas) {
  std::vector<SolverPoint> points;
  points.reserve(reports.size());
  for (const SolverReport& r : reports) {
    points.push_back(SolverPoint{r.solver, r.illegal_rate_pct, r.mean_gap_pct});
  }
  return score_sweep(points, gammas);
}

ProbeReport dataset_probe(const std::vector<datagen::DatasetRecord>& labeled,
                          std::size_t screened_out) {
  ProbeReport report;
  const std::size_t attempted = labeled.size() + screened_out;
  report.screened_fraction =
      attempted > 0 ? static_cast<double>(screened_out) / static_cast<double>(attempted) : 0.0;
  report.too_hard = report.screened_fraction > kProbeHardScreenFraction;
  if (labeled.empty()) return report;

  const std::pair<const char*, Tour (*)(const Instance&)> greedies[] = {
      {"greedy-mt", &policy::greedy_mt},
      {"greedy-lt", &policy::greedy_lt},
      {"greedy-es", &policy::greedy_es},
  };
  for (const auto& [name, fn] : greedies) {
    const SolverReport run = evaluate(
        labeled, [fn](const datagen::DatasetRecord& rec) { return fn(rec.instance); }, name);
    report.lines.push_back(ProbeReport::GreedyLine{name, run.illegal_rate_pct, run.mean_gap_pct});
    if (run.illegal_rate_pct <= kProbeEasyPct && run.mean_gap_pct <= kProbeEasyPct) {
      report.too_easy = true;
    }
  }
  return report;
}

std::vector<datagen::DatasetRecord> solution_derived_fixture(int n, std::size_t count,
                                                             std::uint64_t seed,
                                                             double width_factor) {
  if (n < 1 || count < 1) {
    throw std::invalid_argument("solution_derived_fixture: need n >= 1 and count >= 1");
  }
  const double width = width_factor * datagen::expected_tour_constant(n);

  std::vector<datagen::DatasetRecord> records;
  records.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    rng::Stream rs = rng::substream(seed, "solution-derived", idx);
    datagen::DatasetRecord rec;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "solution-derived-s%llu-%06zu",
                  static_cast<unsigned long long>(seed), idx);
    rec.id = buf;

    Instance& inst = rec.instance;
    inst.coords.resize(n + 1);
    inst.windows.assign(n + 1, TimeWindow::unconstrained());
    for (int i = 0; i <= n; ++i) {
      inst.coords[i].x = rs.next_double();
      inst.coords[i].y = rs.next_double();
    }

    // Windows open exactly at the visit times of the nearest-neighbour tour,
    // so that tour stays feasible and nearly forced.
    const Tour nn = policy::greedy_mt(inst);  // unconstrained: plain nearest neighbour
    double t = 0.0;
    for (std::size_t k = 1; k < nn.order.size(); ++k) {
      t += inst.dist(nn.order[k - 1], nn.order[k]);
      inst.windows[nn.order[k]] = TimeWindow{t, t + width, false};
    }

    rec.meta.generator = "solution-derived";
    rec.meta.seed = seed;
    rec.meta.params = {{"n", double(n)}, {"width_factor", width_factor}};
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace tsptw::eval
