#include "tsptw/io.hpp"

#include <fstream>
#include <stdexcept>

namespace tsptw::io {

using nlohmann::json;

json record_to_json(const datagen::DatasetRecord& record) {
  json j;
  j["id"] = record.id;
  j["n"] = record.instance.n();
  json coords = json::array();
  for (const Point& p : record.instance.coords) coords.push_back({p.x, p.y});
  j["coords"] = std::move(coords);
  json tw = json::array();
  for (const TimeWindow& w : record.instance.windows) {
    tw.push_back({w.start, w.end, w.end_unconstrained});
  }
  j["tw"] = std::move(tw);

  json meta;
  meta["generator"] = record.meta.generator;
  meta["seed"] = record.meta.seed;
  meta["params"] = record.meta.params;
  if (!record.meta.groups.empty()) {
    json groups = json::array();
    for (const datagen::GroupInfo& g : record.meta.groups) {
      groups.push_back({{"shift", g.shift}, {"members", g.members}});
    }
    meta["groups"] = std::move(groups);
  }
  j["meta"] = std::move(meta);

  if (record.expert_tour) j["expert_tour"] = record.expert_tour->order;
  if (record.expert_length) j["expert_length"] = *record.expert_length;
  return j;
}

datagen::DatasetRecord record_from_json(const json& j) {
  datagen::DatasetRecord record;
  record.id = j.at("id").get<std::string>();
  const int n = j.at("n").get<int>();

  for (const json& c : j.at("coords")) {
    record.instance.coords.push_back(Point{c.at(0).get<double>(), c.at(1).get<double>()});
  }
  for (const json& w : j.at("tw")) {
    TimeWindow window;
    window.start = w.at(0).get<double>();
    window.end = w.at(1).get<double>();
    if (w.size() > 2) window.end_unconstrained = w.at(2).get<bool>();
    record.instance.windows.push_back(window);
  }
  if (record.instance.n() != n) {
    throw std::invalid_argument("record " + record.id + ": n does not match coords");
  }
  record.instance.validate();

  if (j.contains("meta")) {
    const json& meta = j.at("meta");
    record.meta.generator = meta.value("generator", std::string());
    record.meta.seed = meta.value("seed", std::uint64_t{0});
    if (meta.contains("params")) {
      record.meta.params = meta.at("params").get<std::map<std::string, double>>();
    }
    if (meta.contains("groups")) {
      for (const json& g : meta.at("groups")) {
        datagen::GroupInfo info;
        info.shift = g.at("shift").get<double>();
        info.members = g.at("members").get<std::vector<int>>();
        record.meta.groups.push_back(std::move(info));
      }
    }
  }

  if (j.contains("expert_tour")) {
    Tour tour;
    tour.order = j.at("expert_tour").get<std::vector<int>>();
    record.expert_tour = std::move(tour);
  }
  if (j.contains("expert_length")) record.expert_length = j.at("expert_length").get<double>();
  if (record.expert_tour.has_value() != record.expert_length.has_value()) {
    throw std::invalid_argument("record " + record.id +
                                ": expert tour and length must come together");
  }
  return record;
}

void write_records(const std::string& path, const std::vector<datagen::DatasetRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const datagen::DatasetRecord& rec : records) {
    out << record_to_json(rec).dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<datagen::DatasetRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<datagen::DatasetRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

namespace {

json scorer_to_json(const policy::ScorerParams& params) {
  return json{{"input_dim", params.shape.input_dim},
              {"hidden", params.shape.hidden},
              {"values", params.values}};
}

policy::ScorerParams scorer_from_json(const json& j) {
  policy::ScorerParams params;
  params.shape.input_dim = j.at("input_dim").get<int>();
  params.shape.hidden = j.at("hidden").get<std::vector<int>>();
  params.values = j.at("values").get<std::vector<double>>();
  if (params.values.size() != params.shape.parameter_count()) {
    throw std::invalid_argument("checkpoint: weight count does not match shape");
  }
  return params;
}

}  // namespace

void save_policy(const std::string& path, const policy::Policy& pol,
                 const json& train_config) {
  pol.validate();
  json j;
  j["format_version"] = kCheckpointVersion;
  j["level"] = features::level_name(pol.level);
  j["top_k"] = pol.top_k;
  j["lookahead_steps"] = pol.lookahead_steps;
  j["seed"] = pol.seed;
  j["scorer"] = scorer_to_json(pol.scorer);
  if (pol.osla_helper) j["osla_helper"] = scorer_to_json(*pol.osla_helper);
  j["train_config"] = train_config;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

policy::Policy load_policy(const std::string& path, json* train_config) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  in >> j;
  if (j.at("format_version").get<int>() != kCheckpointVersion) {
    throw std::invalid_argument("checkpoint: unsupported format version");
  }

  policy::Policy pol;
  const auto level = features::parse_level(j.at("level").get<std::string>());
  if (!level) throw std::invalid_argument("checkpoint: unknown feature level");
  pol.level = *level;
  pol.top_k = j.value("top_k", 5);
  pol.lookahead_steps = j.value("lookahead_steps", 1);
  pol.seed = j.value("seed", std::uint64_t{0});
  pol.scorer = scorer_from_json(j.at("scorer"));
  if (j.contains("osla_helper")) pol.osla_helper = scorer_from_json(j.at("osla_helper"));
  pol.validate();
  if (train_config && j.contains("train_config")) *train_config = j.at("train_config");
  return pol;
}

void write_loss_csv(const std::string& path, const std::vector<double>& epoch_loss) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < epoch_loss.size(); ++i) {
    out << i << ',' << json(epoch_loss[i]).dump() << '\n';
  }
}

void write_report_csv(const std::string& path_prefix,
                      const std::vector<eval::SolverReport>& reports,
                      const std::string& config_line) {
  {
    std::ofstream out(path_prefix + "_aggregate.csv");
    if (!out) throw std::runtime_error("cannot write aggregate csv");
    out << "# " << config_line << '\n';
    out << "solver,illegal_rate_pct,mean_gap_pct,mean_total_timeout,seconds_per_1000\n";
    for (const eval::SolverReport& r : reports) {
      out << r.solver << ',' << json(r.illegal_rate_pct).dump() << ','
          << json(r.mean_gap_pct).dump() << ',' << json(r.mean_total_timeout).dump() << ','
          << json(r.seconds_per_1000).dump() << '\n';
    }
  }
  {
    std::ofstream out(path_prefix + "_instances.csv");
    if (!out) throw std::runtime_error("cannot write instance csv");
    out << "# " << config_line << '\n';
    out << "solver,id,legal,length,gap_vs_expert,total_timeout,wall_seconds\n";
    for (const eval::SolverReport& r : reports) {
      for (const eval::InstanceRow& row : r.rows) {
        out << r.solver << ',' << row.id << ',' << (row.legal ? 1 : 0) << ','
            << json(row.length).dump() << ','
            << ((row.legal && row.labeled) ? json(row.gap_vs_expert).dump() : "")
            << ',' << json(row.total_timeout).dump() << ',' << json(row.wall_seconds).dump()
            << '\n';
      }
    }
  }
}

void write_report_json(const std::string& path, const std::vector<eval::SolverReport>& reports,
                       const json& config) {
  json j;
  j["config"] = config;
  json solvers = json::array();
  for (const eval::SolverReport& r : reports) {
    solvers.push_back({{"solver", r.solver},
                       {"illegal_rate_pct", r.illegal_rate_pct},
                       {"mean_gap_pct", r.mean_gap_pct},
                       {"mean_total_timeout", r.mean_total_timeout},
                       {"seconds_per_1000", r.seconds_per_1000},
                       {"instances", r.rows.size()}});
  }
  j["solvers"] = std::move(solvers);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::vector<eval::SolverPoint> read_report_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  in >> j;
  std::vector<eval::SolverPoint> points;
  for (const json& s : j.at("solvers")) {
    points.push_back(eval::SolverPoint{s.at("solver").get<std::string>(),
                                       s.at("illegal_rate_pct").get<double>(),
                                       s.at("mean_gap_pct").get<double>()});
  }
  return points;
}

void write_sweep_csv(const std::string& path, const eval::SweepResult& sweep,
                     const std::string& config_line) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# " << config_line << '\n';
  for (const eval::SweepBand& b : sweep.bands) {
    out << "# band," << b.solver << ',' << json(b.gamma_lo).dump() << ','
        << json(b.gamma_hi).dump() << '\n';
  }
  out << "solver,gamma,score\n";
  for (const eval::SweepRow& row : sweep.rows) {
    out << row.solver << ',' << json(row.gamma).dump() << ',' << json(row.score).dump() << '\n';
  }
}

}  // namespace tsptw::io
