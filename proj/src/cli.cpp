#include "tsptw/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsptw/datagen.hpp"
#include "tsptw/eval.hpp"
#include "tsptw/expert.hpp"
#include "tsptw/features.hpp"
#include "tsptw/io.hpp"
#include "tsptw/policy.hpp"

namespace tsptw::cli {

namespace {

using nlohmann::json;

// Optional JSON config file; keys mirror long flag names. Flags given on the
// command line win. Unknown keys are rejected.
class ConfigOverlay {
 public:
  void load(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    try {
      in >> config_;
    } catch (const json::exception& e) {
      throw CLI::ValidationError("--config", e.what());
    }
    if (!config_.is_object()) throw CLI::ValidationError("--config", "must be a JSON object");
  }

  template <typename T>
  void apply(const char* key, T& target, const CLI::Option* opt) {
    known_.insert(key);
    if (!config_.contains(key)) return;
    if (opt && opt->count() > 0) return;  // explicit flag wins
    try {
      target = config_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw CLI::ValidationError(std::string("config key '") + key + "'", e.what());
    }
  }

  void finish() const {
    for (auto it = config_.begin(); it != config_.end(); ++it) {
      if (!known_.contains(it.key())) {
        throw CLI::ValidationError("config", "unknown key '" + it.key() + "'");
      }
    }
  }

 private:
  json config_;
  std::set<std::string> known_;
};

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(std::stoi(part));
    } catch (...) {
      throw CLI::ValidationError(what, "expected a comma-separated integer list");
    }
  }
  if (out.empty()) throw CLI::ValidationError(what, "empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(std::stod(part));
    } catch (...) {
      throw CLI::ValidationError(what, "expected a comma-separated number list");
    }
  }
  if (out.empty()) throw CLI::ValidationError(what, "empty list");
  return out;
}

// "0:1:0.05" (lo:hi:step) or a plain comma list.
std::vector<double> parse_gamma_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_double_list(text, "--gammas");
  std::stringstream ss(text);
  std::string part;
  std::vector<double> bounds;
  while (std::getline(ss, part, ':')) bounds.push_back(std::stod(part));
  if (bounds.size() != 3 || bounds[2] <= 0.0 || bounds[1] < bounds[0]) {
    throw CLI::ValidationError("--gammas", "expected lo:hi:step with step > 0");
  }
  std::vector<double> grid;
  const long steps = std::lround((bounds[1] - bounds[0]) / bounds[2]);
  for (long i = 0; i <= steps; ++i) grid.push_back(bounds[0] + bounds[2] * i);
  return grid;
}

std::vector<datagen::DatasetRecord> load_labeled(const std::string& path) {
  std::vector<datagen::DatasetRecord> records = io::read_records(path);
  for (const auto& rec : records) {
    if (!rec.expert_tour) {
      throw CLI::ValidationError("--data", "record " + rec.id +
                                               " has no expert tour; label the dataset first");
    }
  }
  return records;
}

// ---- gen ------------------------------------------------------------------

int cmd_gen(const std::string& kind, int n, std::size_t count, std::uint64_t seed, double alpha,
            double beta, double tn, double group_fraction, int kp, const std::string& out) {
  std::vector<datagen::DatasetRecord> records;
  if (kind == "medium") {
    datagen::MediumParams params{n, alpha, beta, tn};
    records = datagen::gen_medium(params, count, seed);
  } else if (kind == "hard-train" || kind == "hard-eval") {
    datagen::HardParams params;
    params.n = n;
    params.alpha = alpha;
    params.beta = beta;
    params.t_n = tn;
    params.group_fraction = group_fraction;
    records = (kind == "hard-train") ? datagen::gen_hard_train(params, count, seed)
                                     : datagen::gen_hard_eval(params, count, seed);
  } else if (kind == "weak-nostart") {
    records = datagen::gen_weak_no_start(n, count, seed);
  } else if (kind == "unconstrained") {
    records = datagen::gen_unconstrained(n, count, seed);
  } else if (kind == "grouped-medium") {
    records = datagen::gen_grouped_medium(n, count, seed, kp);
  } else {
    throw CLI::ValidationError("--kind", "unknown generator '" + kind + "'");
  }
  io::write_records(out, records);
  std::cout << "wrote " << records.size() << " records to " << out << "\n";
  return 0;
}

// ---- mix ------------------------------------------------------------------

int cmd_mix(const std::string& medium, const std::string& hard,
            const std::vector<std::string>& supplements, const std::string& ratio_text,
            std::uint64_t seed, const std::string& out) {
  const std::vector<int> ratio_parts = parse_int_list(ratio_text, "--ratio");
  if (ratio_parts.size() != 3) {
    throw CLI::ValidationError("--ratio", "expected medium:hard:supplement as three numbers");
  }
  datagen::MixRatio ratio{ratio_parts[0], ratio_parts[1], ratio_parts[2]};

  std::vector<datagen::DatasetRecord> medium_recs, hard_recs, supplement_recs;
  if (!medium.empty()) medium_recs = io::read_records(medium);
  if (!hard.empty()) hard_recs = io::read_records(hard);
  for (const std::string& path : supplements) {
    auto part = io::read_records(path);
    supplement_recs.insert(supplement_recs.end(), std::make_move_iterator(part.begin()),
                           std::make_move_iterator(part.end()));
  }
  const auto corpus =
      datagen::mix_training_corpus(medium_recs, hard_recs, supplement_recs, ratio, seed);
  io::write_records(out, corpus);
  std::cout << "mixed " << corpus.size() << " records to " << out << "\n";
  return 0;
}

// ---- label ----------------------------------------------------------------

int cmd_label(const std::string& in, const std::string& out, const std::string& solver,
              int max_n, int workers, const std::string& import_path,
              const std::string& summary_path) {
  std::vector<datagen::DatasetRecord> records = io::read_records(in);
  json summary;
  summary["input"] = in;
  summary["records_in"] = records.size();

  if (!import_path.empty()) {
    expert::ImportResult result =
        expert::import_external_solutions(std::move(records), import_path);
    for (const std::string& d : result.diagnostics) std::cerr << d << "\n";
    io::write_records(out, result.records);
    summary["mode"] = "import";
    summary["attached"] = result.attached;
    summary["rejected"] = result.rejected;
    summary["screened_out"] = 0;
    std::cout << "attached " << result.attached << " imported tours, rejected "
              << result.rejected << "\n";
  } else {
    expert::SolverChoice choice;
    if (solver == "dp") {
      choice = expert::SolverChoice::kDp;
    } else if (solver == "brute") {
      choice = expert::SolverChoice::kBruteForce;
    } else {
      throw CLI::ValidationError("--solver", "expected dp or brute");
    }
    expert::LabelResult result = expert::label_dataset(std::move(records), choice, max_n, workers);
    io::write_records(out, result.records);
    summary["mode"] = solver;
    summary["screened_out"] = result.screened_out;
    summary["labeled"] = result.records.size();
    std::cout << "labeled " << result.records.size() << " records, screened out "
              << result.screened_out << "\n";
  }

  if (!summary_path.empty()) {
    std::ofstream sout(summary_path);
    if (!sout) throw std::runtime_error("cannot write " + summary_path);
    sout << summary.dump(2) << '\n';
  }
  return 0;
}

// ---- train ----------------------------------------------------------------

int cmd_train(const std::string& data, const std::string& level_text,
              const std::string& hidden_text, double lr, double weight_decay, int batch,
              int epochs, std::uint64_t seed, int workers, int top_k, int steps,
              const std::string& osla_checkpoint, const std::string& out,
              const std::string& loss_csv) {
  const auto level = features::parse_level(level_text);
  if (!level) {
    throw CLI::ValidationError("--level", "expected static|dynamic|osla|musla");
  }

  std::optional<policy::ScorerParams> helper;
  features::CandidateScorer helper_fn;
  if (*level == features::FeatureLevel::kMusla) {
    if (osla_checkpoint.empty()) {
      throw CLI::ValidationError("--osla-checkpoint",
                                 "musla training needs a trained osla checkpoint");
    }
    policy::Policy osla_policy = io::load_policy(osla_checkpoint);
    if (osla_policy.level != features::FeatureLevel::kOsla) {
      throw CLI::ValidationError("--osla-checkpoint", "checkpoint is not an osla-level policy");
    }
    helper = osla_policy.scorer;
    helper_fn = policy::make_candidate_scorer(*helper);
  }

  const std::vector<datagen::DatasetRecord> records = load_labeled(data);
  std::vector<features::TrainingSample> samples;
  for (const auto& rec : records) {
    auto part = features::build_training_samples(rec, *level, helper ? &helper_fn : nullptr,
                                                 top_k, steps);
    samples.insert(samples.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
  }
  std::cout << "built " << samples.size() << " samples from " << records.size() << " records\n";

  policy::TrainConfig config;
  config.learning_rate = lr;
  config.weight_decay = weight_decay;
  config.batch_size = batch;
  config.epochs = epochs;
  config.seed = seed;
  config.workers = workers;

  const std::vector<int> hidden = parse_int_list(hidden_text, "--hidden");
  policy::ScorerParams initial =
      policy::init_scorer(features::scorer_input_dim(*level), hidden, seed);
  policy::TrainResult trained = policy::train(samples, std::move(initial), config);
  std::cout << "final epoch loss " << trained.epoch_loss.back() << "\n";

  policy::Policy pol;
  pol.level = *level;
  pol.scorer = std::move(trained.params);
  pol.osla_helper = helper;
  pol.top_k = top_k;
  pol.lookahead_steps = steps;
  pol.seed = seed;

  json train_config{{"data", data},        {"level", level_text},
                    {"hidden", hidden},    {"learning_rate", lr},
                    {"weight_decay", weight_decay}, {"batch_size", batch},
                    {"epochs", epochs},    {"seed", seed},
                    {"top_k", top_k},      {"lookahead_steps", steps},
                    {"osla_checkpoint", osla_checkpoint}};
  io::save_policy(out, pol, train_config);
  if (!loss_csv.empty()) io::write_loss_csv(loss_csv, trained.epoch_loss);
  std::cout << "saved checkpoint to " << out << "\n";
  return 0;
}

// ---- solve / eval ---------------------------------------------------------

struct SolverSpec {
  std::string name;
  enum Kind { kGreedyMt, kGreedyLt, kGreedyEs, kExpert, kCheckpoint, kAdapt } kind;
  std::string path;
};

SolverSpec parse_solver_spec(const std::string& text) {
  SolverSpec spec;
  spec.name = text;
  if (text == "greedy-mt") {
    spec.kind = SolverSpec::kGreedyMt;
  } else if (text == "greedy-lt") {
    spec.kind = SolverSpec::kGreedyLt;
  } else if (text == "greedy-es") {
    spec.kind = SolverSpec::kGreedyEs;
  } else if (text == "expert") {
    spec.kind = SolverSpec::kExpert;
  } else if (text.rfind("checkpoint-adapt:", 0) == 0) {
    spec.kind = SolverSpec::kAdapt;
    spec.path = text.substr(std::string("checkpoint-adapt:").size());
  } else if (text.rfind("checkpoint:", 0) == 0) {
    spec.kind = SolverSpec::kCheckpoint;
    spec.path = text.substr(std::string("checkpoint:").size());
  } else {
    throw CLI::ValidationError(
        "--solver",
        "expected greedy-mt|greedy-lt|greedy-es|expert|checkpoint:PATH|checkpoint-adapt:PATH");
  }
  return spec;
}

policy::EpsilonGrid grid_for(const std::vector<double>& factors, int n) {
  policy::EpsilonGrid grid;
  const double scale = datagen::expected_tour_constant(std::max(1, n));
  for (double f : factors) grid.offsets.push_back(f * scale);
  grid.validate();
  return grid;
}

eval::Solver make_solver(const SolverSpec& spec, int max_n,
                         const std::vector<double>& epsilon_factors) {
  switch (spec.kind) {
    case SolverSpec::kGreedyMt:
      return [](const datagen::DatasetRecord& rec) { return policy::greedy_mt(rec.instance); };
    case SolverSpec::kGreedyLt:
      return [](const datagen::DatasetRecord& rec) { return policy::greedy_lt(rec.instance); };
    case SolverSpec::kGreedyEs:
      return [](const datagen::DatasetRecord& rec) { return policy::greedy_es(rec.instance); };
    case SolverSpec::kExpert:
      return [max_n](const datagen::DatasetRecord& rec) {
        if (rec.expert_tour) return *rec.expert_tour;
        const auto solved = expert::dp_solve(rec.instance, max_n);
        if (!solved) throw std::runtime_error("expert: instance " + rec.id + " is infeasible");
        return solved->tour;
      };
    case SolverSpec::kCheckpoint: {
      auto pol = std::make_shared<policy::Policy>(io::load_policy(spec.path));
      return [pol](const datagen::DatasetRecord& rec) {
        return policy::construct_route(rec.instance, *pol).tour;
      };
    }
    case SolverSpec::kAdapt: {
      auto pol = std::make_shared<policy::Policy>(io::load_policy(spec.path));
      return [pol, epsilon_factors](const datagen::DatasetRecord& rec) {
        const auto grid = grid_for(epsilon_factors, rec.instance.n());
        return policy::musla_adapt_solve(rec.instance, *pol, grid).tour;
      };
    }
  }
  throw std::logic_error("unreachable solver kind");
}

int cmd_solve(const std::string& data, const std::string& solver_text, int max_n,
              const std::vector<double>& epsilon_factors, const std::string& out) {
  const SolverSpec spec = parse_solver_spec(solver_text);
  const std::vector<datagen::DatasetRecord> records = io::read_records(data);
  if (records.empty()) throw CLI::ValidationError("--data", "empty dataset");

  std::ofstream tours(out);
  if (!tours) throw std::runtime_error("cannot write " + out);

  std::map<double, std::size_t> epsilon_histogram;
  std::size_t legal = 0;

  // The adapt path is handled here rather than through eval::evaluate so the
  // chosen offsets can be reported.
  if (spec.kind == SolverSpec::kAdapt) {
    const policy::Policy pol = io::load_policy(spec.path);
    for (const auto& rec : records) {
      const auto grid = grid_for(epsilon_factors, rec.instance.n());
      const policy::AdaptResult result = policy::musla_adapt_solve(rec.instance, pol, grid);
      ++epsilon_histogram[result.legal ? result.chosen_epsilon : -1.0];
      if (result.legal) ++legal;
      tours << json{{"id", rec.id},
                    {"order", result.tour.order},
                    {"length", result.schedule.total_length},
                    {"legal", result.legal},
                    {"total_timeout", result.schedule.total_timeout},
                    {"epsilon", result.chosen_epsilon}}
                   .dump()
            << '\n';
    }
    std::cout << "legal " << legal << "/" << records.size() << "\n";
    std::cout << "epsilon histogram (-1 = no legal decode):\n";
    for (const auto& [eps, count] : epsilon_histogram) {
      std::cout << "  " << eps << ": " << count << "\n";
    }
    return 0;
  }

  const eval::Solver solver = make_solver(spec, max_n, epsilon_factors);
  for (const auto& rec : records) {
    const Tour tour = solver(rec);
    const LegalityReport report = check_legality(rec.instance, tour);
    if (report.is_legal) ++legal;
    tours << json{{"id", rec.id},
                  {"order", tour.order},
                  {"length", report.is_permutation ? tour_length(rec.instance, tour) : 0.0},
                  {"legal", report.is_legal},
                  {"total_timeout", report.total_timeout}}
                 .dump()
          << '\n';
  }
  std::cout << "legal " << legal << "/" << records.size() << "\n";
  return 0;
}

int cmd_eval(const std::string& data, const std::vector<std::string>& solver_texts, int max_n,
             const std::vector<double>& epsilon_factors, int workers,
             const std::string& out_prefix) {
  const std::vector<datagen::DatasetRecord> records = io::read_records(data);
  if (records.empty()) throw CLI::ValidationError("--data", "empty dataset");
  if (solver_texts.empty()) throw CLI::ValidationError("--solver", "need at least one solver");

  std::vector<eval::SolverReport> reports;
  for (const std::string& text : solver_texts) {
    const SolverSpec spec = parse_solver_spec(text);
    const eval::Solver solver = make_solver(spec, max_n, epsilon_factors);
    reports.push_back(eval::evaluate(records, solver, spec.name, workers));
    const eval::SolverReport& r = reports.back();
    std::cout << r.solver << ": illegal " << r.illegal_rate_pct << "%, gap " << r.mean_gap_pct
              << "%, timeout " << r.mean_total_timeout << ", s/1000 " << r.seconds_per_1000
              << "\n";
  }

  json config{{"data", data}, {"solvers", solver_texts}, {"workers", workers}};
  io::write_report_csv(out_prefix, reports, config.dump());
  io::write_report_json(out_prefix + "_summary.json", reports, config);
  std::cout << "wrote " << out_prefix << "_{aggregate,instances}.csv and _summary.json\n";
  return 0;
}

int cmd_sweep(const std::vector<std::string>& report_paths, const std::string& gammas_text,
              const std::string& out) {
  if (report_paths.empty()) throw CLI::ValidationError("--report", "need at least one report");
  std::vector<eval::SolverPoint> points;
  for (const std::string& path : report_paths) {
    auto part = io::read_report_points(path);
    points.insert(points.end(), part.begin(), part.end());
  }
  const std::vector<double> gammas = parse_gamma_grid(gammas_text);
  const eval::SweepResult sweep = eval::score_sweep(points, gammas);
  json config{{"reports", report_paths}, {"gammas", gammas_text}};
  io::write_sweep_csv(out, sweep, config.dump());
  std::cout << "wrote " << sweep.rows.size() << " sweep rows to " << out << "\n";
  return 0;
}

int cmd_probe(const std::string& data, std::size_t screened_out,
              const std::string& summary_path, const std::string& out) {
  std::vector<datagen::DatasetRecord> records = io::read_records(data);
  if (!summary_path.empty()) {
    std::ifstream in(summary_path);
    if (!in) throw CLI::ValidationError("--summary", "cannot open " + summary_path);
    json j;
    in >> j;
    screened_out = j.value("screened_out", std::size_t{0});
  }
  const eval::ProbeReport report = eval::dataset_probe(records, screened_out);
  for (const auto& line : report.lines) {
    std::cout << line.name << ": illegal " << line.illegal_pct << "%, gap " << line.gap_pct
              << "%\n";
  }
  std::cout << "screened fraction " << report.screened_fraction << "\n";
  std::cout << "verdict: " << (report.too_easy ? "too easy" : report.too_hard ? "too hard" : "ok")
            << "\n";
  if (!out.empty()) {
    json j{{"too_easy", report.too_easy},
           {"too_hard", report.too_hard},
           {"screened_fraction", report.screened_fraction}};
    json lines = json::array();
    for (const auto& line : report.lines) {
      lines.push_back(
          {{"name", line.name}, {"illegal_pct", line.illegal_pct}, {"gap_pct", line.gap_pct}});
    }
    j["greedy"] = std::move(lines);
    std::ofstream jout(out);
    if (!jout) throw std::runtime_error("cannot write " + out);
    jout << j.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"TSPTW imitation-learning toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  ConfigOverlay overlay;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a dataset");
  gen->fallthrough();
  std::string gen_kind = "medium", gen_out = "dataset.jsonl";
  int gen_n = 20, gen_kp = 0;
  std::size_t gen_count = 1000;
  std::uint64_t gen_seed = 0;
  double gen_alpha = 0.5, gen_beta = 0.75, gen_tn = 0.0, gen_group_fraction = 0.3;
  auto* o_kind = gen->add_option("--kind", gen_kind,
                                 "medium|hard-train|hard-eval|weak-nostart|unconstrained|"
                                 "grouped-medium");
  auto* o_n = gen->add_option("--n", gen_n, "non-depot node count");
  auto* o_count = gen->add_option("--count", gen_count, "record count");
  auto* o_seed = gen->add_option("--seed", gen_seed, "root seed");
  auto* o_alpha = gen->add_option("--alpha", gen_alpha, "window width lower factor");
  auto* o_beta = gen->add_option("--beta", gen_beta, "window width upper factor");
  auto* o_tn = gen->add_option("--tn", gen_tn, "time scale override (0 = automatic)");
  auto* o_gf = gen->add_option("--group-fraction", gen_group_fraction, "regrouped fraction");
  auto* o_kp = gen->add_option("--kp", gen_kp, "group count override (grouped-medium)");
  auto* o_out = gen->add_option("--out", gen_out, "output JSONL path");

  // mix
  auto* mix = app.add_subcommand("mix", "mix datasets into a training corpus");
  mix->fallthrough();
  std::string mix_medium, mix_hard, mix_ratio = "1:1:3", mix_out = "corpus.jsonl";
  std::vector<std::string> mix_supplements;
  std::uint64_t mix_seed = 0;
  auto* m_medium = mix->add_option("--medium", mix_medium, "medium dataset path");
  auto* m_hard = mix->add_option("--hard", mix_hard, "hard dataset path");
  auto* m_sup = mix->add_option("--supplement", mix_supplements, "supplementary dataset paths");
  auto* m_ratio = mix->add_option("--ratio", mix_ratio, "medium:hard:supplement");
  auto* m_seed = mix->add_option("--seed", mix_seed, "shuffle seed");
  auto* m_out = mix->add_option("--out", mix_out, "output JSONL path");

  // label
  auto* label = app.add_subcommand("label", "attach expert tours");
  label->fallthrough();
  std::string label_in, label_out = "labeled.jsonl", label_solver = "dp", label_import,
              label_summary;
  int label_max_n = expert::kDpDefaultMaxN, label_workers = 1;
  auto* l_in = label->add_option("--in", label_in, "input JSONL")->required();
  auto* l_out = label->add_option("--out", label_out, "output JSONL");
  auto* l_solver = label->add_option("--solver", label_solver, "dp|brute");
  auto* l_max_n = label->add_option("--max-n", label_max_n, "solver size guard");
  auto* l_workers = label->add_option("--workers", label_workers, "parallel workers");
  auto* l_import = label->add_option("--import", label_import, "external solution file");
  auto* l_summary = label->add_option("--summary", label_summary, "screening summary JSON path");

  // train
  auto* train = app.add_subcommand("train", "train a candidate scorer");
  train->fallthrough();
  std::string train_data, train_level = "dynamic", train_hidden = "128,128,128",
              train_osla_ckpt, train_out = "policy.json", train_loss_csv;
  double train_lr = 1e-3, train_wd = 0.01;
  int train_batch = 256, train_epochs = 100, train_workers = 1, train_k = 5, train_m = 1;
  std::uint64_t train_seed = 0;
  auto* t_data = train->add_option("--data", train_data, "labeled JSONL")->required();
  auto* t_level = train->add_option("--level", train_level, "static|dynamic|osla|musla");
  auto* t_hidden = train->add_option("--hidden", train_hidden, "hidden widths");
  auto* t_lr = train->add_option("--lr", train_lr, "learning rate");
  auto* t_wd = train->add_option("--weight-decay", train_wd, "decoupled weight decay");
  auto* t_batch = train->add_option("--batch", train_batch, "batch size");
  auto* t_epochs = train->add_option("--epochs", train_epochs, "epochs");
  auto* t_seed = train->add_option("--seed", train_seed, "training seed");
  auto* t_workers = train->add_option("--workers", train_workers, "parallel workers");
  auto* t_k = train->add_option("--k", train_k, "look-ahead ranking size");
  auto* t_m = train->add_option("--m", train_m, "look-ahead extension steps");
  auto* t_osla = train->add_option("--osla-checkpoint", train_osla_ckpt,
                                   "one-step checkpoint (musla level)");
  auto* t_out = train->add_option("--out", train_out, "checkpoint path");
  auto* t_loss = train->add_option("--loss-csv", train_loss_csv, "loss curve CSV path");

  // solve
  auto* solve = app.add_subcommand("solve", "run one solver, write tours");
  solve->fallthrough();
  std::string solve_data, solve_solver = "greedy-mt", solve_out = "tours.jsonl",
              solve_epsilons = "0,0.01,0.02,0.05,0.1,0.2";
  int solve_max_n = expert::kDpDefaultMaxN;
  auto* s_data = solve->add_option("--data", solve_data, "dataset JSONL")->required();
  auto* s_solver = solve->add_option("--solver", solve_solver, "solver spec");
  auto* s_max_n = solve->add_option("--max-n", solve_max_n, "expert size guard");
  auto* s_eps = solve->add_option("--epsilon-factors", solve_epsilons,
                                  "adapt offsets as fractions of the time scale");
  auto* s_out = solve->add_option("--out", solve_out, "tours JSONL path");

  // eval
  auto* evalc = app.add_subcommand("eval", "evaluate solvers, write reports");
  evalc->fallthrough();
  std::string eval_data, eval_prefix = "report",
              eval_epsilons = "0,0.01,0.02,0.05,0.1,0.2";
  std::vector<std::string> eval_solvers;
  int eval_max_n = expert::kDpDefaultMaxN, eval_workers = 1;
  auto* e_data = evalc->add_option("--data", eval_data, "dataset JSONL")->required();
  auto* e_solvers = evalc->add_option("--solver", eval_solvers, "solver specs");
  auto* e_max_n = evalc->add_option("--max-n", eval_max_n, "expert size guard");
  auto* e_eps = evalc->add_option("--epsilon-factors", eval_epsilons, "adapt offsets");
  auto* e_workers = evalc->add_option("--workers", eval_workers, "parallel workers");
  auto* e_prefix = evalc->add_option("--out-prefix", eval_prefix, "report file prefix");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "weighted-score curves over gamma");
  sweep->fallthrough();
  std::vector<std::string> sweep_reports;
  std::string sweep_gammas = "0:1:0.05", sweep_out = "sweep.csv";
  auto* w_reports = sweep->add_option("--report", sweep_reports, "eval summary JSON paths");
  auto* w_gammas = sweep->add_option("--gammas", sweep_gammas, "lo:hi:step or comma list");
  auto* w_out = sweep->add_option("--out", sweep_out, "curve CSV path");

  // probe
  auto* probe = app.add_subcommand("probe", "dataset quality probe");
  probe->fallthrough();
  std::string probe_data, probe_summary, probe_out;
  std::size_t probe_screened = 0;
  auto* p_data = probe->add_option("--data", probe_data, "labeled JSONL")->required();
  auto* p_screened = probe->add_option("--screened-out", probe_screened,
                                       "instances dropped during labeling");
  auto* p_summary = probe->add_option("--summary", probe_summary, "labeling summary JSON");
  auto* p_out = probe->add_option("--out", probe_out, "probe report JSON path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    overlay.load(config_path);
    if (gen->parsed()) {
      overlay.apply("kind", gen_kind, o_kind);
      overlay.apply("n", gen_n, o_n);
      overlay.apply("count", gen_count, o_count);
      overlay.apply("seed", gen_seed, o_seed);
      overlay.apply("alpha", gen_alpha, o_alpha);
      overlay.apply("beta", gen_beta, o_beta);
      overlay.apply("tn", gen_tn, o_tn);
      overlay.apply("group-fraction", gen_group_fraction, o_gf);
      overlay.apply("kp", gen_kp, o_kp);
      overlay.apply("out", gen_out, o_out);
      overlay.finish();
      return cmd_gen(gen_kind, gen_n, gen_count, gen_seed, gen_alpha, gen_beta, gen_tn,
                     gen_group_fraction, gen_kp, gen_out);
    }
    if (mix->parsed()) {
      overlay.apply("medium", mix_medium, m_medium);
      overlay.apply("hard", mix_hard, m_hard);
      overlay.apply("supplement", mix_supplements, m_sup);
      overlay.apply("ratio", mix_ratio, m_ratio);
      overlay.apply("seed", mix_seed, m_seed);
      overlay.apply("out", mix_out, m_out);
      overlay.finish();
      return cmd_mix(mix_medium, mix_hard, mix_supplements, mix_ratio, mix_seed, mix_out);
    }
    if (label->parsed()) {
      overlay.apply("in", label_in, l_in);
      overlay.apply("out", label_out, l_out);
      overlay.apply("solver", label_solver, l_solver);
      overlay.apply("max-n", label_max_n, l_max_n);
      overlay.apply("workers", label_workers, l_workers);
      overlay.apply("import", label_import, l_import);
      overlay.apply("summary", label_summary, l_summary);
      overlay.finish();
      return cmd_label(label_in, label_out, label_solver, label_max_n, label_workers,
                       label_import, label_summary);
    }
    if (train->parsed()) {
      overlay.apply("data", train_data, t_data);
      overlay.apply("level", train_level, t_level);
      overlay.apply("hidden", train_hidden, t_hidden);
      overlay.apply("lr", train_lr, t_lr);
      overlay.apply("weight-decay", train_wd, t_wd);
      overlay.apply("batch", train_batch, t_batch);
      overlay.apply("epochs", train_epochs, t_epochs);
      overlay.apply("seed", train_seed, t_seed);
      overlay.apply("workers", train_workers, t_workers);
      overlay.apply("k", train_k, t_k);
      overlay.apply("m", train_m, t_m);
      overlay.apply("osla-checkpoint", train_osla_ckpt, t_osla);
      overlay.apply("out", train_out, t_out);
      overlay.apply("loss-csv", train_loss_csv, t_loss);
      overlay.finish();
      return cmd_train(train_data, train_level, train_hidden, train_lr, train_wd, train_batch,
                       train_epochs, train_seed, train_workers, train_k, train_m,
                       train_osla_ckpt, train_out, train_loss_csv);
    }
    if (solve->parsed()) {
      overlay.apply("data", solve_data, s_data);
      overlay.apply("solver", solve_solver, s_solver);
      overlay.apply("max-n", solve_max_n, s_max_n);
      overlay.apply("epsilon-factors", solve_epsilons, s_eps);
      overlay.apply("out", solve_out, s_out);
      overlay.finish();
      return cmd_solve(solve_data, solve_solver, solve_max_n,
                       parse_double_list(solve_epsilons, "--epsilon-factors"), solve_out);
    }
    if (evalc->parsed()) {
      overlay.apply("data", eval_data, e_data);
      overlay.apply("solver", eval_solvers, e_solvers);
      overlay.apply("max-n", eval_max_n, e_max_n);
      overlay.apply("epsilon-factors", eval_epsilons, e_eps);
      overlay.apply("workers", eval_workers, e_workers);
      overlay.apply("out-prefix", eval_prefix, e_prefix);
      overlay.finish();
      return cmd_eval(eval_data, eval_solvers, eval_max_n,
                      parse_double_list(eval_epsilons, "--epsilon-factors"), eval_workers,
                      eval_prefix);
    }
    if (sweep->parsed()) {
      overlay.apply("report", sweep_reports, w_reports);
      overlay.apply("gammas", sweep_gammas, w_gammas);
      overlay.apply("out", sweep_out, w_out);
      overlay.finish();
      return cmd_sweep(sweep_reports, sweep_gammas, sweep_out);
    }
    if (probe->parsed()) {
      overlay.apply("data", probe_data, p_data);
      overlay.apply("screened-out", probe_screened, p_screened);
      overlay.apply("summary", probe_summary, p_summary);
      overlay.apply("out", probe_out, p_out);
      overlay.finish();
      return cmd_probe(probe_data, probe_screened, probe_summary, probe_out);
    }
    return 2;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace tsptw::cli
