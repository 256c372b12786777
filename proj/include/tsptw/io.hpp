#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tsptw/datagen.hpp"
#include "tsptw/eval.hpp"
#include "tsptw/policy.hpp"

namespace tsptw::io {

// Dataset files are JSONL, one record per line:
//   {"id": ..., "n": ..., "coords": [[x,y],...], "tw": [[start,end,unconstrained],...],
//    "meta": {"generator":..., "seed":..., "params":{...}, "groups":[...]?},
//    "expert_tour": [...]?, "expert_length": ...?}
nlohmann::json record_to_json(const datagen::DatasetRecord& record);
datagen::DatasetRecord record_from_json(const nlohmann::json& j);

void write_records(const std::string& path, const std::vector<datagen::DatasetRecord>& records);
std::vector<datagen::DatasetRecord> read_records(const std::string& path);

// Checkpoints are single JSON documents embedding the shape, the flat weights
// and the settings that produced them.
inline constexpr int kCheckpointVersion = 1;
void save_policy(const std::string& path, const policy::Policy& pol,
                 const nlohmann::json& train_config);
policy::Policy load_policy(const std::string& path, nlohmann::json* train_config = nullptr);

void write_loss_csv(const std::string& path, const std::vector<double>& epoch_loss);

void write_report_csv(const std::string& path_prefix,
                      const std::vector<eval::SolverReport>& reports,
                      const std::string& config_line);
void write_report_json(const std::string& path, const std::vector<eval::SolverReport>& reports,
                       const nlohmann::json& config);
std::vector<eval::SolverPoint> read_report_points(const std::string& path);

void write_sweep_csv(const std::string& path, const eval::SweepResult& sweep,
                     const std::string& config_line);

}  // namespace tsptw::io
