#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flocksim/domain.hpp"
#include "flocksim/stats.hpp"

namespace flocksim {

struct AgentSpec {
  std::string agent_id;  // "<group>_<nn>", e.g. "GE_03"
  Group group = Group::UR;
};

/// Agents in group order, `agents_per_group` each.
std::vector<AgentSpec> agent_roster(const ExperimentConfig& config);

/// "agent_<group>_<nn>.jsonl"
std::string log_file_name(const AgentSpec& agent);

/// Event tag recorded when BE keeps its previous hypothesis.
inline constexpr const char* kDivergenceEvent = "ols_divergence_fallback";

struct AgentSummary {
  std::string agent_id;
  Group group = Group::UR;
  std::vector<double> followers;  // follower count after each round
  std::size_t divergence_events = 0;
  std::size_t filtered_candidates = 0;
  std::size_t skipped_rounds = 0;  // every candidate rejected by the filter

  double final_followers() const noexcept { return followers.empty() ? 0.0 : followers.back(); }
};

struct ExperimentResult {
  std::vector<AgentSummary> agents;            // roster order
  std::vector<std::vector<RoundRecord>> logs;  // filled when RunOptions::keep_records
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // write JSONL logs + summary here
  bool keep_records = false;
  /// Overrides config.blocked_terms when set.
  TextFilter filter;
};

/// Runs every agent of every group for config.rounds rounds. Each agent owns
/// its policy, audience and random streams, so the result is identical for
/// any thread count. Throws ConfigError for an invalid config.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes summary.json and groups.csv.
void write_summary(const std::filesystem::path& out_dir, const ExperimentConfig& config,
                   const ExperimentResult& result);

/// The slice of an agent's log the offline tools work from.
struct AgentSeries {
  std::string agent_id;
  Group group = Group::UR;
  std::vector<std::int64_t> rounds;
  std::vector<FeatureVector> chosen_features;
  std::vector<double> rewards;
  std::vector<double> delta_followers;
  std::vector<double> followers;
  std::vector<std::pair<std::int64_t, std::vector<double>>> weight_snapshots;
  std::size_t divergence_events = 0;

  std::size_t size() const noexcept { return rounds.size(); }
  void append(const RoundRecord& record);
};

AgentSeries series_from_records(std::span<const RoundRecord> records);

/// Reads every agent_*.jsonl in `dir` (sorted by file name). Throws
/// ParseError on malformed logs and std::runtime_error when none exist.
std::vector<AgentSeries> load_log_dir(const std::filesystem::path& dir,
                                      std::size_t expected_dimension = 0);

struct GroupCheckpoint {
  Group group = Group::UR;
  std::int64_t checkpoint = 0;  // rounds elapsed
  std::size_t agents = 0;
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // sample stddev, 0 for a single agent
};

/// Mean/median/stddev of cumulative agent follower change after each
/// checkpoint, per group. Throws std::out_of_range("checkpoint out of range")
/// when a checkpoint exceeds an agent's log length.
std::vector<GroupCheckpoint> group_summary(std::span<const AgentSeries> logs,
                                           std::span<const std::int64_t> checkpoints);

/// Weekly checkpoints (every 168 rounds) plus the final round.
std::vector<std::int64_t> default_checkpoints(std::int64_t rounds);

/// Final follower counts of one group's agents.
std::vector<double> final_followers(std::span<const AgentSeries> logs, Group group);
std::vector<double> final_followers(const ExperimentResult& result, Group group);

}  // namespace flocksim
