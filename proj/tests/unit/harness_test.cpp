#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "flocksim/environment.hpp"
#include "flocksim/error.hpp"
#include "flocksim/harness.hpp"
#include "flocksim/reward.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace flocksim {
namespace {

namespace fs = std::filesystem;

ExperimentConfig small_config(int agents = 2, std::int64_t rounds = 30) {
  ExperimentConfig c;
  c.master_seed = 5;
  c.agents_per_group = agents;
  c.rounds = rounds;
  c.actions_per_round = 8;
  c.feature_dim = 30;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const fs::path& p) {
  const auto text = slurp(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(Roster, IdsAndFileNames) {
  const auto roster = agent_roster(small_config(3));
  ASSERT_EQ(roster.size(), 9u);
  EXPECT_EQ(roster[0].agent_id, "UR_00");
  EXPECT_EQ(roster[4].agent_id, "GE_01");
  EXPECT_EQ(log_file_name(roster[8]), "agent_BE_02.jsonl");
}

TEST(RunExperiment, ZeroRoundsGivesEmptyLogs) {
  testing::TempDir dir("h");
  const auto result = run_experiment(small_config(2, 0), {dir.path()});
  ASSERT_EQ(result.agents.size(), 6u);
  for (const auto& a : agent_roster(small_config(2, 0))) {
    ASSERT_TRUE(fs::exists(dir / log_file_name(a)));
    EXPECT_EQ(fs::file_size(dir / log_file_name(a)), 0u);
  }
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary["rounds"], 0);
  EXPECT_TRUE(fs::exists(dir / "groups.csv"));
}

TEST(RunExperiment, OneLogPerAgentOneLinePerRound) {
  testing::TempDir dir("h");
  run_experiment(small_config(2, 30), {dir.path()});
  for (const auto& a : agent_roster(small_config(2, 30))) {
    EXPECT_EQ(line_count(dir / log_file_name(a)), 30u) << a.agent_id;
  }
}

TEST(RunExperiment, ByteIdenticalAcrossRunsAndThreadCounts) {
  testing::TempDir one("h"), two("h");
  auto c = small_config(3, 40);
  run_experiment(c, {one.path()});
  c.threads = 4;
  run_experiment(c, {two.path()});
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(one.path())) {
    const auto name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(two.path() / name)) << name;
    ++files;
  }
  EXPECT_EQ(files, 9u + 2u);
}

TEST(RunExperiment, SeedChangesLogs) {
  testing::TempDir a("h"), b("h");
  auto c = small_config(1, 10);
  run_experiment(c, {a.path()});
  c.master_seed = 6;
  run_experiment(c, {b.path()});
  EXPECT_NE(slurp(a / "agent_GE_00.jsonl"), slurp(b / "agent_GE_00.jsonl"));
}

TEST(RunExperiment, PerAgentSeedIsolation) {
  testing::TempDir small("h"), large("h");
  run_experiment(small_config(2, 25), {small.path()});
  run_experiment(small_config(4, 25), {large.path()});
  for (const auto& a : agent_roster(small_config(2, 25))) {
    EXPECT_EQ(slurp(small / log_file_name(a)), slurp(large / log_file_name(a))) << a.agent_id;
  }
}

TEST(RunExperiment, RecordsAreConsistent) {
  RunOptions options;
  options.keep_records = true;
  const auto c = small_config(2, 60);
  const auto result = run_experiment(c, options);
  const auto coeffs = RewardCoefficients::from_config(c);
  ASSERT_EQ(result.logs.size(), 6u);
  for (std::size_t i = 0; i < result.logs.size(); ++i) {
    double total = 0.0;
    for (const auto& r : result.logs[i]) {
      ASSERT_LT(r.chosen, r.features.size());
      EXPECT_EQ(r.reward, agent_reward(r.outcome, coeffs));
      ASSERT_EQ(r.adviser_rewards.size(), r.features.size() - 1);
      for (std::size_t k = 0; k < r.adviser_outcomes.size(); ++k) {
        EXPECT_EQ(r.adviser_rewards[k], adviser_reward(r.adviser_outcomes[k], coeffs));
        EXPECT_EQ(r.adviser_outcomes[k].delta_agent_followers, 0.0);
      }
      total += r.outcome.delta_agent_followers;
      EXPECT_EQ(r.followers, total);
      const bool commit_round = r.group == Group::GE && (r.round_index + 1) % 8 == 0;
      EXPECT_EQ(r.committed_weights.has_value(), commit_round);
    }
    EXPECT_EQ(result.agents[i].final_followers(), total);
  }
}

TEST(RunExperiment, BlockedTermsSkipRounds) {
  auto c = small_config(1, 12);
  c.blocked_terms = {"baseball"};
  testing::TempDir dir("h");
  const auto result = run_experiment(c, {dir.path()});
  for (const auto& a : result.agents) {
    EXPECT_EQ(a.skipped_rounds, 12u);
    EXPECT_EQ(a.filtered_candidates, 12u * 8u);
    EXPECT_EQ(a.final_followers(), 0.0);
  }
  EXPECT_EQ(fs::file_size(dir / "agent_GE_00.jsonl"), 0u);
}

TEST(RunExperiment, CollinearBeDivergesOnlyWithoutRidge) {
  auto c = small_config(2, 120);
  c.groups = {Group::BE};
  c.collinear_feature = true;
  const auto ols = run_experiment(c);
  c.be_fitter = BatchFitter::Ridge;
  const auto ridge = run_experiment(c);
  std::size_t ols_events = 0, ridge_events = 0;
  for (const auto& a : ols.agents) ols_events += a.divergence_events;
  for (const auto& a : ridge.agents) ridge_events += a.divergence_events;
  EXPECT_GT(ols_events, 0u);
  EXPECT_EQ(ridge_events, 0u);
}

TEST(RunExperiment, InvalidConfigThrows) {
  auto c = small_config();
  c.epsilon = 2.0;
  EXPECT_THROW(run_experiment(c), ConfigError);
}

AgentSeries hand_series(const std::string& id, Group g, std::vector<double> deltas) {
  AgentSeries s;
  double total = 0;
  for (std::size_t t = 0; t < deltas.size(); ++t) {
    RoundRecord r;
    r.agent_id = id;
    r.group = g;
    r.round_index = static_cast<std::int64_t>(t);
    r.features = {{1.0}, {0.0}};
    r.outcome = OutcomeObservation::chosen(deltas[t], 0, 0, 0);
    total += deltas[t];
    r.followers = total;
    s.append(r);
  }
  return s;
}

TEST(GroupSummary, ZeroFollowerAgent) {
  const std::vector<AgentSeries> logs{hand_series("UR_00", Group::UR, std::vector<double>(10, 0.0))};
  const std::vector<std::int64_t> cps{0, 5, 10};
  for (const auto& row : group_summary(logs, cps)) {
    EXPECT_EQ(row.mean, 0.0);
    EXPECT_EQ(row.agents, 1u);
    EXPECT_EQ(row.stddev, 0.0);
  }
}

TEST(GroupSummary, HandComputedTotals) {
  const std::vector<AgentSeries> logs{
      hand_series("GE_00", Group::GE, {1, 0, 1, -1, 2, 0}),
      hand_series("GE_01", Group::GE, {0, 0, 0, 1, 1, 1}),
      hand_series("GE_02", Group::GE, {1, 1, 1, 1, 1, 1}),
      hand_series("UR_00", Group::UR, {0, 1, 0, 0, 0, 0}),
  };
  const std::vector<std::int64_t> cps{3, 6};
  const auto table = group_summary(logs, cps);
  ASSERT_EQ(table.size(), 4u);
  // GE after 3 rounds: totals 2, 0, 3. After 6: 3, 3, 6.
  EXPECT_EQ(table[0].group, Group::GE);
  EXPECT_EQ(table[0].checkpoint, 3);
  EXPECT_DOUBLE_EQ(table[0].mean, 5.0 / 3.0);
  EXPECT_EQ(table[0].median, 2.0);
  EXPECT_DOUBLE_EQ(table[0].stddev, std::sqrt(7.0 / 3.0));
  EXPECT_EQ(table[1].mean, 4.0);
  EXPECT_EQ(table[1].median, 3.0);
  EXPECT_EQ(table[3].group, Group::UR);
  EXPECT_EQ(table[3].mean, 1.0);
}

TEST(GroupSummary, CheckpointOutOfRange) {
  const std::vector<AgentSeries> logs{hand_series("UR_00", Group::UR, {0, 0, 0})};
  const std::vector<std::int64_t> cps{4};
  try {
    group_summary(logs, cps);
    FAIL();
  } catch (const std::out_of_range& e) {
    EXPECT_STREQ(e.what(), "checkpoint out of range");
  }
}

TEST(DefaultCheckpoints, WeeklyPlusFinal) {
  EXPECT_EQ(default_checkpoints(650), (std::vector<std::int64_t>{168, 336, 504, 650}));
  EXPECT_EQ(default_checkpoints(336), (std::vector<std::int64_t>{168, 336}));
  EXPECT_EQ(default_checkpoints(0), (std::vector<std::int64_t>{0}));
}

TEST(LoadLogDir, RoundTripsThroughDisk) {
  testing::TempDir dir("h");
  RunOptions options{dir.path(), true};
  const auto result = run_experiment(small_config(2, 20), options);
  const auto series = load_log_dir(dir.path(), 30);
  ASSERT_EQ(series.size(), 6u);
  // Sorted by file name: BE, GE, UR.
  EXPECT_EQ(series[0].agent_id, "BE_00");
  EXPECT_EQ(series[2].agent_id, "GE_00");
  EXPECT_EQ(series[2].size(), 20u);
  EXPECT_EQ(final_followers(series, Group::GE), final_followers(result, Group::GE));
  EXPECT_THROW(load_log_dir(dir.path(), 31), ParseError);
  testing::TempDir empty("h");
  EXPECT_THROW(load_log_dir(empty.path()), std::runtime_error);
}

}  // namespace
}  // namespace flocksim
