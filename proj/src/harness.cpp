#include "flocksim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "flocksim/environment.hpp"
#include "flocksim/error.hpp"
#include "flocksim/features.hpp"
#include "flocksim/policies.hpp"
#include "flocksim/record_io.hpp"
#include "flocksim/reward.hpp"
#include "json.hpp"

namespace flocksim {

std::vector<AgentSpec> agent_roster(const ExperimentConfig& config) {
  std::vector<AgentSpec> roster;
  for (Group g : config.groups) {
    for (int i = 0; i < config.agents_per_group; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "%s_%02d", std::string(to_string(g)).c_str(), i);
      roster.push_back({id, g});
    }
  }
  return roster;
}

std::string log_file_name(const AgentSpec& agent) { return "agent_" + agent.agent_id + ".jsonl"; }

namespace {

struct SharedRun {
  const ExperimentConfig& config;
  const Environment& environment;
  const FeatureSchema& schema;
  const RewardCoefficients& coeffs;
  const TextFilter& filter;
};

AgentSummary run_agent(const SharedRun& run, const AgentSpec& agent,
                       const std::optional<std::filesystem::path>& out_dir,
                       std::vector<RoundRecord>* keep) {
  const auto& config = run.config;
  const std::string key = config.identical_agents ? std::string("shared") : agent.agent_id;
  Rng select_rng(derive_seed(config.master_seed, key, "select"));
  Rng follow_rng(derive_seed(config.master_seed, key, "follow"));
  Rng response_rng(derive_seed(config.master_seed, key, "respond"));
  Rng drift_rng(derive_seed(config.master_seed, key, "drift"));

  Policy policy(agent.group, PolicyParams::from_config(config));
  AudienceState audience = run.environment.make_audience(key);

  std::ofstream log;
  std::string buffer;
  if (out_dir) {
    log.open(*out_dir / log_file_name(agent), std::ios::binary | std::ios::trunc);
    if (!log) throw std::runtime_error("cannot write log for " + agent.agent_id);
  }

  AgentSummary summary;
  summary.agent_id = agent.agent_id;
  summary.group = agent.group;
  summary.followers.reserve(static_cast<std::size_t>(config.rounds));
  double followers = 0.0;
  const auto dim = static_cast<std::size_t>(config.feature_dim);

  for (std::int64_t t = 0; t < config.rounds; ++t) {
    const auto candidates =
        run.environment.sample_action_set(key, t, config.actions_per_round);

    RoundRecord record;
    record.agent_id = agent.agent_id;
    record.group = agent.group;
    record.round_index = t;
    for (const auto& c : candidates) {
      if (!candidate_is_admissible(c, run.filter)) {
        ++summary.filtered_candidates;
        continue;
      }
      record.features.push_back(extract_features(c, t, run.schema, dim));
    }

    if (record.features.empty()) {
      ++summary.skipped_rounds;
    } else {
      record.chosen = policy.select_action(record.features, config.epsilon, select_rng);
      record.followed_poster = follow_rng.bernoulli(config.follow_probability);
      auto response = run.environment.respond(audience, record.features, record.chosen,
                                              record.followed_poster, response_rng);
      record.outcome = response.chosen;
      record.reward = agent_reward(record.outcome, run.coeffs);
      record.adviser_outcomes = std::move(response.unchosen);
      record.adviser_rewards.reserve(record.adviser_outcomes.size());
      for (const auto& o : record.adviser_outcomes) {
        record.adviser_rewards.push_back(adviser_reward(o, run.coeffs));
      }
      followers += record.outcome.delta_agent_followers;
      record.followers = followers;

      const PolicyUpdate update = policy.observe_outcome(record);
      if (update.committed) record.committed_weights = policy.committed().weights;
      if (update.divergence_fallback) {
        record.events.emplace_back(kDivergenceEvent);
        ++summary.divergence_events;
      }
    }
    run.environment.drift_step(audience, drift_rng);
    summary.followers.push_back(followers);

    if (record.features.empty()) continue;
    if (out_dir) {
      append_record_json(buffer, record);
      if (buffer.size() > (1u << 20)) {
        log.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        buffer.clear();
      }
    }
    if (keep) keep->push_back(std::move(record));
  }
  if (out_dir) {
    log.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (!log.flush()) throw std::runtime_error("failed writing log for " + agent.agent_id);
  }
  return summary;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& input, const RunOptions& options) {
  const ExperimentConfig config = validate_config(input);
  const auto dim = static_cast<std::size_t>(config.feature_dim);
  const Environment environment(config.environment, dim, config.master_seed);
  const FeatureSchema schema = FeatureSchema::standard(dim, config.collinear_feature);
  const RewardCoefficients coeffs = RewardCoefficients::from_config(config);
  const TextFilter filter = options.filter         ? options.filter
                            : config.blocked_terms.empty() ? accept_all_filter()
                                                           : blocklist_filter(config.blocked_terms);
  const SharedRun run{config, environment, schema, coeffs, filter};

  if (options.out_dir) std::filesystem::create_directories(*options.out_dir);

  const auto roster = agent_roster(config);
  ExperimentResult result;
  result.agents.resize(roster.size());
  if (options.keep_records) result.logs.resize(roster.size());

  std::size_t workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                            : static_cast<std::size_t>(config.threads);
  workers = std::min(workers, std::max<std::size_t>(roster.size(), 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < roster.size(); i = next++) {
      try {
        result.agents[i] = run_agent(run, roster[i], options.out_dir,
                                     options.keep_records ? &result.logs[i] : nullptr);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  if (options.out_dir) write_summary(*options.out_dir, config, result);
  return result;
}

void write_summary(const std::filesystem::path& out_dir, const ExperimentConfig& config,
                   const ExperimentResult& result) {
  using nlohmann::ordered_json;
  std::vector<AgentSeries> series;
  ordered_json agents = ordered_json::array();
  for (const auto& a : result.agents) {
    agents.push_back({{"agent_id", a.agent_id},
                      {"group", std::string(to_string(a.group))},
                      {"final_followers", a.final_followers()},
                      {"divergence_events", a.divergence_events},
                      {"filtered_candidates", a.filtered_candidates},
                      {"skipped_rounds", a.skipped_rounds},
                      {"followers", a.followers}});
    AgentSeries s;
    s.agent_id = a.agent_id;
    s.group = a.group;
    double previous = 0.0;
    for (std::size_t t = 0; t < a.followers.size(); ++t) {
      s.rounds.push_back(static_cast<std::int64_t>(t));
      s.delta_followers.push_back(a.followers[t] - previous);
      previous = a.followers[t];
    }
    series.push_back(std::move(s));
  }

  const auto checkpoints =
      config.checkpoints.empty() ? default_checkpoints(config.rounds) : config.checkpoints;
  const auto table = group_summary(series, checkpoints);

  ordered_json groups = ordered_json::array();
  std::string csv = "group,checkpoint,agents,mean,median,stddev\n";
  for (const auto& row : table) {
    groups.push_back({{"group", std::string(to_string(row.group))},
                      {"checkpoint", row.checkpoint},
                      {"agents", row.agents},
                      {"mean", row.mean},
                      {"median", row.median},
                      {"stddev", row.stddev}});
    char line[160];
    std::snprintf(line, sizeof line, "%s,%lld,%zu,%.10g,%.10g,%.10g\n",
                  std::string(to_string(row.group)).c_str(),
                  static_cast<long long>(row.checkpoint), row.agents, row.mean, row.median,
                  row.stddev);
    csv += line;
  }

  ordered_json doc = {{"master_seed", config.master_seed},
                      {"rounds", config.rounds},
                      {"agents_per_group", config.agents_per_group},
                      {"groups", groups},
                      {"agents", agents}};
  std::ofstream(out_dir / "summary.json", std::ios::binary | std::ios::trunc) << doc.dump(2) << "\n";
  std::ofstream(out_dir / "groups.csv", std::ios::binary | std::ios::trunc) << csv;
}

// ---------------------------------------------------------------------------

void AgentSeries::append(const RoundRecord& record) {
  if (rounds.empty()) {
    agent_id = record.agent_id;
    group = record.group;
  }
  rounds.push_back(record.round_index);
  chosen_features.push_back(record.features.at(record.chosen));
  rewards.push_back(record.reward);
  delta_followers.push_back(record.outcome.delta_agent_followers);
  followers.push_back(record.followers);
  if (record.committed_weights) weight_snapshots.emplace_back(record.round_index, *record.committed_weights);
  divergence_events += static_cast<std::size_t>(
      std::count(record.events.begin(), record.events.end(), std::string(kDivergenceEvent)));
}

AgentSeries series_from_records(std::span<const RoundRecord> records) {
  AgentSeries s;
  for (const auto& r : records) s.append(r);
  return s;
}

std::vector<AgentSeries> load_log_dir(const std::filesystem::path& dir,
                                      std::size_t expected_dimension) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("log directory " + dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("agent_") && name.ends_with(".jsonl")) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw std::runtime_error("no agent_*.jsonl logs in " + dir.string());
  std::sort(files.begin(), files.end());

  std::vector<AgentSeries> out;
  for (const auto& path : files) {
    ReplayReader reader(path, expected_dimension);
    AgentSeries series;
    try {
      while (auto record = reader.next()) series.append(*record);
    } catch (const ParseError& e) {
      throw ParseError(path.filename().string() + ": " + e.what(), e.line());
    }
    if (series.rounds.empty()) {
      // Empty log (zero rounds): identify the agent from the file name.
      std::string stem = path.stem().string().substr(6);
      series.agent_id = stem;
      series.group = parse_group(stem.substr(0, stem.find('_')));
    }
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<std::int64_t> default_checkpoints(std::int64_t rounds) {
  std::vector<std::int64_t> cps;
  for (std::int64_t c = 168; c < rounds; c += 168) cps.push_back(c);
  cps.push_back(rounds);
  return cps;
}

std::vector<GroupCheckpoint> group_summary(std::span<const AgentSeries> logs,
                                           std::span<const std::int64_t> checkpoints) {
  if (logs.empty()) throw std::invalid_argument("group_summary: no logs");
  std::vector<Group> groups;
  for (const auto& s : logs) {
    if (std::find(groups.begin(), groups.end(), s.group) == groups.end()) groups.push_back(s.group);
  }
  std::vector<GroupCheckpoint> table;
  for (Group g : groups) {
    for (std::int64_t cp : checkpoints) {
      std::vector<double> totals;
      for (const auto& s : logs) {
        if (s.group != g) continue;
        if (cp < 0 || static_cast<std::size_t>(cp) > s.delta_followers.size()) {
          throw std::out_of_range("checkpoint out of range");
        }
        double sum = 0.0;
        for (std::int64_t t = 0; t < cp; ++t) sum += s.delta_followers[static_cast<std::size_t>(t)];
        totals.push_back(sum);
      }
      GroupCheckpoint row;
      row.group = g;
      row.checkpoint = cp;
      row.agents = totals.size();
      row.mean = mean(totals);
      row.median = median(totals);
      row.stddev = totals.size() > 1 ? std::sqrt(sample_variance(totals)) : 0.0;
      table.push_back(row);
    }
  }
  return table;
}

std::vector<double> final_followers(std::span<const AgentSeries> logs, Group group) {
  std::vector<double> out;
  for (const auto& s : logs) {
    if (s.group != group) continue;
    double sum = 0.0;
    for (double d : s.delta_followers) sum += d;
    out.push_back(sum);
  }
  return out;
}

std::vector<double> final_followers(const ExperimentResult& result, Group group) {
  std::vector<double> out;
  for (const auto& a : result.agents) {
    if (a.group == group) out.push_back(a.final_followers());
  }
  return out;
}

}  // namespace flocksim
