#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flocksim {

enum class Group { UR, GE, BE };

std::string_view to_string(Group group) noexcept;
/// Accepts "UR", "GE", "BE" (case-sensitive). Throws ConfigError otherwise.
Group parse_group(std::string_view text);

struct AuthorProfile {
  std::int64_t follower_count = 0;
  std::int64_t following_count = 0;
  std::int64_t status_count = 0;
  double account_age_days = 0.0;
  bool verified = false;

  bool operator==(const AuthorProfile&) const = default;
};

/// One retweetable status update: a bandit action.
struct TweetCandidate {
  std::string id;
  std::string text;
  AuthorProfile author;
  std::int64_t created_at = 0;  // round index
  std::int64_t favorites_at_obs = 0;
  std::int64_t retweets_at_obs = 0;

  bool operator==(const TweetCandidate&) const = default;
};

/// Fixed-dimension context vector of a candidate. Entry 0 is the bias.
using FeatureVector = std::vector<double>;

/// Delayed community response to one tweet. Counts are stored as reals so
/// that expectation mode can report means; in sampling mode they are integral.
struct OutcomeObservation {
  double delta_agent_followers = 0.0;
  double delta_poster_followers = 0.0;
  double favorites = 0.0;
  double retweets = 0.0;
  bool observed_for_chosen = false;

  /// Outcome of the retweeted candidate.
  static OutcomeObservation chosen(double delta_agent, double delta_poster, double favorites,
                                   double retweets);
  /// Poster-side signals of a candidate the agent did not retweet. Never
  /// carries an agent follower change.
  static OutcomeObservation unchosen(double delta_poster, double favorites, double retweets);

  bool operator==(const OutcomeObservation&) const = default;
};

/// Full log of one round of one agent.
struct RoundRecord {
  std::string agent_id;
  Group group = Group::UR;
  std::int64_t round_index = 0;
  std::vector<FeatureVector> features;  // all K candidates, in action-set order
  std::size_t chosen = 0;
  bool followed_poster = false;
  OutcomeObservation outcome;                       // for features[chosen]
  std::vector<OutcomeObservation> adviser_outcomes;  // unchosen, action-set order
  double reward = 0.0;
  std::vector<double> adviser_rewards;  // parallel to adviser_outcomes
  double followers = 0.0;               // agent follower count after this round
  std::optional<std::vector<double>> committed_weights;  // set when the policy committed
  std::vector<std::string> events;

  /// Index into `features` of the i-th unchosen candidate.
  std::size_t unchosen_index(std::size_t i) const noexcept { return i < chosen ? i : i + 1; }

  bool operator==(const RoundRecord&) const = default;
};

enum class ResponseLink {
  Logistic,  // g = 1 / (1 + exp(-theta . x / |x|))
  Linear,    // g = clamp(0.5 + theta . x / 4, 0, 1)
};

std::string_view to_string(ResponseLink link) noexcept;

struct ResponseRates {
  double favorite = 2.0;
  double retweet = 1.0;
  double poster = 0.5;
  double p_gain = 0.05;
  double p_unfollow = 0.01;
  double p_reciprocal = 0.1;

  bool operator==(const ResponseRates&) const = default;
};

struct EnvironmentParams {
  double drift_sigma = 0.02;
  double heterogeneity = 0.5;
  double theta_scale = 10.0;  // norm of the shared base audience vector
  ResponseRates rates;
  ResponseLink link = ResponseLink::Logistic;
  bool expectation_mode = false;
  std::vector<std::int64_t> changepoints;  // rounds at which audiences are redrawn
  std::string topic = "baseball";

  bool operator==(const EnvironmentParams&) const = default;
};

enum class BatchFitter { Ols, Ridge };

std::string_view to_string(BatchFitter fitter) noexcept;

struct ExperimentConfig {
  std::uint64_t master_seed = 20140509;
  int agents_per_group = 20;
  std::vector<Group> groups{Group::UR, Group::GE, Group::BE};
  std::int64_t rounds = 650;
  int actions_per_round = 50;
  int feature_dim = 87;
  bool collinear_feature = false;  // last slot duplicates the text-length feature
  double epsilon = 0.05;
  double eta = 0.1;
  int commit_interval = 8;
  double follow_probability = 0.5;
  std::vector<double> alpha{100.0, 10.0, 10.0, 1.0};
  std::vector<double> beta{10.0, 10.0, 1.0};
  double adviser_blend = 0.5;
  double adviser_lambda = 1e-3;
  BatchFitter be_fitter = BatchFitter::Ols;
  double be_lambda = 1e-3;
  std::size_t max_text_length = 280;
  std::vector<std::string> blocked_terms;  // admissibility filter; empty accepts all
  EnvironmentParams environment;
  int threads = 1;                           // 0 = one per hardware thread
  bool identical_agents = false;             // every agent draws from the same streams
  std::vector<std::int64_t> checkpoints;     // summary rounds; empty = weekly + final

  bool operator==(const ExperimentConfig&) const = default;
};

/// Returns the config unchanged when every invariant holds, otherwise throws
/// ConfigError naming the first violated field.
ExperimentConfig validate_config(const ExperimentConfig& config);

/// Parses a config JSON document. Missing keys take defaults; unknown keys
/// are rejected. Does not validate ranges.
ExperimentConfig config_from_json(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

using TextFilter = std::function<bool(std::string_view)>;

/// Predicate that accepts every text.
TextFilter accept_all_filter();
/// Rejects texts containing any of the terms (ASCII case-insensitive).
TextFilter blocklist_filter(std::vector<std::string> terms);

bool candidate_is_admissible(const TweetCandidate& candidate, const TextFilter& filter);

}  // namespace flocksim
