#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flocksim/domain.hpp"
#include "flocksim/rng.hpp"

namespace flocksim {

/// Latent preferences of one agent's audience: engagement with a tweet is
/// driven by theta . x.
struct AudienceState {
  std::vector<double> theta;
  std::int64_t round = 0;  // number of drift steps taken
};

struct ResponseSet {
  OutcomeObservation chosen;
  std::vector<OutcomeObservation> unchosen;  // candidate order, chosen skipped
};

/// Synthetic social stream. Holds only immutable parameters and the shared
/// base audience; per-agent mutable state lives in AudienceState so agents
/// can run on separate threads.
class Environment {
 public:
  Environment(EnvironmentParams params, std::size_t dimension, std::uint64_t master_seed);

  const EnvironmentParams& params() const noexcept { return params_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<double>& base_theta() const noexcept { return base_theta_; }

  /// theta_i(0) = theta_base + heterogeneity * u_i with u_i uniform on the unit
  /// sphere, drawn from a stream keyed by the agent.
  AudienceState make_audience(std::string_view agent_key) const;

  /// k candidates with distinct ids. Depends only on (master seed, agent key,
  /// round). Throws std::invalid_argument for k < 2.
  std::vector<TweetCandidate> sample_action_set(std::string_view agent_key,
                                                std::int64_t round_index, int k) const;

  /// Engagement probability g in [0, 1] of the audience for a feature vector.
  double engagement(const AudienceState& audience, std::span<const double> x) const;

  /// Community response one round later. Draw order: chosen (favorites,
  /// retweets, poster followers, gain, unfollow, reciprocal follow when
  /// followed), then each unchosen candidate (favorites, retweets, poster
  /// followers). Expectation mode replaces every draw with its mean and
  /// consumes no randomness.
  ResponseSet respond(const AudienceState& audience, std::span<const FeatureVector> candidates,
                      std::size_t chosen, bool followed_poster, Rng& rng) const;

  /// theta += (sigma / sqrt(D)) xi. At configured changepoints the audience is
  /// redrawn around a fresh random base instead.
  void drift_step(AudienceState& audience, Rng& rng) const;

 private:
  EnvironmentParams params_;
  std::size_t dimension_;
  std::uint64_t master_seed_;
  std::vector<double> base_theta_;
};

/// Random vector with the given norm and uniformly random direction.
std::vector<double> random_direction(std::size_t dimension, double norm, Rng& rng);

/// Sequential reader over a JSONL round log.
class ReplayReader {
 public:
  /// `expected_dimension` of 0 accepts any (uniform) width.
  explicit ReplayReader(const std::filesystem::path& path, std::size_t expected_dimension = 0);

  /// Next record in file order, or nullopt at end of stream. Throws
  /// ParseError (with line number) on malformed lines and on feature width
  /// mismatches.
  std::optional<RoundRecord> next();

  std::size_t line_number() const noexcept { return line_; }

 private:
  std::ifstream in_;
  std::size_t expected_dimension_;
  std::size_t line_ = 0;
};

}  // namespace flocksim
