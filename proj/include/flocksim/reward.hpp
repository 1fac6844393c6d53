#pragma once

#include <array>

#include "flocksim/domain.hpp"

namespace flocksim {

struct RewardCoefficients {
  /// Weights of agent follower change, poster follower change, favorites, retweets.
  std::array<double, 4> alpha{100.0, 10.0, 10.0, 1.0};
  /// Weights of poster follower change, favorites, retweets for unchosen tweets.
  std::array<double, 3> beta{10.0, 10.0, 1.0};

  /// Throws ConfigError if the vectors have the wrong length.
  static RewardCoefficients from_config(const ExperimentConfig& config);
};

/// Reward of the retweeted candidate. Throws std::invalid_argument when the
/// observation belongs to a tweet the agent did not choose.
double agent_reward(const OutcomeObservation& outcome, const RewardCoefficients& coeffs);

/// Poster-side reward the adviser computes for any tweet.
double adviser_reward(const OutcomeObservation& outcome, const RewardCoefficients& coeffs) noexcept;

}  // namespace flocksim
