#include "flocksim/reward.hpp"

#include <algorithm>
#include <stdexcept>

#include "flocksim/error.hpp"

namespace flocksim {

RewardCoefficients RewardCoefficients::from_config(const ExperimentConfig& config) {
  if (config.alpha.size() != 4) throw ConfigError("alpha must have 4 coefficients");
  if (config.beta.size() != 3) throw ConfigError("beta must have 3 coefficients");
  RewardCoefficients c;
  std::copy(config.alpha.begin(), config.alpha.end(), c.alpha.begin());
  std::copy(config.beta.begin(), config.beta.end(), c.beta.begin());
  return c;
}

double agent_reward(const OutcomeObservation& outcome, const RewardCoefficients& coeffs) {
  if (!outcome.observed_for_chosen) {
    throw std::invalid_argument("agent_reward requires the outcome of the chosen tweet");
  }
  const auto& a = coeffs.alpha;
  return a[0] * outcome.delta_agent_followers + a[1] * outcome.delta_poster_followers +
         a[2] * outcome.favorites + a[3] * outcome.retweets;
}

double adviser_reward(const OutcomeObservation& outcome, const RewardCoefficients& coeffs) noexcept {
  const auto& b = coeffs.beta;
  return b[0] * outcome.delta_poster_followers + b[1] * outcome.favorites +
         b[2] * outcome.retweets;
}

}  // namespace flocksim
