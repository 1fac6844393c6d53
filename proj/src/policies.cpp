#include "flocksim/policies.hpp"

#include <stdexcept>

#include "flocksim/error.hpp"

namespace flocksim {

PolicyParams PolicyParams::from_config(const ExperimentConfig& config) {
  PolicyParams p;
  p.dimension = static_cast<std::size_t>(config.feature_dim);
  p.eta = config.eta;
  p.commit_interval = config.commit_interval;
  p.adviser_blend = config.adviser_blend;
  p.adviser_lambda = config.adviser_lambda;
  p.batch_fitter = config.be_fitter;
  p.batch_lambda = config.be_lambda;
  return p;
}

Policy::Policy(Group kind, PolicyParams params)
    : kind_(kind),
      params_(params),
      committed_(Hypothesis::zeros(params.dimension)),
      adviser_(kind == Group::GE ? params.dimension : 0),
      history_(params.dimension),
      history_stats_(kind == Group::BE ? params.dimension : 0) {
  if (params.commit_interval < 1) throw std::invalid_argument("commit_interval must be at least 1");
}

std::size_t argmax_prediction(const Hypothesis& h, std::span<const FeatureVector> candidates) {
  std::size_t best = 0;
  double best_value = predict(h, candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = predict(h, candidates[i]);
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return best;
}

std::size_t Policy::select_action(std::span<const FeatureVector> candidates, double epsilon,
                                  Rng& rng) const {
  if (candidates.empty()) throw std::invalid_argument("select_action: no candidates");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("select_action: epsilon out of range");
  }
  if (kind_ == Group::UR) return rng.index(candidates.size());
  if (rng.uniform() < epsilon) return rng.index(candidates.size());
  return argmax_prediction(committed_, candidates);
}

PolicyUpdate Policy::observe_outcome(const RoundRecord& record) {
  if (record.chosen >= record.features.size()) {
    throw std::invalid_argument("observe_outcome: chosen index out of range");
  }
  for (const auto& x : record.features) {
    if (x.size() != params_.dimension) {
      throw DimensionError("observe_outcome: round " + std::to_string(record.round_index) +
                           " has feature dimension " + std::to_string(x.size()) +
                           ", policy expects " + std::to_string(params_.dimension));
    }
  }
  switch (kind_) {
    case Group::UR: return {};
    case Group::GE: return observe_gradient(record);
    case Group::BE: return observe_batch(record);
  }
  return {};
}

PolicyUpdate Policy::observe_gradient(const RoundRecord& record) {
  if (record.adviser_rewards.size() + 1 != record.features.size()) {
    throw std::invalid_argument("observe_outcome: adviser rewards do not match candidates");
  }
  pending_.push_back(sgd_step(committed_, record.features[record.chosen], record.reward,
                              params_.eta));
  for (std::size_t i = 0; i < record.adviser_rewards.size(); ++i) {
    adviser_.add(record.features[record.unchosen_index(i)], record.adviser_rewards[i]);
  }

  PolicyUpdate update;
  if (pending_.size() >= static_cast<std::size_t>(params_.commit_interval)) {
    const Hypothesis staged = average_hypotheses(pending_);
    const Hypothesis adviser = adviser_.count() > 0
                                   ? fit_ridge(adviser_, params_.adviser_lambda)
                                   : Hypothesis::zeros(params_.dimension);
    committed_ = blend(staged, adviser, params_.adviser_blend);
    pending_.clear();
    update.committed = true;
  }
  return update;
}

PolicyUpdate Policy::observe_batch(const RoundRecord& record) {
  const auto& x = record.features[record.chosen];
  history_.add(x, record.reward);
  history_stats_.add(x, record.reward);

  PolicyUpdate update;
  try {
    committed_ = params_.batch_fitter == BatchFitter::Ols
                     ? fit_ols(history_stats_)
                     : fit_ridge(history_stats_, params_.batch_lambda);
  } catch (const DivergenceError& e) {
    update.divergence_fallback = true;
    update.detail = "round " + std::to_string(record.round_index) + ": " + e.what();
  }
  return update;
}

}  // namespace flocksim
