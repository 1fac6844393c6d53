#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flocksim/domain.hpp"
#include "flocksim/estimators.hpp"
#include "flocksim/rng.hpp"

namespace flocksim {

struct PolicyParams {
  std::size_t dimension = 87;
  double eta = 0.1;
  int commit_interval = 8;
  double adviser_blend = 0.5;
  double adviser_lambda = 1e-3;
  BatchFitter batch_fitter = BatchFitter::Ols;
  double batch_lambda = 1e-3;

  static PolicyParams from_config(const ExperimentConfig& config);
};

/// What a call to Policy::observe_outcome did.
struct PolicyUpdate {
  bool committed = false;             // GE replaced its committed hypothesis
  bool divergence_fallback = false;   // BE kept its previous hypothesis
  std::string detail;
};

/// Learning state of one agent: uniform random (UR), gradient estimator with
/// adviser (GE) or batch least-squares estimator (BE).
class Policy {
 public:
  Policy(Group kind, PolicyParams params);

  Group kind() const noexcept { return kind_; }
  const PolicyParams& params() const noexcept { return params_; }
  const Hypothesis& committed() const noexcept { return committed_; }

  /// UR: uniform index, one draw. GE/BE: one draw decides exploration; with
  /// probability epsilon a second draw picks a uniform index, otherwise the
  /// argmax of predicted reward (lowest index wins ties).
  /// Throws std::invalid_argument on an empty candidate list or bad epsilon.
  std::size_t select_action(std::span<const FeatureVector> candidates, double epsilon,
                            Rng& rng) const;

  /// Learns from a completed round. UR ignores it. GE stages one SGD
  /// hypothesis branched from the committed one, feeds unchosen candidates
  /// with their adviser rewards to the adviser, and every `commit_interval`
  /// rounds commits blend(mean(staged), adviser fit). BE adds the chosen row
  /// and refits on all of its history; a singular system leaves the previous
  /// hypothesis in place and is reported through the returned update.
  PolicyUpdate observe_outcome(const RoundRecord& record);

  std::size_t pending_count() const noexcept { return pending_.size(); }
  std::size_t adviser_rows() const noexcept { return adviser_.count(); }
  /// BE training history (chronological).
  const Dataset& history() const noexcept { return history_; }

 private:
  PolicyUpdate observe_gradient(const RoundRecord& record);
  PolicyUpdate observe_batch(const RoundRecord& record);

  Group kind_;
  PolicyParams params_;
  Hypothesis committed_;
  std::vector<Hypothesis> pending_;  // GE
  NormalEquations adviser_;          // GE
  Dataset history_;                  // BE
  NormalEquations history_stats_;    // BE
};

/// Index of the largest prediction, lowest index on ties.
std::size_t argmax_prediction(const Hypothesis& h, std::span<const FeatureVector> candidates);

}  // namespace flocksim
