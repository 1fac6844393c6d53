#include <gtest/gtest.h>

#include <map>

#include "flocksim/error.hpp"
#include "flocksim/policies.hpp"
#include "test_support.hpp"

namespace flocksim {
namespace {

PolicyParams params(std::size_t d, double blend = 0.5) {
  PolicyParams p;
  p.dimension = d;
  p.adviser_blend = blend;
  return p;
}

RoundRecord make_round(std::int64_t t, std::vector<FeatureVector> features, std::size_t chosen,
                       double reward, std::vector<double> adviser_rewards) {
  RoundRecord r;
  r.agent_id = "X_00";
  r.round_index = t;
  r.features = std::move(features);
  r.chosen = chosen;
  r.reward = reward;
  r.outcome = OutcomeObservation::chosen(0, 0, 0, 0);
  for (double a : adviser_rewards) {
    r.adviser_outcomes.push_back(OutcomeObservation::unchosen(0, 0, 0));
    r.adviser_rewards.push_back(a);
  }
  return r;
}

std::vector<FeatureVector> scalar_candidates(std::initializer_list<double> values) {
  std::vector<FeatureVector> out;
  for (double v : values) out.push_back({v});
  return out;
}

TEST(SelectAction, GreedyArgmax) {
  Policy p(Group::GE, params(1));
  Rng rng(1);
  const Hypothesis w{{1.0}};
  EXPECT_EQ(argmax_prediction(w, scalar_candidates({0.1, 0.9, 0.5})), 1u);
  EXPECT_EQ(argmax_prediction(w, scalar_candidates({0.2, 0.7, 0.7})), 1u);
  // Zero hypothesis: every prediction ties, lowest index wins.
  EXPECT_EQ(p.select_action(scalar_candidates({0.1, 0.9, 0.5}), 0.0, rng), 0u);
}

TEST(SelectAction, Errors) {
  Policy p(Group::BE, params(1));
  Rng rng(1);
  EXPECT_THROW(p.select_action({}, 0.1, rng), std::invalid_argument);
  EXPECT_THROW(p.select_action(scalar_candidates({1, 2}), 1.5, rng), std::invalid_argument);
}

TEST(SelectAction, UniformWhenExploringAndForUr) {
  for (Group g : {Group::UR, Group::GE}) {
    Policy p(g, params(1));
    Rng rng(99);
    const auto cands = scalar_candidates({0, 1, 2, 3, 4});
    std::map<std::size_t, int> counts;
    const int n = 50000;
    for (int i = 0; i < n; ++i) ++counts[p.select_action(cands, g == Group::UR ? 0.0 : 1.0, rng)];
    ASSERT_EQ(counts.size(), 5u);
    for (const auto& [k, c] : counts) EXPECT_NEAR(c / double(n), 0.2, 0.01) << to_string(g);
  }
}

TEST(SelectAction, GreedyIsDeterministicAndShiftInvariant) {
  testing::Gen gen(4);
  for (int i = 0; i < 200; ++i) {
    const std::size_t d = 4;
    Hypothesis w{gen.normal_vec(d)};
    std::vector<FeatureVector> cands;
    for (int k = 0; k < 10; ++k) {
      auto x = gen.normal_vec(d);
      x[0] = 1.0;  // bias slot
      cands.push_back(x);
    }
    const auto a = argmax_prediction(w, cands);
    EXPECT_EQ(argmax_prediction(w, cands), a);
    Hypothesis shifted = w;
    shifted.weights[0] += gen.normal() * 5;  // same constant added to every prediction
    EXPECT_EQ(argmax_prediction(shifted, cands), a);
  }
}

TEST(ObserveOutcome, UrNeverLearns) {
  Policy p(Group::UR, params(2));
  const auto before = p.committed();
  const auto u = p.observe_outcome(make_round(0, {{1, 0}, {0, 1}}, 0, 5.0, {3.0}));
  EXPECT_FALSE(u.committed);
  EXPECT_EQ(p.committed(), before);
  EXPECT_EQ(p.pending_count(), 0u);
}

TEST(ObserveOutcome, GeCommitAveragesBranchedSteps) {
  Policy p(Group::GE, params(2, 0.0));
  for (int t = 0; t < 8; ++t) {
    const auto u = p.observe_outcome(make_round(t, {{1, 0}, {0, 1}}, 0, 1.0, {0.0}));
    EXPECT_EQ(u.committed, t == 7);
    if (t < 7) EXPECT_EQ(p.committed(), Hypothesis::zeros(2));
  }
  EXPECT_NEAR(p.committed().weights[0], 0.1, 1e-15);
  EXPECT_EQ(p.committed().weights[1], 0.0);
  EXPECT_EQ(p.pending_count(), 0u);
  EXPECT_EQ(p.adviser_rows(), 8u);
}

TEST(ObserveOutcome, GeCommitsOnlyEveryInterval) {
  testing::Gen gen(8);
  Policy p(Group::GE, params(3));
  Hypothesis last = p.committed();
  for (int t = 0; t < 64; ++t) {
    std::vector<FeatureVector> f;
    for (int k = 0; k < 4; ++k) f.push_back(gen.normal_vec(3));
    const auto u = p.observe_outcome(make_round(t, f, 1, gen.normal(), {gen.normal(), gen.normal(), gen.normal()}));
    EXPECT_EQ(u.committed, (t + 1) % 8 == 0);
    EXPECT_LT(p.pending_count(), 8u);
    if (!u.committed) EXPECT_EQ(p.committed(), last);
    last = p.committed();
  }
}

TEST(ObserveOutcome, GeBlendExtremesIsolateDataSources) {
  testing::Gen gen(9);
  std::vector<RoundRecord> rounds;
  for (int t = 0; t < 24; ++t) {
    std::vector<FeatureVector> f;
    for (int k = 0; k < 3; ++k) f.push_back(gen.normal_vec(3));
    rounds.push_back(make_round(t, f, 0, gen.normal(), {gen.normal(), gen.normal()}));
  }
  // Blend 0: adviser data must not matter.
  {
    Policy a(Group::GE, params(3, 0.0)), b(Group::GE, params(3, 0.0));
    for (auto r : rounds) {
      a.observe_outcome(r);
      for (double& v : r.adviser_rewards) v = gen.normal() * 100;
      b.observe_outcome(r);
    }
    EXPECT_EQ(a.committed(), b.committed());
  }
  // Blend 1: chosen rewards must not matter.
  {
    Policy a(Group::GE, params(3, 1.0)), b(Group::GE, params(3, 1.0));
    for (auto r : rounds) {
      a.observe_outcome(r);
      r.reward = gen.normal() * 100;
      b.observe_outcome(r);
    }
    EXPECT_EQ(a.committed(), b.committed());
  }
}

TEST(ObserveOutcome, BeRecoversExactLinearTarget) {
  testing::Gen gen(10);
  const std::size_t d = 5;
  const auto w_star = gen.normal_vec(d);
  Policy p(Group::BE, params(d));
  for (int t = 0; t < 20; ++t) {
    std::vector<FeatureVector> f{gen.normal_vec(d), gen.normal_vec(d)};
    double r = 0;
    for (std::size_t j = 0; j < d; ++j) r += w_star[j] * f[1][j];
    const auto u = p.observe_outcome(make_round(t, f, 1, r, {0.0}));
    EXPECT_EQ(p.history().size(), static_cast<std::size_t>(t + 1));
    EXPECT_EQ(u.divergence_fallback, t + 1 < static_cast<int>(d));
  }
  for (std::size_t j = 0; j < d; ++j) EXPECT_NEAR(p.committed().weights[j], w_star[j], 1e-8);
}

TEST(ObserveOutcome, BeFallbackKeepsPreviousHypothesis) {
  Policy p(Group::BE, params(2));
  const auto u = p.observe_outcome(make_round(0, {{1, 1}, {0, 1}}, 0, 3.0, {0.0}));
  EXPECT_TRUE(u.divergence_fallback);
  EXPECT_FALSE(u.detail.empty());
  EXPECT_EQ(p.committed(), Hypothesis::zeros(2));

  PolicyParams ridge = params(2);
  ridge.batch_fitter = BatchFitter::Ridge;
  Policy q(Group::BE, ridge);
  EXPECT_FALSE(q.observe_outcome(make_round(0, {{1, 1}, {0, 1}}, 0, 3.0, {0.0})).divergence_fallback);
  EXPECT_NE(q.committed(), Hypothesis::zeros(2));
}

TEST(ObserveOutcome, DimensionMismatch) {
  Policy p(Group::GE, params(3));
  EXPECT_THROW(p.observe_outcome(make_round(0, {{1, 0}, {0, 1}}, 0, 1.0, {0.0})), DimensionError);
}

}  // namespace
}  // namespace flocksim
