#include <gtest/gtest.h>

#include <cmath>

#include "flocksim/error.hpp"
#include "flocksim/record_io.hpp"
#include "test_support.hpp"

namespace flocksim {
namespace {

RoundRecord random_record(testing::Gen& gen) {
  RoundRecord r;
  r.agent_id = "GE_" + std::to_string(gen.integer(0, 99));
  r.group = static_cast<Group>(gen.integer(0, 2));
  r.round_index = gen.integer(0, 5000);
  const int k = gen.integer(2, 6);
  const int d = gen.integer(1, 5);
  for (int i = 0; i < k; ++i) {
    FeatureVector x;
    for (int j = 0; j < d; ++j) {
      // Mix of grid values, awkward doubles, tiny and huge magnitudes.
      switch (gen.integer(0, 3)) {
        case 0: x.push_back(std::round(gen.real(-5, 5) * 1e6) / 1e6); break;
        case 1: x.push_back(gen.normal()); break;
        case 2: x.push_back(gen.real(-1, 1) * 1e-300); break;
        default: x.push_back(gen.real(-1, 1) * 1e300); break;
      }
    }
    r.features.push_back(std::move(x));
  }
  r.chosen = static_cast<std::size_t>(gen.integer(0, k - 1));
  r.followed_poster = gen.coin();
  r.outcome = OutcomeObservation::chosen(gen.integer(-1, 2), gen.integer(0, 3), gen.real(0, 4),
                                         gen.integer(0, 3));
  for (int i = 0; i + 1 < k; ++i) {
    r.adviser_outcomes.push_back(
        OutcomeObservation::unchosen(gen.integer(0, 3), gen.real(0, 3), gen.integer(0, 3)));
    r.adviser_rewards.push_back(gen.normal() * 10);
  }
  r.reward = gen.normal() * 100;
  r.followers = gen.integer(-3, 80);
  if (gen.coin()) r.committed_weights = gen.normal_vec(static_cast<std::size_t>(d));
  if (gen.coin()) r.events = {"ols_divergence_fallback"};
  return r;
}

TEST(RecordIo, RoundTripsWithByteEquality) {
  testing::Gen gen(2024);
  for (int i = 0; i < 500; ++i) {
    const RoundRecord r = random_record(gen);
    const std::string line = record_to_json(r);
    ASSERT_EQ(line.back(), '\n');
    const RoundRecord back = parse_record(line);
    EXPECT_EQ(back, r);
    EXPECT_EQ(record_to_json(back), line);
  }
}

TEST(RecordIo, NegativeZeroIsWrittenAsZero) {
  RoundRecord r;
  r.features = {{-0.0, 1.0}, {0.5, -0.0}};
  r.adviser_outcomes = {OutcomeObservation::unchosen(0, 0, 0)};
  r.adviser_rewards = {-0.0};
  r.outcome = OutcomeObservation::chosen(0, 0, 0, 0);
  const std::string line = record_to_json(r);
  EXPECT_EQ(line.find("-0"), std::string::npos) << line;
}

TEST(RecordIo, RejectsNonFinite) {
  RoundRecord r;
  r.features = {{NAN}, {1.0}};
  r.adviser_outcomes = {OutcomeObservation::unchosen(0, 0, 0)};
  r.adviser_rewards = {0};
  r.outcome = OutcomeObservation::chosen(0, 0, 0, 0);
  EXPECT_THROW(record_to_json(r), std::invalid_argument);
}

TEST(RecordIo, MalformedInputIsParseError) {
  EXPECT_THROW(parse_record("{\"agent_id\": \"x\""), ParseError);
  EXPECT_THROW(parse_record("[]"), ParseError);
  EXPECT_THROW(parse_record("{}"), ParseError);
  testing::Gen gen(1);
  RoundRecord r = random_record(gen);
  std::string line = record_to_json(r);
  // chosen index out of range
  r.chosen = r.features.size();
  EXPECT_THROW(parse_record(record_to_json(r)), ParseError);
}

}  // namespace
}  // namespace flocksim
