#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "flocksim/error.hpp"
#include "flocksim/features.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace flocksim {
namespace {

TEST(FeatureSchema, StandardLayout) {
  const auto s = FeatureSchema::standard(87);
  EXPECT_EQ(s.dimension(), 87u);
  EXPECT_EQ(s.bucket_count(), 67u);
  EXPECT_EQ(s.names()[0], "bias");
  EXPECT_EQ(s.index_of("hashtag_count"), 3u);
  EXPECT_EQ(s.index_of("bucket_00"), kNamedFeatureCount);
  const std::set<std::string> unique(s.names().begin(), s.names().end());
  EXPECT_EQ(unique.size(), s.names().size());
  EXPECT_THROW(s.index_of("nope"), std::out_of_range);
  EXPECT_THROW(FeatureSchema::standard(19), DimensionError);

  const auto c = FeatureSchema::standard(30, true);
  EXPECT_EQ(c.names().back(), "dup_text_length");
  EXPECT_EQ(c.bucket_count(), 9u);
}

TEST(FeatureSchema, JsonMapsNamesToIndices) {
  const auto doc = nlohmann::json::parse(FeatureSchema::standard(25).to_json());
  EXPECT_EQ(doc["dimension"], 25);
  EXPECT_EQ(doc["features"]["bias"], 0);
  EXPECT_EQ(doc["features"]["bucket_04"], 24);
}

TEST(ExtractFeatures, EmptyCandidate) {
  const auto schema = FeatureSchema::standard(87);
  const auto x = extract_features(TweetCandidate{}, 0, schema);
  ASSERT_EQ(x.size(), 87u);
  EXPECT_EQ(x[0], 1.0);
  EXPECT_EQ(x[schema.index_of("text_length")], 0.0);
  EXPECT_EQ(x[schema.index_of("hashtag_count")], 0.0);
  for (std::size_t i = kNamedFeatureCount; i < x.size(); ++i) EXPECT_EQ(x[i], 0.0);
}

TEST(ExtractFeatures, HashtagsAndUrl) {
  const auto schema = FeatureSchema::standard(87);
  TweetCandidate c;
  c.text = "baseball #mlb #nl";
  const auto x = extract_features(c, 0, schema);
  EXPECT_EQ(x[schema.index_of("hashtag_count")], 2.0);
  EXPECT_EQ(x[schema.index_of("url_present")], 0.0);
  c.text = "see https://t.co/x";
  EXPECT_EQ(extract_features(c, 0, schema)[schema.index_of("url_present")], 1.0);
}

TEST(ExtractFeatures, CollinearSlotCopiesTextLength) {
  const auto schema = FeatureSchema::standard(30, true);
  TweetCandidate c;
  c.text = "some words here";
  const auto x = extract_features(c, 3, schema);
  EXPECT_EQ(x.back(), x[1]);
  EXPECT_GT(x[1], 0.0);
}

TEST(ExtractFeatures, DimensionMismatch) {
  EXPECT_THROW(extract_features(TweetCandidate{}, 0, FeatureSchema::standard(40), 87),
               DimensionError);
}

TEST(ExtractFeatures, MatchesIndependentReference) {
  std::ifstream in(std::string(FLOCKSIM_FIXTURE_DIR) + "/features_reference.json");
  ASSERT_TRUE(in) << "missing fixture";
  const auto cases = nlohmann::json::parse(in);
  ASSERT_GE(cases.size(), 5u);
  for (const auto& k : cases) {
    TweetCandidate c;
    c.text = k["text"];
    c.author.follower_count = k["followers"];
    c.author.following_count = k["following"];
    c.author.status_count = k["statuses"];
    c.author.account_age_days = k["age"];
    c.author.verified = k["verified"];
    c.favorites_at_obs = k["favorites"];
    c.retweets_at_obs = k["retweets"];
    const auto x = extract_features(c, k["round"], FeatureSchema::standard(k["dim"]));
    const auto expected = k["expected"].get<std::vector<double>>();
    ASSERT_EQ(x.size(), expected.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_NEAR(x[i], expected[i], 0.5 * kFeatureQuantum + 1e-12)
          << "text '" << c.text << "' slot " << i;
    }
  }
}

TweetCandidate random_candidate(testing::Gen& gen) {
  static const char* kPieces[] = {"Game", "#mlb", "@fan", "WIN!!", "what?", "http://t.co/a",
                                  "7-3",  "",     "ééé", "\t", "  ", "(bases)", "#", "@"};
  TweetCandidate c;
  const int n = gen.integer(0, 20);
  for (int i = 0; i < n; ++i) {
    c.text += kPieces[gen.integer(0, 13)];
    c.text += gen.coin(0.8) ? " " : "";
  }
  auto big = [&] { return static_cast<std::int64_t>(gen.real(0, 1e9)); };
  c.author.follower_count = gen.coin() ? big() : gen.integer(0, 100);
  c.author.following_count = gen.coin() ? big() : gen.integer(0, 100);
  c.author.status_count = big();
  c.author.account_age_days = gen.real(0, 1e4);
  c.author.verified = gen.coin(0.1);
  c.favorites_at_obs = gen.coin() ? big() : 0;
  c.retweets_at_obs = gen.coin() ? big() : 0;
  return c;
}

TEST(ExtractFeatures, BoundedFiniteBiasedAndDeterministic) {
  testing::Gen gen(77);
  const auto schema = FeatureSchema::standard(87);
  for (int i = 0; i < 2000; ++i) {
    const auto c = random_candidate(gen);
    const auto t = gen.integer(0, 10000);
    const auto x = extract_features(c, t, schema);
    EXPECT_EQ(x[0], 1.0);
    for (double v : x) {
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_GE(v, -1.0);
      ASSERT_LE(v, 25.0);
    }
    EXPECT_EQ(extract_features(c, t, schema), x);
  }
}

TEST(Tokenize, LowercasesAndStrips) {
  EXPECT_EQ(tokenize("  Hello, World!! (#MLB) "),
            (std::vector<std::string>{"hello", "world", "#mlb"}));
  EXPECT_TRUE(tokenize("... !!").empty());
}

}  // namespace
}  // namespace flocksim
