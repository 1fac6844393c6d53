#include "flocksim/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "flocksim/error.hpp"
#include "flocksim/rng.hpp"
#include "json.hpp"

namespace flocksim {

namespace {

constexpr const char* kNamed[kNamedFeatureCount] = {
    "bias",          "text_length",       "word_count",     "hashtag_count",
    "mention_count", "url_present",       "exclamation_count", "question_count",
    "uppercase_ratio", "digit_ratio",     "log_followers",  "log_following",
    "follower_ratio", "log_statuses",     "log_account_age", "verified",
    "log_favorites", "log_retweets",      "hour_sin",       "hour_cos",
};

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_strippable(unsigned char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':':
    case '"': case '\'': case '(': case ')': case '[': case ']':
      return true;
    default:
      return false;
  }
}

double log_scaled(double count, double reference) {
  return std::log1p(std::max(count, 0.0)) / std::log1p(reference);
}

double quantize(double v) {
  const double q = std::round(v / kFeatureQuantum) * kFeatureQuantum;
  return q == 0.0 ? 0.0 : q;  // no negative zero
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

FeatureSchema FeatureSchema::standard(std::size_t dimension, bool collinear) {
  const std::size_t fixed = kNamedFeatureCount + (collinear ? 1 : 0);
  if (dimension < fixed) {
    throw DimensionError("feature dimension " + std::to_string(dimension) +
                         " is smaller than the " + std::to_string(fixed) + " fixed features");
  }
  FeatureSchema schema;
  schema.collinear_ = collinear;
  schema.buckets_ = dimension - fixed;
  schema.names_.assign(std::begin(kNamed), std::end(kNamed));
  for (std::size_t b = 0; b < schema.buckets_; ++b) {
    char name[32];
    std::snprintf(name, sizeof name, "bucket_%02zu", b);
    schema.names_.emplace_back(name);
  }
  if (collinear) schema.names_.emplace_back("dup_text_length");
  return schema;
}

std::size_t FeatureSchema::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::out_of_range("no feature named " + std::string(name));
  return static_cast<std::size_t>(it - names_.begin());
}

std::string FeatureSchema::to_json() const {
  nlohmann::ordered_json features = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < names_.size(); ++i) features[names_[i]] = i;
  nlohmann::ordered_json doc = {{"dimension", names_.size()}, {"features", features}};
  return doc.dump(2);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view raw = text.substr(i, j - i);
    while (!raw.empty() && is_strippable(static_cast<unsigned char>(raw.front())))
      raw.remove_prefix(1);
    while (!raw.empty() && is_strippable(static_cast<unsigned char>(raw.back())))
      raw.remove_suffix(1);
    if (!raw.empty()) {
      std::string token(raw);
      for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      tokens.push_back(std::move(token));
    }
    i = j;
  }
  return tokens;
}

std::size_t token_bucket(std::string_view token, std::size_t bucket_count) noexcept {
  return static_cast<std::size_t>(hash_bytes(token, kTokenHashSeed) % bucket_count);
}

FeatureVector extract_features(const TweetCandidate& candidate, std::int64_t round_index,
                               const FeatureSchema& schema) {
  FeatureVector x(schema.dimension(), 0.0);
  const std::string_view text = candidate.text;

  std::size_t code_points = 0;
  std::size_t letters = 0;
  std::size_t upper = 0;
  std::size_t digits = 0;
  std::size_t exclamations = 0;
  std::size_t questions = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++code_points;
    if (c < 0x80) {
      if (std::isalpha(c)) {
        ++letters;
        if (std::isupper(c)) ++upper;
      } else if (std::isdigit(c)) {
        ++digits;
      } else if (c == '!') {
        ++exclamations;
      } else if (c == '?') {
        ++questions;
      }
    }
  }

  const std::vector<std::string> tokens = tokenize(text);
  std::size_t hashtags = 0;
  std::size_t mentions = 0;
  bool url = false;
  for (const auto& t : tokens) {
    if (t.size() > 1 && t[0] == '#') ++hashtags;
    if (t.size() > 1 && t[0] == '@') ++mentions;
    if (starts_with(t, "http://") || starts_with(t, "https://") || starts_with(t, "www.")) {
      url = true;
    }
  }

  const auto& author = candidate.author;
  const double followers = static_cast<double>(std::max<std::int64_t>(author.follower_count, 0));
  const double following = static_cast<double>(std::max<std::int64_t>(author.following_count, 0));
  const double hour = static_cast<double>(((round_index % 24) + 24) % 24);
  const double angle = 2.0 * std::numbers::pi * hour / 24.0;

  x[0] = 1.0;
  x[1] = static_cast<double>(code_points) / kTextLengthScale;
  x[2] = log_scaled(static_cast<double>(tokens.size()), CountScale::kWords);
  x[3] = static_cast<double>(hashtags);
  x[4] = static_cast<double>(mentions);
  x[5] = url ? 1.0 : 0.0;
  x[6] = static_cast<double>(exclamations);
  x[7] = static_cast<double>(questions);
  x[8] = letters == 0 ? 0.0 : static_cast<double>(upper) / static_cast<double>(letters);
  x[9] = code_points == 0 ? 0.0 : static_cast<double>(digits) / static_cast<double>(code_points);
  x[10] = log_scaled(followers, CountScale::kFollowers);
  x[11] = log_scaled(following, CountScale::kFollowing);
  x[12] = followers + following == 0.0 ? 0.0 : followers / (followers + following);
  x[13] = log_scaled(static_cast<double>(author.status_count), CountScale::kStatuses);
  x[14] = log_scaled(author.account_age_days, CountScale::kAccountAgeDays);
  x[15] = author.verified ? 1.0 : 0.0;
  x[16] = log_scaled(static_cast<double>(candidate.favorites_at_obs), CountScale::kEngagement);
  x[17] = log_scaled(static_cast<double>(candidate.retweets_at_obs), CountScale::kEngagement);
  x[18] = std::sin(angle);
  x[19] = std::cos(angle);

  if (schema.bucket_count() > 0 && !tokens.empty()) {
    const double unit = 1.0 / std::sqrt(static_cast<double>(tokens.size()));
    for (const auto& t : tokens) {
      x[kNamedFeatureCount + token_bucket(t, schema.bucket_count())] += unit;
    }
  }

  for (double& v : x) v = quantize(v);
  if (schema.collinear()) x.back() = x[1];
  return x;
}

FeatureVector extract_features(const TweetCandidate& candidate, std::int64_t round_index,
                               const FeatureSchema& schema, std::size_t expected_dimension) {
  if (schema.dimension() != expected_dimension) {
    throw DimensionError("feature schema has dimension " + std::to_string(schema.dimension()) +
                         " but the run is configured for " + std::to_string(expected_dimension));
  }
  return extract_features(candidate, round_index, schema);
}

}  // namespace flocksim
