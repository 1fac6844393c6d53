#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "flocksim/domain.hpp"

namespace flocksim {

/// Number of explicitly named features; the rest of the vector is filled with
/// token hash buckets.
inline constexpr std::size_t kNamedFeatureCount = 20;

/// Seed of the token hash. Changing it changes every bucket assignment.
inline constexpr std::uint64_t kTokenHashSeed = 0x666C6F636B73696DULL;

/// Reference magnitude used to scale log1p counts: log1p(n) / log1p(ref).
/// Keeps typical entries O(1) so a 0.1 learning rate is stable.
struct CountScale {
  static constexpr double kWords = 64.0;
  static constexpr double kFollowers = 1e8;
  static constexpr double kFollowing = 1e6;
  static constexpr double kStatuses = 1e6;
  static constexpr double kAccountAgeDays = 1e4;
  static constexpr double kEngagement = 1e5;
};

inline constexpr double kTextLengthScale = 280.0;

/// Features are rounded to this grid so logs stay compact and exact.
inline constexpr double kFeatureQuantum = 1e-6;

/// Ordered feature definitions. Index 0 is always the constant bias.
///
///   0  bias                 1
///   1  text_length          code points / 280
///   2  word_count           log1p(tokens) / log1p(64)
///   3  hashtag_count        tokens starting with '#'
///   4  mention_count        tokens starting with '@'
///   5  url_present          1 if any token is a link
///   6  exclamation_count    '!' characters
///   7  question_count       '?' characters
///   8  uppercase_ratio      upper-case letters / letters
///   9  digit_ratio          digits / code points
///  10  log_followers        log1p(author followers) / log1p(1e8)
///  11  log_following        log1p(author following) / log1p(1e6)
///  12  follower_ratio       followers / (followers + following)
///  13  log_statuses         log1p(author statuses) / log1p(1e6)
///  14  log_account_age      log1p(account age days) / log1p(1e4)
///  15  verified             0 / 1
///  16  log_favorites        log1p(favorites at observation) / log1p(1e5)
///  17  log_retweets         log1p(retweets at observation) / log1p(1e5)
///  18  hour_sin             sin(2 pi (t mod 24) / 24)
///  19  hour_cos             cos(2 pi (t mod 24) / 24)
///  20+ bucket_NN            token count in bucket / sqrt(token count)
///
/// With `collinear` set the final slot is `dup_text_length`, an exact copy of
/// slot 1 (used to provoke singular least-squares systems).
class FeatureSchema {
 public:
  static FeatureSchema standard(std::size_t dimension, bool collinear = false);

  std::size_t dimension() const noexcept { return names_.size(); }
  std::size_t bucket_count() const noexcept { return buckets_; }
  bool collinear() const noexcept { return collinear_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  /// Throws std::out_of_range for unknown names.
  std::size_t index_of(std::string_view name) const;

  /// `{"dimension": D, "features": {name: index, ...}}`
  std::string to_json() const;

 private:
  std::vector<std::string> names_;
  std::size_t buckets_ = 0;
  bool collinear_ = false;
};

/// Lower-cased tokens with surrounding punctuation stripped ('#' and '@'
/// prefixes kept). Empty tokens are dropped.
std::vector<std::string> tokenize(std::string_view text);

std::size_t token_bucket(std::string_view token, std::size_t bucket_count) noexcept;

FeatureVector extract_features(const TweetCandidate& candidate, std::int64_t round_index,
                               const FeatureSchema& schema);

/// Same, but first checks the schema against the run's configured dimension.
FeatureVector extract_features(const TweetCandidate& candidate, std::int64_t round_index,
                               const FeatureSchema& schema, std::size_t expected_dimension);

}  // namespace flocksim
