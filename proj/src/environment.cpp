#include "flocksim/environment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "flocksim/error.hpp"
#include "flocksim/linalg.hpp"
#include "flocksim/record_io.hpp"

namespace flocksim {

namespace {

constexpr std::array<std::string_view, 64> kWords = {
    "game",    "tonight", "win",     "loss",    "season",  "pitcher", "home",    "run",
    "inning",  "fans",    "great",   "what",    "a",       "the",     "is",      "for",
    "team",    "league",  "score",   "hit",     "catch",   "strike",  "out",     "bat",
    "ball",    "park",    "field",   "coach",   "trade",   "rookie",  "stats",   "playoff",
    "watch",   "live",    "love",    "today",   "big",     "play",    "amazing", "new",
    "record",  "series",  "double",  "triple",  "walk",    "bases",   "loaded",  "mound",
    "dugout",  "umpire",  "slider",  "curve",   "fastball", "glove",  "cap",     "jersey",
    "tickets", "stadium", "summer",  "again",   "best",    "ever",    "my",      "our",
};

constexpr std::array<std::string_view, 10> kHashtags = {
    "#mlb", "#yankees", "#redsox", "#cubs", "#dodgers",
    "#giants", "#nl", "#al", "#worldseries", "#opening",
};

constexpr std::array<std::string_view, 8> kHandles = {
    "@mlb", "@espn", "@fox_sports", "@baseballnews", "@statcast", "@coach", "@fan_club", "@ballpark",
};

std::string capitalized(std::string_view word) {
  std::string s(word);
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string uppercased(std::string_view word) {
  std::string s(word);
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string synthesize_text(std::string_view topic, Rng& rng) {
  std::vector<std::string> tokens;
  const std::size_t words = 3 + rng.index(10);
  for (std::size_t i = 0; i < words; ++i) {
    std::string w(kWords[rng.index(kWords.size())]);
    if (rng.bernoulli(0.08)) w = uppercased(w);
    tokens.push_back(std::move(w));
  }
  std::string topic_token;
  switch (rng.index(4)) {
    case 0: topic_token = std::string(topic); break;
    case 1: topic_token = "#" + std::string(topic); break;
    case 2: topic_token = capitalized(topic); break;
    default: topic_token = uppercased(topic); break;
  }
  tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(rng.index(tokens.size() + 1)),
                topic_token);
  if (rng.bernoulli(0.3)) {
    tokens.insert(tokens.begin(), std::string(kHandles[rng.index(kHandles.size())]));
  }
  if (rng.bernoulli(0.25)) {
    tokens.push_back(std::to_string(rng.index(12)) + "-" + std::to_string(rng.index(12)));
  }
  const std::size_t hashtags = rng.bernoulli(0.45) ? 1 + rng.index(3) : 0;
  for (std::size_t i = 0; i < hashtags; ++i) {
    tokens.emplace_back(kHashtags[rng.index(kHashtags.size())]);
  }
  if (rng.bernoulli(0.3)) {
    static constexpr std::string_view kAlnum = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::string url = "http://t.co/";
    for (int i = 0; i < 8; ++i) url += kAlnum[rng.index(kAlnum.size())];
    tokens.push_back(std::move(url));
  }

  std::string text;
  for (const auto& t : tokens) {
    if (!text.empty()) text += ' ';
    text += t;
  }
  if (rng.bernoulli(0.25)) text += rng.bernoulli(0.3) ? "!!" : "!";
  if (rng.bernoulli(0.1)) text += "?";
  return text;
}

AuthorProfile sample_author(Rng& rng) {
  AuthorProfile a;
  a.follower_count = static_cast<std::int64_t>(std::floor(rng.lognormal(6.0, 2.0)));
  a.following_count = static_cast<std::int64_t>(std::floor(rng.lognormal(5.5, 1.3)));
  a.status_count = static_cast<std::int64_t>(std::floor(rng.lognormal(7.5, 1.8)));
  a.account_age_days = std::floor(30.0 + 3600.0 * rng.uniform());
  a.verified = rng.bernoulli(a.follower_count > 10000 ? 0.5 : 0.05);
  return a;
}

}  // namespace

std::vector<double> random_direction(std::size_t dimension, double norm, Rng& rng) {
  std::vector<double> v(dimension);
  for (double& x : v) x = rng.normal();
  const double length = std::sqrt(linalg::dot(v, v));
  const double scale = length > 0.0 ? norm / length : 0.0;
  for (double& x : v) x *= scale;
  return v;
}

Environment::Environment(EnvironmentParams params, std::size_t dimension,
                         std::uint64_t master_seed)
    : params_(std::move(params)), dimension_(dimension), master_seed_(master_seed) {
  Rng rng(derive_seed(master_seed_, "environment", "theta_base"));
  base_theta_ = random_direction(dimension_, params_.theta_scale, rng);
}

AudienceState Environment::make_audience(std::string_view agent_key) const {
  Rng rng(derive_seed(master_seed_, agent_key, "audience"));
  AudienceState state;
  state.theta = base_theta_;
  const auto u = random_direction(dimension_, 1.0, rng);
  for (std::size_t i = 0; i < dimension_; ++i) state.theta[i] += params_.heterogeneity * u[i];
  return state;
}

std::vector<TweetCandidate> Environment::sample_action_set(std::string_view agent_key,
                                                           std::int64_t round_index, int k) const {
  if (k < 2) throw std::invalid_argument("sample_action_set: k must be at least 2");
  Rng rng(derive_seed(master_seed_, agent_key, "actions", static_cast<std::uint64_t>(round_index)));
  std::vector<TweetCandidate> out;
  out.reserve(static_cast<std::size_t>(k));
  const std::string prefix =
      std::string(agent_key) + "-" + std::to_string(round_index) + "-";
  for (int i = 0; i < k; ++i) {
    TweetCandidate c;
    c.id = prefix + std::to_string(i);
    c.author = sample_author(rng);
    c.text = synthesize_text(params_.topic, rng);
    c.created_at = std::max<std::int64_t>(0, round_index - static_cast<std::int64_t>(rng.index(3)));
    const double reach = std::sqrt(static_cast<double>(c.author.follower_count));
    c.favorites_at_obs = rng.poisson(std::min(50.0, 0.2 + 0.05 * reach));
    c.retweets_at_obs = rng.poisson(std::min(25.0, 0.1 + 0.02 * reach));
    out.push_back(std::move(c));
  }
  return out;
}

double Environment::engagement(const AudienceState& audience, std::span<const double> x) const {
  if (x.size() != audience.theta.size()) {
    throw DimensionError("engagement: feature dimension " + std::to_string(x.size()) +
                         " does not match audience dimension " +
                         std::to_string(audience.theta.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("respond: non-finite feature");
  }
  const double dot = linalg::dot(audience.theta, x);
  if (params_.link == ResponseLink::Linear) {
    return std::clamp(0.5 + 0.25 * dot, 0.0, 1.0);
  }
  const double norm = std::sqrt(linalg::dot(x, x));
  const double s = norm > 0.0 ? dot / norm : 0.0;
  return 1.0 / (1.0 + std::exp(-s));
}

ResponseSet Environment::respond(const AudienceState& audience,
                                 std::span<const FeatureVector> candidates, std::size_t chosen,
                                 bool followed_poster, Rng& rng) const {
  if (chosen >= candidates.size()) throw std::invalid_argument("respond: chosen index out of range");
  const auto& r = params_.rates;
  const bool mean_only = params_.expectation_mode;

  auto poisson = [&](double rate) {
    return mean_only ? rate : static_cast<double>(rng.poisson(rate));
  };
  auto bernoulli = [&](double p) {
    return mean_only ? p : (rng.bernoulli(p) ? 1.0 : 0.0);
  };

  ResponseSet out;
  {
    const double g = engagement(audience, candidates[chosen]);
    const double favorites = poisson(r.favorite * g);
    const double retweets = poisson(r.retweet * g);
    const double poster = poisson(r.poster * g);
    double delta_agent = bernoulli(r.p_gain * g);
    delta_agent -= bernoulli(r.p_unfollow);
    if (followed_poster) delta_agent += bernoulli(r.p_reciprocal);
    out.chosen = OutcomeObservation::chosen(delta_agent, poster, favorites, retweets);
  }
  out.unchosen.reserve(candidates.size() - 1);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i == chosen) continue;
    const double g = engagement(audience, candidates[i]);
    const double favorites = poisson(r.favorite * g);
    const double retweets = poisson(r.retweet * g);
    const double poster = poisson(r.poster * g);
    out.unchosen.push_back(OutcomeObservation::unchosen(poster, favorites, retweets));
  }
  return out;
}

void Environment::drift_step(AudienceState& audience, Rng& rng) const {
  ++audience.round;
  const auto& cps = params_.changepoints;
  if (std::find(cps.begin(), cps.end(), audience.round) != cps.end()) {
    audience.theta = random_direction(dimension_, params_.theta_scale, rng);
    const auto u = random_direction(dimension_, 1.0, rng);
    for (std::size_t i = 0; i < dimension_; ++i) audience.theta[i] += params_.heterogeneity * u[i];
    return;
  }
  if (params_.drift_sigma == 0.0) return;
  const double step = params_.drift_sigma / std::sqrt(static_cast<double>(dimension_));
  for (double& t : audience.theta) t += step * rng.normal();
}

// ---------------------------------------------------------------------------

ReplayReader::ReplayReader(const std::filesystem::path& path, std::size_t expected_dimension)
    : in_(path), expected_dimension_(expected_dimension) {
  if (!in_) throw ParseError("cannot open log file " + path.string(), 0);
}

std::optional<RoundRecord> ReplayReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    RoundRecord record;
    try {
      record = parse_record(line);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_);
    }
    if (expected_dimension_ != 0) {
      for (const auto& x : record.features) {
        if (x.size() != expected_dimension_) {
          throw ParseError("feature dimension " + std::to_string(x.size()) +
                               " does not match configured dimension " +
                               std::to_string(expected_dimension_),
                           line_);
        }
      }
    }
    return record;
  }
  return std::nullopt;
}

}  // namespace flocksim
