#include "flocksim/domain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "flocksim/error.hpp"
#include "flocksim/features.hpp"
#include "json.hpp"

namespace flocksim {

using nlohmann::json;

std::string_view to_string(Group group) noexcept {
  switch (group) {
    case Group::UR: return "UR";
    case Group::GE: return "GE";
    case Group::BE: return "BE";
  }
  return "?";
}

Group parse_group(std::string_view text) {
  if (text == "UR") return Group::UR;
  if (text == "GE") return Group::GE;
  if (text == "BE") return Group::BE;
  throw ConfigError("unknown group '" + std::string(text) + "' (expected UR, GE or BE)");
}

std::string_view to_string(ResponseLink link) noexcept {
  return link == ResponseLink::Logistic ? "logistic" : "linear";
}

std::string_view to_string(BatchFitter fitter) noexcept {
  return fitter == BatchFitter::Ols ? "ols" : "ridge";
}

OutcomeObservation OutcomeObservation::chosen(double delta_agent, double delta_poster,
                                              double favorites, double retweets) {
  return {delta_agent, delta_poster, favorites, retweets, true};
}

OutcomeObservation OutcomeObservation::unchosen(double delta_poster, double favorites,
                                                double retweets) {
  return {0.0, delta_poster, favorites, retweets, false};
}

namespace {

bool finite(double v) { return std::isfinite(v); }

bool unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

void require(bool ok, const char* message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

ExperimentConfig validate_config(const ExperimentConfig& config) {
  require(config.agents_per_group >= 1, "agents_per_group must be at least 1");
  require(!config.groups.empty(), "groups must not be empty");
  {
    std::set<Group> seen(config.groups.begin(), config.groups.end());
    require(seen.size() == config.groups.size(), "groups must not repeat");
  }
  require(config.rounds >= 0, "rounds must be non-negative");
  require(config.actions_per_round >= 2, "actions_per_round must be at least 2");
  const int min_dim =
      static_cast<int>(kNamedFeatureCount) + (config.collinear_feature ? 1 : 0);
  if (config.feature_dim < min_dim) {
    throw ConfigError("feature_dim must be at least " + std::to_string(min_dim));
  }
  require(finite(config.epsilon) && unit_interval(config.epsilon), "epsilon out of range");
  require(finite(config.eta) && config.eta > 0.0, "eta must be positive");
  require(config.commit_interval >= 1, "commit_interval must be at least 1");
  require(unit_interval(config.follow_probability), "follow_probability out of range");
  require(config.alpha.size() == 4, "alpha must have 4 coefficients");
  require(std::all_of(config.alpha.begin(), config.alpha.end(), finite),
          "alpha coefficients must be finite");
  require(config.beta.size() == 3, "beta must have 3 coefficients");
  require(std::all_of(config.beta.begin(), config.beta.end(), finite),
          "beta coefficients must be finite");
  require(unit_interval(config.adviser_blend), "adviser_blend out of range");
  require(finite(config.adviser_lambda) && config.adviser_lambda > 0.0,
          "adviser_lambda must be positive");
  require(finite(config.be_lambda) && config.be_lambda > 0.0, "be_lambda must be positive");
  require(config.max_text_length >= 1, "max_text_length must be at least 1");
  require(config.threads >= 0, "threads must be non-negative");
  require(std::all_of(config.checkpoints.begin(), config.checkpoints.end(),
                      [](std::int64_t c) { return c >= 0; }),
          "checkpoints must be non-negative");

  const auto& env = config.environment;
  require(finite(env.drift_sigma) && env.drift_sigma >= 0.0,
          "environment.drift_sigma must be non-negative");
  require(finite(env.heterogeneity) && env.heterogeneity >= 0.0,
          "environment.heterogeneity must be non-negative");
  require(finite(env.theta_scale) && env.theta_scale >= 0.0,
          "environment.theta_scale must be non-negative");
  const auto& r = env.rates;
  require(finite(r.favorite) && r.favorite >= 0.0, "rates.favorite must be non-negative");
  require(finite(r.retweet) && r.retweet >= 0.0, "rates.retweet must be non-negative");
  require(finite(r.poster) && r.poster >= 0.0, "rates.poster must be non-negative");
  require(unit_interval(r.p_gain), "rates.p_gain out of range");
  require(unit_interval(r.p_unfollow), "rates.p_unfollow out of range");
  require(unit_interval(r.p_reciprocal), "rates.p_reciprocal out of range");
  require(!env.topic.empty(), "environment.topic must not be empty");
  return config;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

/// Reads keys off a JSON object, remembering which ones were consumed so that
/// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string prefix)
      : object_(object), prefix_(std::move(prefix)) {
    if (!object_.is_object()) throw ConfigError(prefix_ + " must be a JSON object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    consumed_.insert(key);
    auto it = object_.find(key);
    if (it == object_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError("invalid value for " + prefix_ + key);
    }
  }

  const json* child(const char* key) {
    consumed_.insert(key);
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : object_.items()) {
      if (!consumed_.count(key)) throw ConfigError("unknown config key " + prefix_ + key);
    }
  }

 private:
  const json& object_;
  std::string prefix_;
  std::set<std::string> consumed_;
};

}  // namespace

ExperimentConfig config_from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig config;
  ObjectReader top(doc, "");
  top.read("master_seed", config.master_seed);
  top.read("agents_per_group", config.agents_per_group);
  if (const json* groups = top.child("groups")) {
    if (!groups->is_array()) throw ConfigError("groups must be an array");
    config.groups.clear();
    for (const auto& g : *groups) {
      if (!g.is_string()) throw ConfigError("groups entries must be strings");
      config.groups.push_back(parse_group(g.get<std::string>()));
    }
  }
  top.read("rounds", config.rounds);
  top.read("actions_per_round", config.actions_per_round);
  top.read("feature_dim", config.feature_dim);
  top.read("collinear_feature", config.collinear_feature);
  top.read("epsilon", config.epsilon);
  top.read("eta", config.eta);
  top.read("commit_interval", config.commit_interval);
  top.read("follow_probability", config.follow_probability);
  top.read("alpha", config.alpha);
  top.read("beta", config.beta);
  top.read("adviser_blend", config.adviser_blend);
  top.read("adviser_lambda", config.adviser_lambda);
  if (const json* fitter = top.child("be_fitter")) {
    const std::string name = fitter->is_string() ? fitter->get<std::string>() : "";
    if (name == "ols") {
      config.be_fitter = BatchFitter::Ols;
    } else if (name == "ridge") {
      config.be_fitter = BatchFitter::Ridge;
    } else {
      throw ConfigError("be_fitter must be \"ols\" or \"ridge\"");
    }
  }
  top.read("be_lambda", config.be_lambda);
  top.read("max_text_length", config.max_text_length);
  top.read("blocked_terms", config.blocked_terms);
  top.read("threads", config.threads);
  top.read("identical_agents", config.identical_agents);
  top.read("checkpoints", config.checkpoints);

  if (const json* env_json = top.child("environment")) {
    auto& env = config.environment;
    ObjectReader er(*env_json, "environment.");
    er.read("drift_sigma", env.drift_sigma);
    er.read("heterogeneity", env.heterogeneity);
    er.read("theta_scale", env.theta_scale);
    er.read("expectation_mode", env.expectation_mode);
    er.read("changepoints", env.changepoints);
    er.read("topic", env.topic);
    if (const json* link = er.child("link")) {
      const std::string name = link->is_string() ? link->get<std::string>() : "";
      if (name == "logistic") {
        env.link = ResponseLink::Logistic;
      } else if (name == "linear") {
        env.link = ResponseLink::Linear;
      } else {
        throw ConfigError("environment.link must be \"logistic\" or \"linear\"");
      }
    }
    if (const json* rates_json = er.child("rates")) {
      ObjectReader rr(*rates_json, "environment.rates.");
      rr.read("favorite", env.rates.favorite);
      rr.read("retweet", env.rates.retweet);
      rr.read("poster", env.rates.poster);
      rr.read("p_gain", env.rates.p_gain);
      rr.read("p_unfollow", env.rates.p_unfollow);
      rr.read("p_reciprocal", env.rates.p_reciprocal);
      rr.finish();
    }
    er.finish();
  }
  top.finish();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  json groups = json::array();
  for (Group g : config.groups) groups.push_back(std::string(to_string(g)));
  const auto& env = config.environment;
  json doc = {
      {"master_seed", config.master_seed},
      {"agents_per_group", config.agents_per_group},
      {"groups", groups},
      {"rounds", config.rounds},
      {"actions_per_round", config.actions_per_round},
      {"feature_dim", config.feature_dim},
      {"collinear_feature", config.collinear_feature},
      {"epsilon", config.epsilon},
      {"eta", config.eta},
      {"commit_interval", config.commit_interval},
      {"follow_probability", config.follow_probability},
      {"alpha", config.alpha},
      {"beta", config.beta},
      {"adviser_blend", config.adviser_blend},
      {"adviser_lambda", config.adviser_lambda},
      {"be_fitter", std::string(to_string(config.be_fitter))},
      {"be_lambda", config.be_lambda},
      {"max_text_length", config.max_text_length},
      {"blocked_terms", config.blocked_terms},
      {"threads", config.threads},
      {"identical_agents", config.identical_agents},
      {"checkpoints", config.checkpoints},
      {"environment",
       {{"drift_sigma", env.drift_sigma},
        {"heterogeneity", env.heterogeneity},
        {"theta_scale", env.theta_scale},
        {"link", std::string(to_string(env.link))},
        {"expectation_mode", env.expectation_mode},
        {"changepoints", env.changepoints},
        {"topic", env.topic},
        {"rates",
         {{"favorite", env.rates.favorite},
          {"retweet", env.rates.retweet},
          {"poster", env.rates.poster},
          {"p_gain", env.rates.p_gain},
          {"p_unfollow", env.rates.p_unfollow},
          {"p_reciprocal", env.rates.p_reciprocal}}}}},
  };
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Admissibility

TextFilter accept_all_filter() {
  return [](std::string_view) { return true; };
}

namespace {
std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}
}  // namespace

TextFilter blocklist_filter(std::vector<std::string> terms) {
  for (auto& t : terms) t = ascii_lower(t);
  return [terms = std::move(terms)](std::string_view text) {
    const std::string lowered = ascii_lower(text);
    return std::none_of(terms.begin(), terms.end(), [&](const std::string& t) {
      return !t.empty() && lowered.find(t) != std::string::npos;
    });
  };
}

bool candidate_is_admissible(const TweetCandidate& candidate, const TextFilter& filter) {
  return !filter || filter(candidate.text);
}

}  // namespace flocksim
