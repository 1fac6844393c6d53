#include "flocksim/record_io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "flocksim/error.hpp"
#include "json.hpp"

namespace flocksim {

using nlohmann::json;

namespace {

void put_real(std::string& out, double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("cannot serialize non-finite value");
  if (v == 0.0) {
    out += '0';
    return;
  }
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

void put_int(std::string& out, long long v) {
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

void put_string(std::string& out, const std::string& s) { out += json(s).dump(); }

void put_reals(std::string& out, const std::vector<double>& values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    put_real(out, values[i]);
  }
  out += ']';
}

}  // namespace

void append_record_json(std::string& out, const RoundRecord& r) {
  out += "{\"agent_id\":";
  put_string(out, r.agent_id);
  out += ",\"group\":\"";
  out += to_string(r.group);
  out += "\",\"round\":";
  put_int(out, r.round_index);
  out += ",\"chosen\":";
  put_int(out, static_cast<long long>(r.chosen));
  out += ",\"followed_poster\":";
  out += r.followed_poster ? "true" : "false";
  out += ",\"reward\":";
  put_real(out, r.reward);
  out += ",\"followers\":";
  put_real(out, r.followers);
  out += ",\"outcome\":[";
  put_real(out, r.outcome.delta_agent_followers);
  out += ',';
  put_real(out, r.outcome.delta_poster_followers);
  out += ',';
  put_real(out, r.outcome.favorites);
  out += ',';
  put_real(out, r.outcome.retweets);
  out += "],\"adviser_rewards\":";
  put_reals(out, r.adviser_rewards);
  out += ",\"adviser_outcomes\":[";
  for (std::size_t i = 0; i < r.adviser_outcomes.size(); ++i) {
    const auto& o = r.adviser_outcomes[i];
    if (i) out += ',';
    out += '[';
    put_real(out, o.delta_poster_followers);
    out += ',';
    put_real(out, o.favorites);
    out += ',';
    put_real(out, o.retweets);
    out += ']';
  }
  out += "],\"features\":[";
  for (std::size_t i = 0; i < r.features.size(); ++i) {
    if (i) out += ',';
    put_reals(out, r.features[i]);
  }
  out += ']';
  if (r.committed_weights) {
    out += ",\"weights\":";
    put_reals(out, *r.committed_weights);
  }
  if (!r.events.empty()) {
    out += ",\"events\":[";
    for (std::size_t i = 0; i < r.events.size(); ++i) {
      if (i) out += ',';
      put_string(out, r.events[i]);
    }
    out += ']';
  }
  out += "}\n";
}

std::string record_to_json(const RoundRecord& record) {
  std::string out;
  append_record_json(out, record);
  return out;
}

namespace {

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(std::string("missing field '") + key + "'", 0);
  return *it;
}

double real_of(const json& v, const char* what) {
  if (!v.is_number()) throw ParseError(std::string(what) + " must be a number", 0);
  return v.get<double>();
}

std::vector<double> reals_of(const json& v, const char* what) {
  if (!v.is_array()) throw ParseError(std::string(what) + " must be an array", 0);
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(real_of(e, what));
  return out;
}

}  // namespace

RoundRecord parse_record(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0);
  }
  if (!doc.is_object()) throw ParseError("record must be a JSON object", 0);

  RoundRecord r;
  try {
    r.agent_id = field(doc, "agent_id").get<std::string>();
    r.group = parse_group(field(doc, "group").get<std::string>());
    r.round_index = field(doc, "round").get<std::int64_t>();
    r.chosen = field(doc, "chosen").get<std::size_t>();
    r.followed_poster = field(doc, "followed_poster").get<bool>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad header field: ") + e.what(), 0);
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), 0);
  }
  r.reward = real_of(field(doc, "reward"), "reward");
  r.followers = real_of(field(doc, "followers"), "followers");

  const auto outcome = reals_of(field(doc, "outcome"), "outcome");
  if (outcome.size() != 4) throw ParseError("outcome must have 4 entries", 0);
  r.outcome = OutcomeObservation::chosen(outcome[0], outcome[1], outcome[2], outcome[3]);

  r.adviser_rewards = reals_of(field(doc, "adviser_rewards"), "adviser_rewards");
  const json& adv = field(doc, "adviser_outcomes");
  if (!adv.is_array()) throw ParseError("adviser_outcomes must be an array", 0);
  for (const auto& o : adv) {
    const auto v = reals_of(o, "adviser_outcomes entry");
    if (v.size() != 3) throw ParseError("adviser_outcomes entries must have 3 entries", 0);
    r.adviser_outcomes.push_back(OutcomeObservation::unchosen(v[0], v[1], v[2]));
  }

  const json& features = field(doc, "features");
  if (!features.is_array() || features.empty()) {
    throw ParseError("features must be a non-empty array", 0);
  }
  for (const auto& f : features) r.features.push_back(reals_of(f, "features row"));
  const std::size_t width = r.features.front().size();
  for (const auto& f : r.features) {
    if (f.size() != width) throw ParseError("feature rows have different widths", 0);
  }
  if (r.chosen >= r.features.size()) throw ParseError("chosen index out of range", 0);
  if (r.adviser_outcomes.size() + 1 != r.features.size() ||
      r.adviser_rewards.size() != r.adviser_outcomes.size()) {
    throw ParseError("adviser entries must cover every unchosen candidate", 0);
  }

  if (auto it = doc.find("weights"); it != doc.end()) r.committed_weights = reals_of(*it, "weights");
  if (auto it = doc.find("events"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("events must be an array", 0);
    for (const auto& e : *it) {
      if (!e.is_string()) throw ParseError("events entries must be strings", 0);
      r.events.push_back(e.get<std::string>());
    }
  }
  return r;
}

}  // namespace flocksim
