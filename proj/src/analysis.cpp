#include "flocksim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "flocksim/stats.hpp"

namespace flocksim {

std::vector<double> normalize_series(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("zero variance: need at least two values");
  const double m = mean(values);
  const double sd = population_stddev(values);
  if (!(sd > 1e-12)) throw std::invalid_argument("zero variance");
  std::vector<double> z;
  z.reserve(values.size());
  for (double v : values) z.push_back((v - m) / sd);
  return z;
}

namespace {

const std::vector<double>& target_values(const AgentSeries& s, AnalysisTarget target) {
  return target == AnalysisTarget::Reward ? s.rewards : s.delta_followers;
}

std::size_t feature_width(const AgentSeries& s) {
  return s.chosen_features.empty() ? 0 : s.chosen_features.front().size();
}

}  // namespace

Dataset analysis_rows(const AgentSeries& series, AnalysisTarget target) {
  const auto z = normalize_series(target_values(series, target));
  Dataset rows(feature_width(series));
  for (std::size_t i = 0; i < z.size(); ++i) rows.add(series.chosen_features[i], z[i]);
  return rows;
}

Fitter default_fitter() { return make_fitter({FitterKind::Ridge, 1e-3}); }

double mean_squared_error(const Hypothesis& h, const Dataset& test) {
  if (test.empty()) throw std::invalid_argument("no test data");
  double sum = 0.0;
  for (std::size_t r = 0; r < test.size(); ++r) {
    const double e = test.y(r) - predict(h, test.x(r));
    sum += e * e;
  }
  return sum / static_cast<double>(test.size());
}

double holdout_mse(const Dataset& rows, double train_frac, const Fitter& fitter) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  const auto n_train =
      static_cast<std::size_t>(std::floor(static_cast<double>(rows.size()) * train_frac));
  if (n_train == 0) throw std::invalid_argument("no training data");
  if (n_train >= rows.size()) throw std::invalid_argument("no test data");
  const Hypothesis h = fitter(rows.slice(0, n_train));
  return mean_squared_error(h, rows.slice(n_train, rows.size()));
}

ChunkedMse chunked_mse(const Dataset& rows, std::size_t chunk_size, double train_frac,
                       const Fitter& fitter) {
  if (chunk_size == 0) throw std::invalid_argument("chunk size must be positive");
  if (rows.size() < chunk_size) {
    throw std::invalid_argument("fewer rows (" + std::to_string(rows.size()) +
                                ") than one chunk (" + std::to_string(chunk_size) + ")");
  }
  ChunkedMse out;
  const std::size_t chunks = rows.size() / chunk_size;
  for (std::size_t c = 0; c < chunks; ++c) {
    out.chunk_mse.push_back(
        holdout_mse(rows.slice(c * chunk_size, (c + 1) * chunk_size), train_frac, fitter));
  }
  out.median = median(out.chunk_mse);
  return out;
}

std::vector<double> drift_curve(const Dataset& rows, std::size_t train_n, std::size_t day_len,
                                const Fitter& fitter) {
  if (day_len == 0) throw std::invalid_argument("day length must be positive");
  if (rows.size() <= train_n) throw std::invalid_argument("no test data");
  const Hypothesis h = fitter(rows.slice(0, train_n));
  std::vector<double> curve;
  for (std::size_t begin = train_n; begin < rows.size(); begin += day_len) {
    curve.push_back(mean_squared_error(h, rows.slice(begin, begin + day_len)));
  }
  return curve;
}

PooledComparison pooled_vs_per_agent(std::span<const AgentSeries> agents, std::size_t per_agent_n,
                                     const Fitter& fitter, AnalysisTarget target,
                                     double train_frac, std::size_t window_stride) {
  if (agents.empty()) throw std::invalid_argument("pooled_vs_per_agent: no agents");
  if (per_agent_n < 2) throw std::invalid_argument("per_agent_n must be at least 2");
  for (const auto& a : agents) {
    if (a.size() < per_agent_n) {
      throw std::invalid_argument("agent " + a.agent_id + " has " + std::to_string(a.size()) +
                                  " rows, fewer than " + std::to_string(per_agent_n));
    }
  }
  const std::size_t dim = feature_width(agents.front());

  std::vector<double> raw;
  for (const auto& a : agents) {
    const auto& y = target_values(a, target);
    raw.insert(raw.end(), y.begin(), y.begin() + static_cast<std::ptrdiff_t>(per_agent_n));
  }
  const auto z = normalize_series(raw);

  PooledComparison out;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    Dataset rows(dim);
    for (std::size_t r = 0; r < per_agent_n; ++r) {
      rows.add(agents[i].chosen_features[r], z[i * per_agent_n + r]);
    }
    out.per_agent_mse.push_back(holdout_mse(rows, train_frac, fitter));
  }
  out.per_agent_median = median(out.per_agent_mse);

  // Chronological interleave: (round, agent position).
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (agent, row)
  for (std::size_t i = 0; i < agents.size(); ++i)
    for (std::size_t r = 0; r < per_agent_n; ++r) order.emplace_back(i, r);
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    return agents[a.first].rounds[a.second] < agents[b.first].rounds[b.second];
  });
  Dataset pooled(dim);
  for (const auto& [i, r] : order) pooled.add(agents[i].chosen_features[r], z[i * per_agent_n + r]);
  out.pooled_rows = pooled.size();
  out.pooled_mse = holdout_mse(pooled, train_frac, fitter);

  const std::size_t stride = window_stride == 0 ? std::max<std::size_t>(1, per_agent_n / 4) : window_stride;
  double window_sum = 0.0;
  for (std::size_t begin = 0; begin + per_agent_n <= pooled.size(); begin += stride) {
    window_sum += holdout_mse(pooled.slice(begin, begin + per_agent_n), train_frac, fitter);
    ++out.windows;
  }
  out.pooled_window_mse = window_sum / static_cast<double>(out.windows);
  return out;
}

std::vector<DispersionPoint> weight_dispersion(std::span<const AgentSeries> ge_logs) {
  if (ge_logs.size() < 2) throw std::invalid_argument("need >= 2 agents");
  std::vector<std::map<std::int64_t, const std::vector<double>*>> snapshots;
  for (const auto& s : ge_logs) {
    if (s.weight_snapshots.empty()) {
      throw std::invalid_argument("missing hypothesis snapshots for agent " + s.agent_id);
    }
    auto& m = snapshots.emplace_back();
    for (const auto& [round, w] : s.weight_snapshots) m[round] = &w;
  }

  std::vector<DispersionPoint> out;
  for (const auto& [round, first] : snapshots.front()) {
    std::vector<const std::vector<double>*> ws;
    for (const auto& m : snapshots) {
      auto it = m.find(round);
      if (it == m.end()) break;
      ws.push_back(it->second);
    }
    if (ws.size() != snapshots.size()) continue;

    DispersionPoint p;
    p.round = round;
    const std::size_t d = first->size();
    std::vector<double> column(ws.size());
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t a = 0; a < ws.size(); ++a) column[a] = ws[a]->at(j);
      p.median.push_back(median(column));
      p.stddev.push_back(std::sqrt(sample_variance(column)));
    }
    p.mean_stddev = mean(p.stddev);
    out.push_back(std::move(p));
  }
  if (out.empty()) throw std::invalid_argument("missing hypothesis snapshots: no common commit rounds");
  return out;
}

}  // namespace flocksim
