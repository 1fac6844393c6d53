#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "flocksim/estimators.hpp"
#include "flocksim/harness.hpp"

namespace flocksim {

/// z_i = (v_i - mean) / stddev with the population stddev. Throws
/// std::invalid_argument("zero variance") for (near-)constant input and for
/// fewer than two values.
std::vector<double> normalize_series(std::span<const double> values);

enum class AnalysisTarget { Reward, Followers };

/// Chosen-candidate features against the logged reward (or follower change),
/// chronological, targets normalized over the whole series.
Dataset analysis_rows(const AgentSeries& series, AnalysisTarget target);

/// Default offline fitter: ridge with lambda = 1e-3.
Fitter default_fitter();

double mean_squared_error(const Hypothesis& h, const Dataset& test);

/// Fits on the first floor(n * train_frac) rows and returns the MSE on the rest.
double holdout_mse(const Dataset& rows, double train_frac, const Fitter& fitter);

struct ChunkedMse {
  std::vector<double> chunk_mse;
  double median = 0.0;
};

/// Splits the rows into floor(n / chunk_size) consecutive chunks (the
/// remainder is dropped) and scores each with holdout_mse.
ChunkedMse chunked_mse(const Dataset& rows, std::size_t chunk_size = 100, double train_frac = 0.75,
                       const Fitter& fitter = default_fitter());

/// Fits on the first `train_n` rows and reports the MSE of each following
/// block of `day_len` rows (a trailing partial block is kept).
std::vector<double> drift_curve(const Dataset& rows, std::size_t train_n = 100,
                                std::size_t day_len = 24, const Fitter& fitter = default_fitter());

struct PooledComparison {
  std::vector<double> per_agent_mse;
  double per_agent_median = 0.0;
  double pooled_mse = 0.0;          // every agent's rows together
  double pooled_window_mse = 0.0;   // mean over moving windows of per_agent_n rows
  std::size_t pooled_rows = 0;
  std::size_t windows = 0;
};

/// Per-agent versus pooled accuracy on each agent's first `per_agent_n` rows.
/// Targets are normalized once over all selected rows. The pooled set is
/// ordered by round (agents in input order within a round); windows of
/// `per_agent_n` rows slide over it by `window_stride` rows (0 means
/// per_agent_n / 4). Every fit uses the `train_frac` holdout split.
PooledComparison pooled_vs_per_agent(std::span<const AgentSeries> agents, std::size_t per_agent_n,
                                     const Fitter& fitter = default_fitter(),
                                     AnalysisTarget target = AnalysisTarget::Reward,
                                     double train_frac = 0.75, std::size_t window_stride = 0);

struct DispersionPoint {
  std::int64_t round = 0;
  std::vector<double> median;  // per coordinate, across agents
  std::vector<double> stddev;  // per coordinate, across agents (sample)
  double mean_stddev = 0.0;    // average of `stddev`
};

/// Cross-agent spread of committed GE hypotheses at each commit round shared
/// by all agents.
std::vector<DispersionPoint> weight_dispersion(std::span<const AgentSeries> ge_logs);

}  // namespace flocksim
