#include "flocksim/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flocksim/analysis.hpp"
#include "flocksim/environment.hpp"
#include "flocksim/error.hpp"
#include "flocksim/features.hpp"
#include "flocksim/harness.hpp"
#include "flocksim/policies.hpp"
#include "flocksim/stats.hpp"
#include "json.hpp"

namespace flocksim {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kBadInput = 2;

/// Thrown for input problems that map to exit code 2.
struct InputError : Error {
  using Error::Error;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* v = std::getenv("FLOCKSIM_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long s = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument("trailing characters");
    return s;
  } catch (const std::exception&) {
    throw InputError(std::string("FLOCKSIM_SEED is not an unsigned integer: ") + v);
  }
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "run";
  std::optional<std::int64_t> rounds;
  std::optional<int> threads;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  ExperimentConfig config;
  try {
    config = load_config(args.config);
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
  if (args.seed) {
    config.master_seed = *args.seed;
  } else if (auto env_seed = seed_from_env()) {
    config.master_seed = *env_seed;
  }
  if (args.rounds) config.rounds = *args.rounds;
  if (args.threads) config.threads = *args.threads;
  try {
    config = validate_config(config);
  } catch (const ConfigError& e) {
    throw InputError(std::string("invalid config: ") + e.what());
  }

  RunOptions options;
  options.out_dir = args.out;
  const ExperimentResult result = run_experiment(config, options);

  out << "group  agents  mean_followers  median_followers\n";
  for (Group g : config.groups) {
    const auto finals = final_followers(result, g);
    char line[128];
    std::snprintf(line, sizeof line, "%-5s  %6zu  %14.3f  %16.3f\n",
                  std::string(to_string(g)).c_str(), finals.size(), mean(finals), median(finals));
    out << line;
  }
  const auto has = [&](Group g) {
    return std::find(config.groups.begin(), config.groups.end(), g) != config.groups.end();
  };
  if (has(Group::UR) && config.agents_per_group >= 2) {
    const auto ur = final_followers(result, Group::UR);
    for (Group g : {Group::GE, Group::BE}) {
      if (!has(g)) continue;
      try {
        const auto t = one_sided_t_test(ur, final_followers(result, g));
        out << to_string(g) << " > UR: t = " << fmt(t.t) << ", p = " << fmt(t.p) << "\n";
      } catch (const std::invalid_argument& e) {
        out << to_string(g) << " > UR: " << e.what() << "\n";
      }
    }
  }
  out << "logs written to " << args.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string logs;
  std::string out;
  std::string target = "reward";
  std::string fitter = "ridge";
  double lambda = 1e-3;
  std::size_t dim = 0;
  std::string group;
  // drift
  std::size_t train_n = 100;
  std::size_t day_len = 24;
  // chunks
  std::vector<std::size_t> chunk_sizes{100};
  double train_frac = 0.75;
  // pooled
  std::size_t per_agent_n = 100;
  std::size_t stride = 0;
  // ttest
  std::string groups = "UR,GE";
};

std::vector<AgentSeries> load_for_analysis(const AnalyzeArgs& args) {
  std::vector<AgentSeries> logs;
  try {
    logs = load_log_dir(args.logs, args.dim);
  } catch (const ParseError& e) {
    throw InputError(e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  if (!args.group.empty()) {
    Group g;
    try {
      g = parse_group(args.group);
    } catch (const ConfigError& e) {
      throw InputError(e.what());
    }
    std::erase_if(logs, [g](const AgentSeries& s) { return s.group != g; });
    if (logs.empty()) throw InputError("no logs for group " + args.group);
  }
  return logs;
}

AnalysisTarget parse_target(const std::string& name) {
  if (name == "reward") return AnalysisTarget::Reward;
  if (name == "followers") return AnalysisTarget::Followers;
  throw InputError("--target must be reward or followers");
}

Fitter parse_fitter(const AnalyzeArgs& args) {
  try {
    return make_fitter({FitterSpec::parse_kind(args.fitter), args.lambda});
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

fs::path output_dir(const AnalyzeArgs& args) {
  fs::path dir = args.out.empty() ? fs::path(args.logs) : fs::path(args.out);
  fs::create_directories(dir);
  return dir;
}

int analyze_drift(const AnalyzeArgs& args, std::ostream& out) {
  const auto logs = load_for_analysis(args);
  const auto target = parse_target(args.target);
  const auto fitter = parse_fitter(args);
  const fs::path dir = output_dir(args);

  std::string csv = "agent_id,day,mse\n";
  ordered_json agents = ordered_json::array();
  std::vector<double> correlations;
  for (const auto& s : logs) {
    if (s.size() <= args.train_n) continue;
    const auto curve = drift_curve(analysis_rows(s, target), args.train_n, args.day_len, fitter);
    std::vector<double> days(curve.size());
    for (std::size_t d = 0; d < curve.size(); ++d) {
      days[d] = static_cast<double>(d);
      csv += s.agent_id + "," + std::to_string(d) + "," + fmt(curve[d]) + "\n";
    }
    const double rho = curve.size() >= 2 ? spearman_correlation(days, curve) : 0.0;
    correlations.push_back(rho);
    agents.push_back({{"agent_id", s.agent_id}, {"spearman", rho}, {"mse", curve}});
  }
  if (agents.empty()) throw InputError("no agent has more than --train-n rows");
  write_text(dir / "drift_curve.csv", csv);
  const double med = median(correlations);
  ordered_json summary = {{"train_n", args.train_n},
                          {"day_len", args.day_len},
                          {"median_spearman", med},
                          {"agents", agents}};
  write_text(dir / "drift_summary.json", summary.dump(2) + "\n");
  out << "median Spearman(day, mse) over " << correlations.size() << " agents: " << fmt(med) << "\n";
  out << "wrote " << (dir / "drift_curve.csv").string() << "\n";
  return kOk;
}

int analyze_chunks(const AnalyzeArgs& args, std::ostream& out) {
  const auto logs = load_for_analysis(args);
  const auto target = parse_target(args.target);
  const auto fitter = parse_fitter(args);
  const fs::path dir = output_dir(args);

  std::string csv = "agent_id,chunk_size,chunk,mse\n";
  ordered_json sweep = ordered_json::array();
  for (std::size_t chunk : args.chunk_sizes) {
    std::vector<double> medians;
    std::vector<double> full;
    for (const auto& s : logs) {
      if (s.size() < chunk) continue;
      const Dataset rows = analysis_rows(s, target);
      const auto result = chunked_mse(rows, chunk, args.train_frac, fitter);
      for (std::size_t c = 0; c < result.chunk_mse.size(); ++c) {
        csv += s.agent_id + "," + std::to_string(chunk) + "," + std::to_string(c) + "," +
               fmt(result.chunk_mse[c]) + "\n";
      }
      medians.push_back(result.median);
      full.push_back(holdout_mse(rows, args.train_frac, fitter));
    }
    if (medians.empty()) continue;
    const double chunked = median(medians);
    const double all = median(full);
    sweep.push_back({{"chunk_size", chunk},
                     {"agents", medians.size()},
                     {"median_chunk_mse", chunked},
                     {"median_full_mse", all}});
    out << "chunk " << chunk << ": median chunk MSE " << fmt(chunked) << ", all-data MSE "
        << fmt(all) << "\n";
  }
  if (sweep.empty()) throw InputError("no agent has a full chunk of rows");
  write_text(dir / "chunked_mse.csv", csv);
  ordered_json summary = {{"train_frac", args.train_frac}, {"sweep", sweep}};
  write_text(dir / "chunks_summary.json", summary.dump(2) + "\n");
  return kOk;
}

int analyze_pooled(const AnalyzeArgs& args, std::ostream& out) {
  const auto logs = load_for_analysis(args);
  const auto target = parse_target(args.target);
  const auto fitter = parse_fitter(args);
  const fs::path dir = output_dir(args);

  PooledComparison result;
  try {
    result = pooled_vs_per_agent(logs, args.per_agent_n, fitter, target, args.train_frac, args.stride);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  std::string csv = "metric,value\n";
  csv += "per_agent_median," + fmt(result.per_agent_median) + "\n";
  csv += "pooled_all," + fmt(result.pooled_mse) + "\n";
  csv += "pooled_window," + fmt(result.pooled_window_mse) + "\n";
  for (std::size_t i = 0; i < logs.size(); ++i) {
    csv += "agent:" + logs[i].agent_id + "," + fmt(result.per_agent_mse[i]) + "\n";
  }
  write_text(dir / "pooled.csv", csv);
  ordered_json summary = {{"per_agent_n", args.per_agent_n},
                          {"pooled_rows", result.pooled_rows},
                          {"windows", result.windows},
                          {"per_agent_median", result.per_agent_median},
                          {"pooled_all", result.pooled_mse},
                          {"pooled_window", result.pooled_window_mse}};
  write_text(dir / "pooled_summary.json", summary.dump(2) + "\n");
  out << "per-agent median MSE " << fmt(result.per_agent_median) << ", pooled ("
      << result.pooled_rows << " rows) " << fmt(result.pooled_mse) << ", pooled window "
      << fmt(result.pooled_window_mse) << "\n";
  return kOk;
}

int analyze_dispersion(const AnalyzeArgs& args, std::ostream& out) {
  auto logs = load_for_analysis(args);
  std::erase_if(logs, [](const AgentSeries& s) { return s.group != Group::GE; });
  const fs::path dir = output_dir(args);
  std::vector<DispersionPoint> points;
  try {
    points = weight_dispersion(logs);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  std::string csv = "round,coordinate,median,stddev\n";
  ordered_json series = ordered_json::array();
  for (const auto& p : points) {
    for (std::size_t j = 0; j < p.stddev.size(); ++j) {
      csv += std::to_string(p.round) + "," + std::to_string(j) + "," + fmt(p.median[j]) + "," +
             fmt(p.stddev[j]) + "\n";
    }
    series.push_back({{"round", p.round}, {"mean_stddev", p.mean_stddev}});
  }
  write_text(dir / "dispersion.csv", csv);
  ordered_json summary = {{"agents", logs.size()},
                          {"initial_mean_stddev", points.front().mean_stddev},
                          {"final_mean_stddev", points.back().mean_stddev},
                          {"series", series}};
  write_text(dir / "dispersion_summary.json", summary.dump(2) + "\n");
  out << "mean weight stddev across " << logs.size() << " GE agents: first commit "
      << fmt(points.front().mean_stddev) << ", last commit " << fmt(points.back().mean_stddev)
      << "\n";
  return kOk;
}

int analyze_ttest(const AnalyzeArgs& args, std::ostream& out) {
  const auto logs = load_for_analysis(args);
  const auto comma = args.groups.find(',');
  if (comma == std::string::npos) throw InputError("--groups expects A,B");
  Group a, b;
  try {
    a = parse_group(args.groups.substr(0, comma));
    b = parse_group(args.groups.substr(comma + 1));
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
  const auto fa = final_followers(logs, a);
  const auto fb = final_followers(logs, b);
  TTestResult t;
  try {
    t = one_sided_t_test(fa, fb);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  out << "H1: mean(" << to_string(b) << ") > mean(" << to_string(a) << ")\n";
  out << "t = " << fmt(t.t) << "\ndf = " << fmt(t.df) << "\np = " << fmt(t.p) << "\n";
  if (!args.out.empty()) {
    const fs::path dir = output_dir(args);
    ordered_json summary = {{"group_a", std::string(to_string(a))},
                            {"group_b", std::string(to_string(b))},
                            {"mean_a", mean(fa)},
                            {"mean_b", mean(fb)},
                            {"t", t.t},
                            {"df", t.df},
                            {"p", t.p}};
    write_text(dir / "ttest.json", summary.dump(2) + "\n");
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// replay

struct ReplayArgs {
  std::string log;
  std::string policy;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t dim = 0;
  std::optional<double> epsilon;
  std::string out;
};

int cmd_replay(const ReplayArgs& args, std::ostream& out) {
  ExperimentConfig config;
  if (!args.config.empty()) {
    try {
      config = validate_config(load_config(args.config));
    } catch (const ConfigError& e) {
      throw InputError(e.what());
    }
  }
  Group kind;
  try {
    kind = parse_group(args.policy);
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
  const std::size_t dim = args.dim != 0 ? args.dim : static_cast<std::size_t>(config.feature_dim);
  config.feature_dim = static_cast<int>(dim);
  const double epsilon = args.epsilon.value_or(config.epsilon);
  std::uint64_t seed = config.master_seed;
  if (args.seed) {
    seed = *args.seed;
  } else if (auto env_seed = seed_from_env()) {
    seed = *env_seed;
  }

  Policy policy(kind, PolicyParams::from_config(config));
  Rng rng(derive_seed(seed, "replay", args.policy));

  std::size_t rounds = 0;
  std::size_t matched = 0;
  double squared_error = 0.0;
  std::map<std::size_t, std::size_t> selections;
  try {
    ReplayReader reader(args.log, dim);
    while (auto record = reader.next()) {
      ++rounds;
      const std::size_t choice = policy.select_action(record->features, epsilon, rng);
      ++selections[choice];
      if (choice != record->chosen) continue;
      ++matched;
      const double predicted = predict(policy.committed(), record->features[choice]);
      squared_error += (record->reward - predicted) * (record->reward - predicted);
      policy.observe_outcome(*record);
    }
  } catch (const ParseError& e) {
    throw InputError(e.what());
  }

  const double mse = matched > 0 ? squared_error / static_cast<double>(matched) : 0.0;
  out << "rounds " << rounds << "\nmatched " << matched << "\nmatched_mse " << fmt(mse) << "\n";
  out << "selections";
  for (const auto& [index, count] : selections) out << " " << index << ":" << count;
  out << "\n";
  if (!args.out.empty()) {
    ordered_json hist = ordered_json::object();
    for (const auto& [index, count] : selections) hist[std::to_string(index)] = count;
    ordered_json summary = {{"policy", args.policy},
                            {"rounds", rounds},
                            {"matched", matched},
                            {"matched_mse", mse},
                            {"selections", hist}};
    write_text(args.out, summary.dump(2) + "\n");
  }
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"flocksim: contextual-bandit follower acquisition simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the multi-agent experiment");
  simulate->add_option("--config", sim.config, "Experiment config (JSON)")->required();
  simulate->add_option("--seed", sim.seed, "Master seed (overrides config and FLOCKSIM_SEED)");
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();
  simulate->add_option("--rounds", sim.rounds, "Override the number of rounds");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Offline analyses over round logs");
  analyze->require_subcommand(1);
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--logs", an.logs, "Directory with agent_*.jsonl logs")->required();
    cmd->add_option("--out", an.out, "Output directory (default: the log directory)");
    cmd->add_option("--group", an.group, "Only use agents of this group (UR, GE, BE)");
    cmd->add_option("--dim", an.dim, "Expected feature dimension (0 = any)");
  };
  auto add_fit = [&](CLI::App* cmd) {
    cmd->add_option("--target", an.target, "reward or followers")->capture_default_str();
    cmd->add_option("--fitter", an.fitter, "ridge, lasso or ols")->capture_default_str();
    cmd->add_option("--lambda", an.lambda, "Regularization strength")->capture_default_str();
  };
  auto* drift = analyze->add_subcommand("drift", "MSE per day of a model trained on early rounds");
  add_common(drift);
  add_fit(drift);
  drift->add_option("--train-n", an.train_n, "Training rows")->capture_default_str();
  drift->add_option("--day-len", an.day_len, "Rounds per day")->capture_default_str();
  auto* chunks = analyze->add_subcommand("chunks", "Chunked versus all-data holdout MSE");
  add_common(chunks);
  add_fit(chunks);
  chunks->add_option("--chunk-size", an.chunk_sizes, "Chunk size; repeat or comma-separate to sweep")
      ->delimiter(',')
      ->capture_default_str();
  chunks->add_option("--train-frac", an.train_frac, "Training fraction")->capture_default_str();
  auto* pooled = analyze->add_subcommand("pooled", "Per-agent versus pooled MSE");
  add_common(pooled);
  add_fit(pooled);
  pooled->add_option("--per-agent-n", an.per_agent_n, "Rows per agent")->capture_default_str();
  pooled->add_option("--train-frac", an.train_frac, "Training fraction")->capture_default_str();
  pooled->add_option("--stride", an.stride, "Window stride (0 = per-agent-n / 4)");
  auto* dispersion = analyze->add_subcommand("dispersion", "Cross-agent spread of GE weights");
  add_common(dispersion);
  auto* ttest = analyze->add_subcommand("ttest", "One-sided Welch t-test on final followers");
  add_common(ttest);
  ttest->add_option("--groups", an.groups, "A,B tests mean(B) > mean(A)")->capture_default_str();

  ReplayArgs rp;
  auto* replay = app.add_subcommand("replay", "Replay a logged run through a fresh policy");
  replay->add_option("--log", rp.log, "JSONL log file")->required();
  replay->add_option("--policy", rp.policy, "UR, GE or BE")->required();
  replay->add_option("--config", rp.config, "Config supplying policy parameters");
  replay->add_option("--seed", rp.seed, "Seed for the replayed policy");
  replay->add_option("--dim", rp.dim, "Feature dimension (default: config)");
  replay->add_option("--epsilon", rp.epsilon, "Exploration rate (default: config)");
  replay->add_option("--out", rp.out, "Write a JSON report here");

  std::size_t schema_dim = 87;
  bool schema_collinear = false;
  auto* schema = app.add_subcommand("schema", "Print the feature schema as JSON");
  schema->add_option("--dim", schema_dim, "Feature dimension")->capture_default_str();
  schema->add_flag("--collinear", schema_collinear, "Append the duplicated text-length slot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (const CLI::App* sub : app.get_subcommands()) {
      failing = sub;
      for (const CLI::App* nested : sub->get_subcommands()) failing = nested;
    }
    err << failing->help();
    return kBadInput;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (drift->parsed()) return analyze_drift(an, out);
    if (chunks->parsed()) return analyze_chunks(an, out);
    if (pooled->parsed()) return analyze_pooled(an, out);
    if (dispersion->parsed()) return analyze_dispersion(an, out);
    if (ttest->parsed()) return analyze_ttest(an, out);
    if (replay->parsed()) return cmd_replay(rp, out);
    if (schema->parsed()) {
      out << FeatureSchema::standard(schema_dim, schema_collinear).to_json() << "\n";
      return kOk;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  err << app.help();
  return kBadInput;
}

}  // namespace flocksim
