#include "slslab/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "slslab/analytics.hpp"
#include "slslab/errors.hpp"
#include "slslab/io.hpp"
#include "slslab/market.hpp"
#include "slslab/montecarlo.hpp"
#include "slslab/optimizer.hpp"
#include "slslab/trend.hpp"

namespace slslab::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using io::format_number;

const char* const kToolVersion = SLSLAB_VERSION;

// Thrown by command handlers to request a specific exit code.
struct Exit {
  int code;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) {
      ++used;
    }
    if (used == 0 || used != item.size()) {
      throw ParameterError(std::string(flag) + ": cannot parse '" + item + "' as a number");
    }
    values.push_back(v);
  }
  if (values.size() != expected) {
    throw ParameterError(std::string(flag) + " expects " + std::to_string(expected) +
                         " comma-separated values, got " + std::to_string(values.size()));
  }
  return values;
}

std::string join_numbers(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) {
      s += ',';
    }
    s += format_number(values[i]);
  }
  return s;
}

json params_json(const ControllerParams& p) {
  return {{"i01", p.i01}, {"i02", p.i02}, {"k1", p.k1}, {"k2", p.k2}, {"delta", p.delta}};
}

fs::path manifest_path_for(const fs::path& out) {
  return out.parent_path() / (out.stem().string() + ".manifest.json");
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) {
    fs::create_directories(file.parent_path());
  }
}

// ---------------------------------------------------------------------------
// Command option sets. Each struct owns the bound option values and knows how
// to echo them back as the resolved configuration.

struct ExpectOpts {
  double i01 = 0, i02 = 0, k1 = 0, k2 = 0, delta = 0, mu1 = 0, mu2 = 0;
  int n = 0;
  std::string method = "closed";
  bool json_out = false;
  std::string out;

  void add(CLI::App& app) {
    app.add_option("--i01", i01, "Initial investment, stock 1")->required();
    app.add_option("--i02", i02, "Initial investment, stock 2")->required();
    app.add_option("--k1", k1, "Feedback gain, stock 1")->required();
    app.add_option("--k2", k2, "Feedback gain, stock 2")->required();
    app.add_option("--delta", delta, "Cross-coupling coefficient, |delta| < 1")->required();
    app.add_option("--mu1", mu1, "Mean return, stock 1")->required();
    app.add_option("--mu2", mu2, "Mean return, stock 2")->required();
    app.add_option("--n", n, "Horizon N")->required();
    app.add_option("--method", method, "closed (formula) or matrix (state recursion)")
        ->check(CLI::IsMember({"closed", "matrix"}));
    app.add_flag("--json", json_out, "Print a JSON object instead of the bare value");
    app.add_option("--out", out, "Also write the JSON result (and a manifest) here");
  }

  std::map<std::string, std::string> config() const {
    std::map<std::string, std::string> c{
        {"i01", format_number(i01)}, {"i02", format_number(i02)},
        {"k1", format_number(k1)},   {"k2", format_number(k2)},
        {"delta", format_number(delta)}, {"mu1", format_number(mu1)},
        {"mu2", format_number(mu2)}, {"n", std::to_string(n)},
        {"method", method},          {"json", json_out ? "true" : "false"}};
    if (!out.empty()) {
      c["out"] = out;
    }
    return c;
  }
};

struct RiskOpts {
  std::string params;
  double mu1 = 0.023374, mu2 = 0.031014, var1 = 8.3333e-3, var2 = 16.333e-3, cov12 = 0.0;
  int n = 30;

  void add(CLI::App& app) {
    app.add_option("--params", params, "i01,i02,k1,k2,delta")->required();
    app.add_option("--mu1", mu1, "Mean return, stock 1")->capture_default_str();
    app.add_option("--mu2", mu2, "Mean return, stock 2")->capture_default_str();
    app.add_option("--var1", var1, "Return variance, stock 1")->capture_default_str();
    app.add_option("--var2", var2, "Return variance, stock 2")->capture_default_str();
    app.add_option("--cov12", cov12, "Return covariance")->capture_default_str();
    app.add_option("--n", n, "Horizon N")->capture_default_str();
  }
};

struct FrontierOpts {
  double mu1 = 0.023374, mu2 = 0.031014, var1 = 8.3333e-3, var2 = 16.333e-3, cov12 = 0.0;
  int n = 30;
  std::size_t candidates = 5000;
  std::uint64_t seed = 1;
  double g_target = 2.0;
  std::string out_dir;

  void add(CLI::App& app) {
    app.add_option("--mu1", mu1, "Mean return, stock 1")->capture_default_str();
    app.add_option("--mu2", mu2, "Mean return, stock 2")->capture_default_str();
    app.add_option("--var1", var1, "Return variance, stock 1")->capture_default_str();
    app.add_option("--var2", var2, "Return variance, stock 2")->capture_default_str();
    app.add_option("--cov12", cov12, "Return covariance")->capture_default_str();
    app.add_option("--n", n, "Horizon N")->capture_default_str();
    app.add_option("--candidates", candidates, "Number of random designs")->capture_default_str();
    app.add_option("--seed", seed, "Search seed")->capture_default_str();
    app.add_option("--g-target", g_target, "Required expected gain G")->capture_default_str();
    app.add_option("--out-dir", out_dir, "Directory for CSV/JSON outputs")->required();
  }

  std::map<std::string, std::string> config() const {
    return {{"mu1", format_number(mu1)},          {"mu2", format_number(mu2)},
            {"var1", format_number(var1)},        {"var2", format_number(var2)},
            {"cov12", format_number(cov12)},      {"n", std::to_string(n)},
            {"candidates", std::to_string(candidates)}, {"seed", std::to_string(seed)},
            {"g-target", format_number(g_target)}, {"out-dir", out_dir}};
  }
};

struct SimulateOpts {
  std::string params;
  std::string gbm = "0.019142,0.08903,0.022918,0.12349";
  int n = 30;
  std::size_t paths = 100000;
  std::uint64_t seed = 1;
  std::optional<double> leverage_cap;
  double v0 = 1.0;
  std::string out;

  void add(CLI::App& app) {
    app.add_option("--params", params, "i01,i02,k1,k2,delta")->required();
    app.add_option("--gbm", gbm, "m1,s1,m2,s2 (per-stage log drift and volatility)")
        ->capture_default_str();
    app.add_option("--n", n, "Stages per path")->capture_default_str();
    app.add_option("--paths", paths, "Number of sample paths")->capture_default_str();
    app.add_option("--seed", seed, "Simulation seed")->capture_default_str();
    app.add_option("--leverage-cap", leverage_cap, "Saturate investments above this leverage");
    app.add_option("--v0", v0, "Initial account value")->capture_default_str();
    app.add_option("--out", out, "JSON report path")->required();
  }

  std::map<std::string, std::string> config(const ControllerParams& p,
                                            const std::vector<double>& g) const {
    std::map<std::string, std::string> c{
        {"params", join_numbers({p.i01, p.i02, p.k1, p.k2, p.delta})},
        {"gbm", join_numbers(g)},
        {"n", std::to_string(n)},
        {"paths", std::to_string(paths)},
        {"seed", std::to_string(seed)},
        {"v0", format_number(v0)},
        {"out", out}};
    if (leverage_cap) {
      c["leverage-cap"] = format_number(*leverage_cap);
    }
    return c;
  }
};

struct TrendOpts {
  std::size_t stages = 252;
  std::size_t window = 15;
  double slope = 10.0;
  double isat = 2.0;
  double mu = 0.0023;
  double sigma = 0.035;
  double bound = 0.075;
  double s0 = 1.0;
  std::uint64_t seed = 1;
  std::string out;

  void add(CLI::App& app) {
    app.add_option("--stages", stages, "Number of trading stages")->capture_default_str();
    app.add_option("--window", window, "Trend window (0 = all past returns)")
        ->capture_default_str();
    app.add_option("--slope", slope, "Gain of the linear region")->capture_default_str();
    app.add_option("--isat", isat, "Saturation level")->capture_default_str();
    app.add_option("--mu", mu, "Mean return")->capture_default_str();
    app.add_option("--sigma", sigma, "Pre-truncation standard deviation")->capture_default_str();
    app.add_option("--bound", bound, "Truncation half-width |rho - mu| <= bound")
        ->capture_default_str();
    app.add_option("--s0", s0, "Initial price")->capture_default_str();
    app.add_option("--seed", seed, "Path seed")->capture_default_str();
    app.add_option("--out", out, "CSV trace path")->required();
  }

  std::map<std::string, std::string> config() const {
    return {{"stages", std::to_string(stages)}, {"window", std::to_string(window)},
            {"slope", format_number(slope)},    {"isat", format_number(isat)},
            {"mu", format_number(mu)},          {"sigma", format_number(sigma)},
            {"bound", format_number(bound)},    {"s0", format_number(s0)},
            {"seed", std::to_string(seed)},     {"out", out}};
  }
};

struct ReplayOpts {
  std::string manifest;
  std::string redirect;

  void add(CLI::App& app) {
    app.add_option("manifest", manifest, "Manifest written by an earlier run")->required();
    app.add_option("--redirect", redirect,
                   "Write outputs into this directory instead of the recorded paths");
  }
};

// ---------------------------------------------------------------------------

int cmd_expect(const ExpectOpts& o, std::ostream& out) {
  const auto start = Clock::now();
  const ControllerParams p{o.i01, o.i02, o.k1, o.k2, o.delta};
  p.validate();
  if (o.n < 0) {
    throw ParameterError("--n must be nonnegative");
  }
  const double value = o.method == "matrix" ? expected_gain_matrix(p, o.mu1, o.mu2, o.n)
                                            : expected_gain_ccsls(p, o.mu1, o.mu2, o.n);
  const json result{{"command", "expect"}, {"method", o.method}, {"params", params_json(p)},
                    {"mu1", o.mu1},        {"mu2", o.mu2},       {"n", o.n},
                    {"expected_gain", value}};
  if (o.json_out) {
    out << result.dump(2) << '\n';
  } else {
    out << format_number(value) << '\n';
  }
  if (!o.out.empty()) {
    const fs::path path(o.out);
    ensure_parent(path);
    io::write_json(path, result);
    io::RunManifest m{"expect", o.config(), 0, kToolVersion, {path.string()},
                      seconds_since(start)};
    io::write_manifest(manifest_path_for(path), m);
  }
  return kOk;
}

int cmd_risk(const RiskOpts& o, std::ostream& out) {
  const auto v = parse_list(o.params, 5, "--params");
  const ControllerParams p{v[0], v[1], v[2], v[3], v[4]};
  const MomentSpec mom{o.mu1, o.mu2, o.var1, o.var2, o.cov12};
  const GainMoments gm = variance_recursion(p, mom, o.n);
  out << json{{"command", "risk"}, {"params", params_json(p)}, {"n", o.n},
              {"mean", gm.mean},   {"std", gm.std},          {"variance", gm.variance}}
             .dump(2)
      << '\n';
  return kOk;
}

json selection_json(const Selection& sel) {
  json j{{"feasible", sel.feasible()}, {"n_feasible", sel.n_feasible},
         {"max_mean", number_or_null(sel.max_mean)}};
  if (sel.best) {
    j["idx"] = sel.best->index;
    j["params"] = params_json(sel.best->d);
    j["mean"] = sel.best->mean;
    j["std"] = sel.best->std;
  }
  return j;
}

void write_frontier_csv(const fs::path& path, const std::vector<RiskReturnPoint>& points) {
  io::CsvWriter csv(path, {"idx", "i01", "i02", "k1", "k2", "delta", "mean", "std"});
  for (const auto& p : points) {
    csv.row({std::to_string(p.index), format_number(p.d.i01), format_number(p.d.i02),
             format_number(p.d.k1), format_number(p.d.k2), format_number(p.d.delta),
             format_number(p.mean), format_number(p.std)});
  }
  csv.close();
}

int cmd_frontier(const FrontierOpts& o, std::ostream& out) {
  const auto start = Clock::now();
  const MomentSpec mom{o.mu1, o.mu2, o.var1, o.var2, o.cov12};
  mom.validate();
  if (o.n < 1) {
    throw ParameterError("--n must be >= 1");
  }
  SearchRanges ranges;
  ranges.n_candidates = o.candidates;
  if (o.mu1 * o.mu2 < 0.0) {
    ranges = ranges.with_negated_delta();
  }
  const auto candidates = sample_candidates(ranges, o.seed);
  const Frontier frontier = evaluate_frontier(candidates, mom, o.n, default_worker_count());
  const Selection cc = select_min_risk(frontier.ccsls, o.g_target);
  const Selection twin = select_min_risk(frontier.twin, o.g_target);

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  const fs::path cc_csv = dir / "frontier_ccsls.csv";
  const fs::path twin_csv = dir / "frontier_2sls.csv";
  const fs::path sel_json = dir / "selection.json";
  write_frontier_csv(cc_csv, frontier.ccsls);
  write_frontier_csv(twin_csv, frontier.twin);

  json sel{{"g_target", o.g_target},
           {"n", o.n},
           {"candidates", o.candidates},
           {"seed", o.seed},
           {"ccsls", selection_json(cc)},
           {"2sls", selection_json(twin)}};
  if (cc.feasible() && twin.feasible()) {
    sel["ccsls_lower_risk"] = cc.best->std < twin.best->std;
  } else {
    sel["ccsls_lower_risk"] = nullptr;
  }
  io::write_json(sel_json, sel);

  io::RunManifest m{"frontier",
                    o.config(),
                    o.seed,
                    kToolVersion,
                    {cc_csv.string(), twin_csv.string(), sel_json.string()},
                    seconds_since(start)};
  io::write_manifest(dir / "manifest.json", m);

  auto describe = [&out](const char* name, const Selection& s) {
    out << name << ": ";
    if (s.best) {
      out << "idx " << s.best->index << " std " << format_number(s.best->std) << " mean "
          << format_number(s.best->mean) << '\n';
    } else {
      out << "infeasible (max mean " << format_number(s.max_mean) << ")\n";
    }
  };
  describe("ccsls", cc);
  describe("2sls", twin);
  return cc.feasible() || twin.feasible() ? kOk : kInfeasible;
}

int cmd_simulate(const SimulateOpts& o, std::ostream& out) {
  const auto start = Clock::now();
  const auto pv = parse_list(o.params, 5, "--params");
  const auto gv = parse_list(o.gbm, 4, "--gbm");
  SimConfig cfg;
  cfg.n_stages = o.n;
  cfg.n_paths = o.paths;
  cfg.seed = o.seed;
  cfg.v0 = o.v0;
  cfg.leverage_cap = o.leverage_cap;
  cfg.controller = {pv[0], pv[1], pv[2], pv[3], pv[4]};
  cfg.model = GbmModel{gv[0], gv[1], gv[2], gv[3], 1.0, 1.0};
  cfg.validate();

  const McReport rep = run_paths(cfg);
  const MomentSpec mom = model_moments(cfg.model);
  json j{{"command", "simulate"},
         {"params", params_json(cfg.controller)},
         {"model",
          {{"type", "gbm"}, {"m1", gv[0]}, {"s1", gv[1]}, {"m2", gv[2]}, {"s2", gv[3]}}},
         {"return_moments",
          {{"mu1", mom.mu1}, {"mu2", mom.mu2}, {"var1", mom.var1}, {"var2", mom.var2}}},
         {"n_stages", cfg.n_stages},
         {"n_paths", rep.n_paths},
         {"seed", rep.seed},
         {"v0", cfg.v0},
         {"leverage_cap", o.leverage_cap ? json(*o.leverage_cap) : json(nullptr)},
         {"mean_g", rep.mean_g},
         {"std_g", rep.std_g},
         {"mean_g_surviving", rep.mean_g_surviving},
         {"std_g_surviving", rep.std_g_surviving},
         {"l_max_q95", number_or_null(rep.l_max_q95)},
         {"bankruptcies", rep.bankruptcies},
         {"bankruptcy_fraction",
          static_cast<double>(rep.bankruptcies) / static_cast<double>(rep.n_paths)},
         {"max_stage_leverage", rep.max_stage_leverage}};

  const fs::path path(o.out);
  ensure_parent(path);
  io::write_json(path, j);
  io::RunManifest m{"simulate",   o.config(cfg.controller, gv), o.seed, kToolVersion,
                    {path.string()}, seconds_since(start)};
  io::write_manifest(manifest_path_for(path), m);

  out << "mean_g " << format_number(rep.mean_g) << " std_g " << format_number(rep.std_g)
      << " l_max_q95 " << format_number(rep.l_max_q95) << " bankruptcies " << rep.bankruptcies
      << '\n';
  return kOk;
}

int cmd_trend_demo(const TrendOpts& o, std::ostream& out) {
  const auto start = Clock::now();
  const TruncatedNormalModel model{o.mu, o.sigma, o.bound};
  model.validate();
  if (!(o.s0 > 0.0)) {
    throw ParameterError("--s0 must be positive");
  }
  TrendState state;
  state.window = o.window;
  state.slope = o.slope;
  state.i_sat = o.isat;
  state.validate();

  const fs::path path(o.out);
  ensure_parent(path);
  io::CsvWriter csv(path, {"k", "S", "rho", "x", "I", "saturated_flag", "g"});
  RngEngine rng = substream(o.seed, 0);
  double price = o.s0;
  double gain = 0.0;
  for (std::size_t k = 0; k < o.stages; ++k) {
    const double rho = sample_truncated_normal(model, rng);
    const bool saturated = state.saturated();
    const double x = state.x;
    TrendStep step = trend_step(state, rho);
    gain += step.investment * rho;
    csv.row({std::to_string(k), format_number(price), format_number(rho), format_number(x),
             format_number(step.investment), saturated ? "1" : "0", format_number(gain)});
    price *= 1.0 + rho;
    state = std::move(step.next);
  }
  csv.close();

  io::RunManifest m{"trend-demo", o.config(), o.seed, kToolVersion, {path.string()},
                    seconds_since(start)};
  io::write_manifest(manifest_path_for(path), m);
  out << "wrote " << o.stages << " stages to " << path.string() << ", final g "
      << format_number(gain) << '\n';
  return kOk;
}

int cmd_replay(const ReplayOpts& o, std::ostream& out, std::ostream& err) {
  const io::RunManifest m = io::read_manifest(o.manifest);
  std::map<std::string, std::string> config = m.config;
  if (!o.redirect.empty()) {
    const fs::path dir(o.redirect);
    for (const char* key : {"out"}) {
      if (auto it = config.find(key); it != config.end()) {
        it->second = (dir / fs::path(it->second).filename()).string();
      }
    }
    if (auto it = config.find("out-dir"); it != config.end()) {
      it->second = dir.string();
    }
  }
  std::vector<std::string> args{m.command};
  for (const auto& [key, value] : config) {
    args.push_back("--" + key + "=" + value);
  }
  return run(args, out, err);
}

// Expands `--config FILE` into `--key=value` arguments placed before the
// explicit ones, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) {
        throw CLI::ArgumentMismatch("--config requires a file path");
      }
      config_path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else {
      rest.push_back(a);
    }
  }
  if (!config_path || rest.empty()) {
    return rest;
  }
  std::vector<std::string> expanded{rest.front()};
  for (const auto& [key, value] : io::read_key_value_file(*config_path)) {
    expanded.push_back("--" + key + "=" + value);
  }
  expanded.insert(expanded.end(), rest.begin() + 1, rest.end());
  return expanded;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-short stock trading controllers: analytics, simulation and design search",
               "slslab"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  ExpectOpts expect;
  RiskOpts risk;
  FrontierOpts frontier;
  SimulateOpts simulate;
  TrendOpts trend;
  ReplayOpts replay;
  CLI::App* expect_cmd = app.add_subcommand("expect", "Expected gain E[g(N)]");
  CLI::App* risk_cmd = app.add_subcommand("risk", "Exact mean and std of g(N)");
  CLI::App* frontier_cmd =
      app.add_subcommand("frontier", "Random-search risk-return frontier and min-risk designs");
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Monte-Carlo leverage and bankruptcy study under GBM");
  CLI::App* trend_cmd =
      app.add_subcommand("trend-demo", "One path of the saturated trend-following controller");
  CLI::App* replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
  expect.add(*expect_cmd);
  risk.add(*risk_cmd);
  frontier.add(*frontier_cmd);
  simulate.add(*simulate_cmd);
  trend.add(*trend_cmd);
  replay.add(*replay_cmd);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (expect_cmd->parsed()) return cmd_expect(expect, out);
    if (risk_cmd->parsed()) return cmd_risk(risk, out);
    if (frontier_cmd->parsed()) return cmd_frontier(frontier, out);
    if (simulate_cmd->parsed()) return cmd_simulate(simulate, out);
    if (trend_cmd->parsed()) return cmd_trend_demo(trend, out);
    if (replay_cmd->parsed()) return cmd_replay(replay, out, err);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConsistencyError& e) {
    err << "internal consistency failure: " << e.what() << '\n';
    return kInternal;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  return kUsage;
}

}  // namespace slslab::cli
