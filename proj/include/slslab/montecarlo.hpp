#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "slslab/controller.hpp"
#include "slslab/market.hpp"

namespace slslab {

struct SimConfig {
  int n_stages = 30;
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  double v0 = 1.0;
  std::optional<double> leverage_cap;  // absent: unsaturated
  ControllerParams controller;
  ReturnModel model = reference_gbm();

  void validate() const;
};

struct PathOutcome {
  double g_final = 0.0;
  double l_max = 0.0;  // +inf for bankrupt paths
  bool bankrupt = false;
  int halt_stage = 0;
  double max_stage_leverage = 0.0;  // largest leverage actually traded at
};

struct StageRecord {
  int stage;
  double rho1;
  double rho2;
  InvestmentQuad quad;  // after any capping
  AccountSnapshot account;
  double traded_leverage;
};

using StageObserver = std::function<void(const StageRecord&)>;

struct McReport {
  double mean_g = 0.0;
  double std_g = 0.0;
  double mean_g_surviving = 0.0;
  double std_g_surviving = 0.0;
  double l_max_q95 = 0.0;
  std::size_t bankruptcies = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  double max_stage_leverage = 0.0;
};

/// Simulates path `path_index` of the run described by `config`.
///
/// Each stage k < N checks V(k) first; V(k) <= 0 halts the path as bankrupt.
/// Otherwise the controller's investments are formed, capped if a leverage
/// cap is set, and the returns are applied. V(N) <= 0 after the last stage
/// also counts as bankruptcy.
PathOutcome simulate_path(const SimConfig& config, std::uint64_t path_index,
                          const StageObserver& observer = {});

/// Runs every path and reduces in path-index order. `threads == 0` picks the
/// SLSLAB_THREADS environment hint or the hardware concurrency; the result
/// never depends on it.
McReport run_paths(const SimConfig& config, unsigned threads = 0);

/// Inverse empirical CDF: the smallest value v with #{x <= v} >= q * n.
/// +inf entries sort last. Throws DomainError on an empty input or q outside [0, 1].
double quantile(std::span<const double> values, double q);

unsigned default_worker_count();

}  // namespace slslab
