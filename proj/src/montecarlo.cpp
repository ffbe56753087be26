#include "slslab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "slslab/errors.hpp"

namespace slslab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Two-pass sample statistics (n - 1 denominator), in index order.
template <typename Pred>
MeanStd sample_stats(const std::vector<PathOutcome>& paths, Pred keep) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : paths) {
    if (keep(p)) {
      sum += p.g_final;
      ++count;
    }
  }
  MeanStd out;
  if (count == 0) {
    return out;
  }
  out.mean = sum / static_cast<double>(count);
  if (count < 2) {
    return out;
  }
  double ss = 0.0;
  for (const auto& p : paths) {
    if (keep(p)) {
      const double d = p.g_final - out.mean;
      ss += d * d;
    }
  }
  out.std = std::sqrt(ss / static_cast<double>(count - 1));
  return out;
}

}  // namespace

void SimConfig::validate() const {
  if (n_stages < 1) {
    throw ParameterError("n_stages must be >= 1");
  }
  if (n_paths < 1) {
    throw ParameterError("n_paths must be >= 1");
  }
  if (!(v0 > 0.0)) {
    throw ParameterError("initial account value must be positive");
  }
  if (leverage_cap && !(*leverage_cap > 0.0)) {
    throw ParameterError("leverage cap must be positive");
  }
  controller.validate();
  slslab::validate(model);
}

unsigned default_worker_count() {
  if (const char* env = std::getenv("SLSLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) {
      return static_cast<unsigned>(v);
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

PathOutcome simulate_path(const SimConfig& config, std::uint64_t path_index,
                          const StageObserver& observer) {
  RngEngine rng = substream(config.seed, path_index);
  SlsState state = init_state(config.controller);
  PathOutcome out;

  for (int k = 0; k < config.n_stages; ++k) {
    InvestmentQuad quad = investments(state, config.controller);
    AccountSnapshot account = make_account(config.v0, state, quad);
    if (account.bankrupt) {
      out.bankrupt = true;
      out.halt_stage = k;
      out.l_max = kInf;
      out.g_final = state.total_gain();
      return out;
    }
    std::optional<InvestmentQuad> override_quad;
    if (config.leverage_cap) {
      quad = apply_leverage_cap(quad, account, *config.leverage_cap);
      override_quad = quad;
    }
    const double traded = leverage_ratio(quad, account);
    out.l_max = std::max(out.l_max, traded);
    out.max_stage_leverage = std::max(out.max_stage_leverage, traded);

    const ReturnPair rho = sample_returns(config.model, rng);
    if (observer) {
      observer(StageRecord{k, rho.rho1, rho.rho2, quad, account, traded});
    }
    state = cc_sls_step(state, rho.rho1, rho.rho2, config.controller, override_quad);
  }

  out.halt_stage = config.n_stages;
  out.g_final = state.total_gain();
  if (config.v0 + out.g_final <= 0.0) {
    out.bankrupt = true;
    out.l_max = kInf;
  }
  return out;
}

McReport run_paths(const SimConfig& config, unsigned threads) {
  config.validate();
  const std::size_t n = config.n_paths;
  std::vector<PathOutcome> outcomes(n);

  unsigned workers = threads == 0 ? default_worker_count() : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      outcomes[i] = simulate_path(config, i);
    }
  };
  if (workers <= 1) {
    run_range(0, n);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) {
        break;
      }
      pool.emplace_back(run_range, begin, end);
    }
  }

  McReport rep;
  rep.n_paths = n;
  rep.seed = config.seed;
  const MeanStd all = sample_stats(outcomes, [](const PathOutcome&) { return true; });
  const MeanStd alive = sample_stats(outcomes, [](const PathOutcome& p) { return !p.bankrupt; });
  rep.mean_g = all.mean;
  rep.std_g = all.std;
  rep.mean_g_surviving = alive.mean;
  rep.std_g_surviving = alive.std;

  std::vector<double> l_max(n);
  for (std::size_t i = 0; i < n; ++i) {
    l_max[i] = outcomes[i].l_max;
    rep.bankruptcies += outcomes[i].bankrupt ? 1 : 0;
    rep.max_stage_leverage = std::max(rep.max_stage_leverage, outcomes[i].max_stage_leverage);
  }
  rep.l_max_q95 = quantile(l_max, 0.95);
  return rep;
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) {
    throw DomainError("quantile of an empty sample");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("quantile level must lie in [0, 1], got " + std::to_string(q));
  }
  std::vector<double> sorted(values.begin(), values.end());
  const std::size_t n = sorted.size();
  // 1-based rank ceil(q n), at least 1. The small slack absorbs q*n landing a
  // hair above an integer (0.95 * 100 = 95.00000000000001).
  const double target = q * static_cast<double>(n);
  auto rank = static_cast<std::size_t>(std::ceil(target - 1e-9 * std::max(1.0, target)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   sorted.end());
  return sorted[rank - 1];
}

}  // namespace slslab
