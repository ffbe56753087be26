#include "slslab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <limits>
#include <thread>

#include "slslab/errors.hpp"
#include "slslab/rng.hpp"

namespace slslab {
namespace {

void check_interval(const Interval& iv, const char* name) {
  if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.hi < iv.lo ||
      (iv.open_low && iv.hi == iv.lo)) {
    throw ParameterError(std::string("empty search interval for ") + name);
  }
}

double draw(const Interval& iv, RngEngine& rng) {
  const double u = std::generate_canonical<double, 53>(rng);  // [0, 1)
  // hi - w*u lands in (lo, hi]; lo + w*u lands in [lo, hi).
  return iv.open_low ? iv.hi - (iv.hi - iv.lo) * u : iv.lo + (iv.hi - iv.lo) * u;
}

}  // namespace

const char* to_string(Family f) { return f == Family::kCcSls ? "ccsls" : "2sls"; }

void SearchRanges::validate() const {
  check_interval(i0, "i0");
  check_interval(k, "k");
  check_interval(delta, "delta");
  if (i0.lo < 0.0 || k.lo < 0.0) {
    throw ParameterError("i0 and k ranges must be nonnegative");
  }
  if (!(std::max(std::abs(delta.lo), std::abs(delta.hi)) < 1.0)) {
    throw ParameterError("delta range must stay inside (-1, 1)");
  }
  if (n_candidates < 1) {
    throw ParameterError("need at least one candidate");
  }
}

SearchRanges SearchRanges::with_negated_delta() const {
  SearchRanges r = *this;
  r.delta.lo = -delta.hi;
  r.delta.hi = -delta.lo;
  return r;
}

std::vector<CandidatePair> sample_candidates(const SearchRanges& ranges, std::uint64_t seed) {
  ranges.validate();
  RngEngine rng = substream(seed, 0);
  std::vector<CandidatePair> out;
  out.reserve(ranges.n_candidates);
  for (std::size_t i = 0; i < ranges.n_candidates; ++i) {
    ControllerParams d;
    d.i01 = draw(ranges.i0, rng);
    d.i02 = draw(ranges.i0, rng);
    d.k1 = draw(ranges.k, rng);
    d.k2 = draw(ranges.k, rng);
    d.delta = draw(ranges.delta, rng);
    out.push_back({d, d.decoupled_twin()});
  }
  return out;
}

std::vector<RiskReturnPoint> evaluate_frontier(std::span<const ControllerParams> designs,
                                               Family family, const MomentSpec& moments, int n,
                                               unsigned threads) {
  moments.validate();
  std::vector<RiskReturnPoint> points(designs.size());
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const GainMoments gm = variance_recursion(designs[i], moments, n);
      points[i] = {designs[i], gm.mean, gm.std, family, i};
    }
  };
  const std::size_t count = designs.size();
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    run_range(0, count);
    return points;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return points;
}

Frontier evaluate_frontier(std::span<const CandidatePair> candidates, const MomentSpec& moments,
                           int n, unsigned threads) {
  std::vector<ControllerParams> cc;
  std::vector<ControllerParams> twin;
  cc.reserve(candidates.size());
  twin.reserve(candidates.size());
  for (const auto& c : candidates) {
    cc.push_back(c.cc);
    twin.push_back(c.twin);
  }
  Frontier f;
  f.ccsls = evaluate_frontier(cc, Family::kCcSls, moments, n, threads);
  f.twin = evaluate_frontier(twin, Family::kTwoSls, moments, n, threads);
  return f;
}

Selection select_min_risk(std::span<const RiskReturnPoint> points, double g_target) {
  if (points.empty()) {
    throw DomainError("cannot select from an empty frontier");
  }
  Selection sel;
  sel.max_mean = -std::numeric_limits<double>::infinity();
  const RiskReturnPoint* best = nullptr;
  for (const auto& p : points) {
    sel.max_mean = std::max(sel.max_mean, p.mean);
    if (!(p.mean >= g_target)) {
      continue;
    }
    ++sel.n_feasible;
    const bool better = best == nullptr || p.std < best->std ||
                        (p.std == best->std && p.mean > best->mean) ||
                        (p.std == best->std && p.mean == best->mean && p.index < best->index);
    if (better) {
      best = &p;
    }
  }
  if (best != nullptr) {
    sel.best = *best;
  }
  return sel;
}

}  // namespace slslab
