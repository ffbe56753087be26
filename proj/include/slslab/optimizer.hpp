#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slslab/analytics.hpp"
#include "slslab/controller.hpp"

namespace slslab {

/// Half-open interval (lo, hi] when `open_low`, closed [lo, hi] otherwise.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool open_low = true;
};

struct SearchRanges {
  Interval i0{0.0, 3.0, true};
  Interval k{0.0, 3.0, true};
  Interval delta{0.0, 0.99, false};
  std::size_t n_candidates = 5000;

  void validate() const;

  /// Same ranges with the coupling interval reflected to [-hi, -lo], for
  /// drifts of opposite sign.
  SearchRanges with_negated_delta() const;
};

enum class Family { kCcSls, kTwoSls };

const char* to_string(Family f);

struct CandidatePair {
  ControllerParams cc;
  ControllerParams twin;  // cc with delta forced to 0
};

struct RiskReturnPoint {
  ControllerParams d;
  double mean = 0.0;
  double std = 0.0;
  Family family = Family::kCcSls;
  std::size_t index = 0;  // candidate index
};

struct Frontier {
  std::vector<RiskReturnPoint> ccsls;
  std::vector<RiskReturnPoint> twin;
};

/// Outcome of the constrained selection. `best` is empty when no point
/// reaches the target; `max_mean` then says how far off the search was.
struct Selection {
  std::optional<RiskReturnPoint> best;
  std::size_t n_feasible = 0;
  double max_mean = 0.0;

  bool feasible() const { return best.has_value(); }
};

/// Uniform draws of (i01, i02, k1, k2, delta), each paired with its
/// decoupled twin. Deterministic in `seed`.
std::vector<CandidatePair> sample_candidates(const SearchRanges& ranges, std::uint64_t seed);

/// Exact (std, mean) of g(N) for each design, in input order.
std::vector<RiskReturnPoint> evaluate_frontier(std::span<const ControllerParams> designs,
                                               Family family, const MomentSpec& moments, int n,
                                               unsigned threads = 1);

Frontier evaluate_frontier(std::span<const CandidatePair> candidates, const MomentSpec& moments,
                           int n, unsigned threads = 1);

/// Minimum std subject to mean >= g_target; ties go to the larger mean,
/// then to the lower candidate index.
Selection select_min_risk(std::span<const RiskReturnPoint> points, double g_target);

}  // namespace slslab
