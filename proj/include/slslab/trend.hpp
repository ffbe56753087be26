#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace slslab {

/// Weight w_k(i) given to return rho(i) when forming the indicator at stage k.
using TrendWeights = std::function<double(std::size_t k, std::size_t i)>;

/// Odd saturated-linear investment function:
/// min(slope*x, i_sat) for x > 0, max(slope*x, -i_sat) otherwise.
double saturated_linear(double x, double slope, double i_sat);

/// Single-stock nonlinear feedback controller driven by a trend indicator
/// x(k) formed from past returns.
///
/// With `window == 0` the indicator is the sum of all past returns. With a
/// positive window it is that sum while fewer than `window` returns have been
/// seen, and the sum of the last `window` returns afterwards. A caller-supplied
/// `weights` callback replaces both schemes; the full return history is then
/// retained.
struct TrendState {
  std::size_t window = 15;
  double slope = 10.0;
  double i_sat = 2.0;
  TrendWeights weights;  // optional

  std::vector<double> buffer;  // oldest first
  double x = 0.0;
  std::size_t stage = 0;

  /// Throws ParameterError for a negative slope or nonpositive i_sat.
  void validate() const;

  double investment() const { return saturated_linear(x, slope, i_sat); }
  bool saturated() const;
};

struct TrendStep {
  TrendState next;
  double investment;  // f(x(k)), the position held while rho(k) was realized
};

/// Consumes rho(k): reports f(x(k)) and returns the state at stage k+1.
TrendStep trend_step(const TrendState& state, double rho);

}  // namespace slslab
