#include "slslab/trend.hpp"

#include <cmath>
#include <string>

#include "slslab/errors.hpp"

namespace slslab {

double saturated_linear(double x, double slope, double i_sat) {
  const double linear = slope * x;
  if (x > 0.0) {
    return linear < i_sat ? linear : i_sat;
  }
  return linear > -i_sat ? linear : -i_sat;
}

void TrendState::validate() const {
  if (!(slope >= 0.0) || !std::isfinite(slope)) {
    throw ParameterError("trend slope must be nonnegative, got " + std::to_string(slope));
  }
  if (!(i_sat > 0.0)) {
    throw ParameterError("saturation level must be positive, got " + std::to_string(i_sat));
  }
}

bool TrendState::saturated() const { return std::abs(slope * x) > i_sat; }

TrendStep trend_step(const TrendState& state, double rho) {
  TrendStep out{state, state.investment()};
  TrendState& next = out.next;
  next.stage = state.stage + 1;
  next.buffer.push_back(rho);

  if (next.weights) {
    double x = 0.0;
    for (std::size_t i = 0; i < next.buffer.size(); ++i) {
      x += next.weights(next.stage, i) * next.buffer[i];
    }
    next.x = x;
    return out;
  }

  if (next.window > 0 && next.buffer.size() > next.window) {
    next.buffer.erase(next.buffer.begin());
  }
  // Summed afresh, oldest first, so x matches a direct windowed sum exactly.
  double x = 0.0;
  for (double r : next.buffer) {
    x += r;
  }
  next.x = x;
  return out;
}

}  // namespace slslab
