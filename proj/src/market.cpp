#include "slslab/market.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "slslab/errors.hpp"

namespace slslab {

void GbmModel::validate() const {
  if (!std::isfinite(m1) || !std::isfinite(m2)) {
    throw ParameterError("GBM drifts must be finite");
  }
  if (!(s1 >= 0.0) || !(s2 >= 0.0) || !std::isfinite(s1) || !std::isfinite(s2)) {
    throw ParameterError("GBM volatilities must be finite and nonnegative");
  }
  if (!(s0_1 > 0.0) || !(s0_2 > 0.0)) {
    throw ParameterError("GBM initial prices must be positive");
  }
}

void TruncatedNormalModel::validate() const {
  if (!std::isfinite(mu) || !(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("truncated normal needs finite mu and sigma >= 0");
  }
  if (!(bound > 0.0)) {
    throw ParameterError("truncation bound must be positive, got " + std::to_string(bound));
  }
}

void DiscreteJointModel::validate() const {
  if (atoms.empty() || atoms.size() != probs.size()) {
    throw ParameterError("discrete law needs one probability per atom");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) {
      throw ParameterError("discrete law probabilities must be nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ParameterError("discrete law probabilities must sum to 1");
  }
}

void validate(const ReturnModel& model) {
  std::visit([](const auto& m) { m.validate(); }, model);
}

double sample_truncated_normal(const TruncatedNormalModel& model, RngEngine& rng) {
  if (model.sigma == 0.0) {
    return model.mu;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const double dev = model.sigma * normal(rng);
    if (std::abs(dev) <= model.bound) {
      return model.mu + dev;
    }
  }
}

ReturnPair sample_returns(const GbmModel& model, RngEngine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double w1 = normal(rng);
  const double w2 = normal(rng);
  return {std::expm1(model.m1 + model.s1 * w1), std::expm1(model.m2 + model.s2 * w2)};
}

ReturnPair sample_returns(const TruncatedNormalModel& model, RngEngine& rng) {
  const double r1 = sample_truncated_normal(model, rng);
  const double r2 = sample_truncated_normal(model, rng);
  return {r1, r2};
}

ReturnPair sample_returns(const DiscreteJointModel& model, RngEngine& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double cum = 0.0;
  for (std::size_t i = 0; i < model.atoms.size(); ++i) {
    cum += model.probs[i];
    if (u < cum) {
      return {model.atoms[i].first, model.atoms[i].second};
    }
  }
  // u landed in the rounding gap above the last cumulative sum.
  for (std::size_t i = model.atoms.size(); i-- > 0;) {
    if (model.probs[i] > 0.0) {
      return {model.atoms[i].first, model.atoms[i].second};
    }
  }
  return {model.atoms.back().first, model.atoms.back().second};
}

ReturnPair sample_returns(const ReturnModel& model, RngEngine& rng) {
  return std::visit([&rng](const auto& m) { return sample_returns(m, rng); }, model);
}

MomentSpec model_moments(const GbmModel& model) {
  // Total return exp(m + s w) is log-normal.
  auto mean = [](double m, double s) { return std::expm1(m + 0.5 * s * s); };
  auto var = [](double m, double s) { return std::expm1(s * s) * std::exp(2.0 * m + s * s); };
  return {mean(model.m1, model.s1), mean(model.m2, model.s2), var(model.m1, model.s1),
          var(model.m2, model.s2), 0.0};
}

MomentSpec model_moments(const TruncatedNormalModel& model) {
  double var = 0.0;
  if (model.sigma > 0.0) {
    // Symmetric truncation at +-c standard deviations:
    // Var = sigma^2 (1 - 2 c pdf(c) / (2 cdf(c) - 1)).
    const double c = model.bound / model.sigma;
    const double pdf = std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
    const double mass = std::erf(c / std::numbers::sqrt2);
    var = model.sigma * model.sigma * (1.0 - 2.0 * c * pdf / mass);
  }
  return {model.mu, model.mu, var, var, 0.0};
}

MomentSpec model_moments(const DiscreteJointModel& model) {
  MomentSpec m;
  for (std::size_t i = 0; i < model.atoms.size(); ++i) {
    m.mu1 += model.probs[i] * model.atoms[i].first;
    m.mu2 += model.probs[i] * model.atoms[i].second;
  }
  for (std::size_t i = 0; i < model.atoms.size(); ++i) {
    const double d1 = model.atoms[i].first - m.mu1;
    const double d2 = model.atoms[i].second - m.mu2;
    m.var1 += model.probs[i] * d1 * d1;
    m.var2 += model.probs[i] * d2 * d2;
    m.cov12 += model.probs[i] * d1 * d2;
  }
  return m;
}

MomentSpec model_moments(const ReturnModel& model) {
  return std::visit([](const auto& m) { return model_moments(m); }, model);
}

PricePath gbm_price_path(const GbmModel& model, std::size_t n, RngEngine& rng) {
  PricePath path;
  path.s1.reserve(n + 1);
  path.s2.reserve(n + 1);
  path.s1.push_back(model.s0_1);
  path.s2.push_back(model.s0_2);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double w1 = normal(rng);
    const double w2 = normal(rng);
    path.s1.push_back(path.s1.back() * std::exp(model.m1 + model.s1 * w1));
    path.s2.push_back(path.s2.back() * std::exp(model.m2 + model.s2 * w2));
  }
  return path;
}

GbmModel reference_gbm() { return {0.019142, 0.08903, 0.022918, 0.12349, 1.0, 1.0}; }

}  // namespace slslab
