#pragma once

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "slslab/analytics.hpp"
#include "slslab/rng.hpp"

namespace slslab {

/// Two independent geometric Brownian motions sampled once per stage:
/// S_i(k+1) = S_i(k) exp(m_i + s_i w_i(k)), w_i ~ N(0, 1).
struct GbmModel {
  double m1 = 0.0;
  double s1 = 0.0;
  double m2 = 0.0;
  double s2 = 0.0;
  double s0_1 = 1.0;
  double s0_2 = 1.0;

  void validate() const;
};

/// Normal(mu, sigma) conditioned on |rho - mu| <= bound. When used as a
/// two-stock model both stocks draw independently from this law.
struct TruncatedNormalModel {
  double mu = 0.0;
  double sigma = 0.0;
  double bound = 1.0;

  void validate() const;
};

/// Finite joint law of (rho1, rho2).
struct DiscreteJointModel {
  std::vector<std::pair<double, double>> atoms;
  std::vector<double> probs;

  void validate() const;
};

using ReturnModel = std::variant<GbmModel, TruncatedNormalModel, DiscreteJointModel>;

struct ReturnPair {
  double rho1;
  double rho2;
};

/// Single draw from a truncated normal law, by rejection.
double sample_truncated_normal(const TruncatedNormalModel& model, RngEngine& rng);

ReturnPair sample_returns(const GbmModel& model, RngEngine& rng);
ReturnPair sample_returns(const TruncatedNormalModel& model, RngEngine& rng);
ReturnPair sample_returns(const DiscreteJointModel& model, RngEngine& rng);
ReturnPair sample_returns(const ReturnModel& model, RngEngine& rng);

MomentSpec model_moments(const GbmModel& model);
MomentSpec model_moments(const TruncatedNormalModel& model);
MomentSpec model_moments(const DiscreteJointModel& model);
MomentSpec model_moments(const ReturnModel& model);

void validate(const ReturnModel& model);

struct PricePath {
  std::vector<double> s1;
  std::vector<double> s2;
};

/// n + 1 prices per stock starting at the model's initial prices.
PricePath gbm_price_path(const GbmModel& model, std::size_t n, RngEngine& rng);

/// Model parameters from the leverage study: mean returns 0.023374 and
/// 0.031014 with variances 8.3333e-3 and 16.333e-3.
GbmModel reference_gbm();

}  // namespace slslab
