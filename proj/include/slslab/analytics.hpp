#pragma once

#include <Eigen/Dense>

#include "slslab/controller.hpp"

namespace slslab {

/// First and second moments of the i.i.d. joint return vector.
struct MomentSpec {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double var1 = 0.0;
  double var2 = 0.0;
  double cov12 = 0.0;

  /// Throws ParameterError unless variances are nonnegative and the
  /// covariance matrix is positive semidefinite.
  void validate() const;
};

/// Spectral quantities of the mean state matrix; its eigenvalues are
/// 1 - alpha1, 1 + alpha2, 1 - alpha2, 1 + alpha1.
struct SpectralParams {
  double theta = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

struct GainMoments {
  double mean = 0.0;
  double variance = 0.0;
  double std = 0.0;
};

enum class Quadrant { kPosPos, kNegNeg, kPosNeg, kNegPos };

const char* to_string(Quadrant q);

/// Sign pattern and inequality checks for one (mu1, mu2) sign combination.
struct QuadrantReport {
  Quadrant quadrant = Quadrant::kPosPos;
  int n = 0;
  double theta = 0.0;
  double theta_lower = 0.0;
  double theta_upper = 0.0;
  int sign_alpha1 = 0;
  int sign_alpha2 = 0;
  int sign_beta1 = 0;
  int sign_beta2 = 0;
  bool theta_bounds_hold = false;
  bool signs_match_table = false;
  bool first_inequality = false;   // phi(a1) (I02 mu2 b1 + I01 mu1 b2) / a1 > 0
  bool second_inequality = false;  // phi(a2) (I02 mu2 b2 + I01 mu1 b1) / a2 > 0
  bool third_inequality = false;   // phi(a1)/a1 + phi(a2)/a2 >= 0
  bool all_satisfied = false;
};

/// (1+x)^n + (1-x)^n - 2, evaluated as the even binomial series
/// 2 * sum_k C(n,2k) x^(2k) so it stays nonnegative without cancellation.
double phi_n(int n, double x);

/// Throws DomainError when delta == 0 (use the decoupled formula instead).
SpectralParams spectral_params(const ControllerParams& params, double mu1, double mu2);

/// Sum of the two single-stock closed forms; delta is ignored.
double expected_gain_2sls(const ControllerParams& params, double mu1, double mu2, int n);

/// Closed-form E[g(N)], dispatching explicitly on zero drifts and zero coupling.
double expected_gain_ccsls(const ControllerParams& params, double mu1, double mu2, int n);

Eigen::Matrix4d mean_state_matrix(const ControllerParams& params, double mu1, double mu2);
Eigen::Vector4d mean_input(const ControllerParams& params, double mu1, double mu2);

/// c' sum_{k<N} Abar^(N-1-k) bbar by Horner accumulation.
double expected_gain_matrix(const ControllerParams& params, double mu1, double mu2, int n);

struct Diagonalization {
  Eigen::Matrix4d eigvecs;  // columns are eigenvectors
  Eigen::Vector4d eigvals;  // (1-a1, 1+a2, 1-a2, 1+a1)
};

/// Closed-form eigendecomposition of the mean state matrix.
/// Throws DomainError when a drift is zero or delta == 0.
Diagonalization diagonalize_abar(const ControllerParams& params, double mu1, double mu2);

/// Exact mean and variance of g(N) by propagating the first and second
/// moments of the state. Throws ConsistencyError on a materially negative
/// variance.
GainMoments variance_recursion(const ControllerParams& params, const MomentSpec& moments, int n);

/// True when the expected gain is guaranteed positive for every N > 1 from
/// sign information alone.
bool rpe_holds(double delta, double mu1, double mu2);

/// Checks the sign table and the three sufficient inequalities at horizon n.
/// Throws DomainError for zero drifts or zero coupling.
QuadrantReport quadrant_table_check(const ControllerParams& params, double mu1, double mu2,
                                    int n);

}  // namespace slslab
