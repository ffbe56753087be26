#include "slslab/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "slslab/errors.hpp"

namespace slslab {
namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

void require_horizon(int n) {
  if (n < 0) {
    throw ParameterError("horizon must be nonnegative, got " + std::to_string(n));
  }
}

// I0/K * phi_N(K mu): expected gain of one long-short pair on one stock.
double single_stock_gain(double i0, double k, double mu, int n) {
  return i0 / k * phi_n(n, k * mu);
}

// Rounding slack on a computed variance before a negative value is an error.
constexpr double kNegativeVarianceTol = 1e-9;

}  // namespace

const char* to_string(Quadrant q) {
  switch (q) {
    case Quadrant::kPosPos:
      return "mu1>0,mu2>0";
    case Quadrant::kNegNeg:
      return "mu1<0,mu2<0";
    case Quadrant::kPosNeg:
      return "mu1>0,mu2<0";
    case Quadrant::kNegPos:
      return "mu1<0,mu2>0";
  }
  return "?";
}

void MomentSpec::validate() const {
  if (!std::isfinite(mu1) || !std::isfinite(mu2)) {
    throw ParameterError("mean returns must be finite");
  }
  if (!(var1 >= 0.0) || !(var2 >= 0.0)) {
    throw ParameterError("return variances must be nonnegative");
  }
  // Relative slack so that a perfectly correlated pair entered by hand passes.
  if (cov12 * cov12 > var1 * var2 * (1.0 + 1e-12)) {
    throw ParameterError("covariance violates cov12^2 <= var1 * var2");
  }
}

double phi_n(int n, double x) {
  require_horizon(n);
  if (n < 2 || x == 0.0) {
    return 0.0;
  }
  // Every term C(n, 2k) x^(2k) is positive, so plain forward summation is stable.
  const double y = x * x;
  double term = 1.0;
  double acc = 0.0;
  for (int k = 1; 2 * k <= n; ++k) {
    term *= y * (n - 2 * k + 2) * (n - 2 * k + 1) / ((2.0 * k - 1.0) * (2.0 * k));
    acc += term;
  }
  return 2.0 * acc;
}

SpectralParams spectral_params(const ControllerParams& params, double mu1, double mu2) {
  params.validate();
  if (params.delta == 0.0) {
    throw DomainError("spectral parameters require nonzero coupling; use the decoupled formula");
  }
  const double a = params.k1 * mu1;
  const double b = params.k2 * mu2;
  const double s = a + b;
  const double t = a - b;
  const double p = a * b;
  const double d2 = params.delta * params.delta;

  // theta^2 = s^2 - 4 d^2 p = t^2 + 4 (1 - d^2) p; pick the cancellation-free form.
  double theta_sq = p >= 0.0 ? t * t + 4.0 * (1.0 - d2) * p : s * s - 4.0 * d2 * p;
  if (theta_sq < 0.0 && theta_sq >= -1e-15) {
    theta_sq = 0.0;
  }
  SpectralParams sp;
  sp.theta = std::sqrt(theta_sq);

  // alpha1 * alpha2 = (1 - d^2) p and beta1 * beta2 = 4 d^2 p: compute the
  // larger root directly and recover the other from the product.
  const double alpha_prod = (1.0 - d2) * p;
  if (t >= 0.0) {
    sp.alpha2 = (sp.theta + t) / 2.0;
    sp.alpha1 = sp.alpha2 != 0.0 ? alpha_prod / sp.alpha2 : (sp.theta - t) / 2.0;
  } else {
    sp.alpha1 = (sp.theta - t) / 2.0;
    sp.alpha2 = alpha_prod / sp.alpha1;
  }
  const double beta_prod = 4.0 * d2 * p;
  if (s >= 0.0) {
    sp.beta1 = s + sp.theta;
    sp.beta2 = sp.beta1 != 0.0 ? beta_prod / sp.beta1 : s - sp.theta;
  } else {
    sp.beta2 = s - sp.theta;
    sp.beta1 = beta_prod / sp.beta2;
  }
  return sp;
}

double expected_gain_2sls(const ControllerParams& params, double mu1, double mu2, int n) {
  params.decoupled_twin().validate();
  require_horizon(n);
  return single_stock_gain(params.i01, params.k1, mu1, n) +
         single_stock_gain(params.i02, params.k2, mu2, n);
}

double expected_gain_ccsls(const ControllerParams& params, double mu1, double mu2, int n) {
  params.validate();
  require_horizon(n);
  if (mu1 == 0.0 && mu2 == 0.0) {
    return 0.0;
  }
  if (mu1 == 0.0) {
    return single_stock_gain(params.i02, params.k2, mu2, n);
  }
  if (mu2 == 0.0) {
    return single_stock_gain(params.i01, params.k1, mu1, n);
  }
  if (params.decoupled()) {
    return expected_gain_2sls(params, mu1, mu2, n);
  }

  const SpectralParams sp = spectral_params(params, mu1, mu2);
  const double cross =
      2.0 * params.delta * mu1 * mu2 * (params.i01 * params.k1 + params.i02 * params.k2);
  const double c1 =
      (cross + params.i02 * mu2 * sp.beta1 + params.i01 * mu1 * sp.beta2) / sp.alpha1;
  const double c2 =
      (cross + params.i02 * mu2 * sp.beta2 + params.i01 * mu1 * sp.beta1) / sp.alpha2;
  return (c1 * phi_n(n, sp.alpha1) + c2 * phi_n(n, sp.alpha2)) / (2.0 * sp.theta);
}

Eigen::Matrix4d mean_state_matrix(const ControllerParams& p, double mu1, double mu2) {
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a(0, 0) = 1.0 + p.k1 * mu1;
  a(0, 1) = -p.delta * p.k2 * mu1;
  a(1, 0) = p.delta * p.k1 * mu2;
  a(1, 1) = 1.0 - p.k2 * mu2;
  a(2, 2) = 1.0 - p.k1 * mu1;
  a(2, 3) = p.delta * p.k2 * mu1;
  a(3, 2) = -p.delta * p.k1 * mu2;
  a(3, 3) = 1.0 + p.k2 * mu2;
  return a;
}

Eigen::Vector4d mean_input(const ControllerParams& p, double mu1, double mu2) {
  return {p.i01 * mu1, -p.i02 * mu2, -p.i01 * mu1, p.i02 * mu2};
}

double expected_gain_matrix(const ControllerParams& params, double mu1, double mu2, int n) {
  params.validate();
  require_horizon(n);
  const Eigen::Matrix4d a = mean_state_matrix(params, mu1, mu2);
  const Eigen::Vector4d b = mean_input(params, mu1, mu2);
  Eigen::Vector4d m = Eigen::Vector4d::Zero();
  for (int k = 0; k < n; ++k) {
    m = (a * m + b).eval();
  }
  return m.sum();
}

Diagonalization diagonalize_abar(const ControllerParams& params, double mu1, double mu2) {
  if (mu1 == 0.0 || mu2 == 0.0) {
    throw DomainError("diagonalization requires both drifts nonzero");
  }
  const SpectralParams sp = spectral_params(params, mu1, mu2);
  const double scale = 2.0 * params.delta * params.k1 * mu2;
  Diagonalization d;
  d.eigvecs << sp.beta2 / scale, sp.beta1 / scale, 0.0, 0.0,  //
      1.0, 1.0, 0.0, 0.0,                                     //
      0.0, 0.0, sp.beta1 / scale, sp.beta2 / scale,           //
      0.0, 0.0, 1.0, 1.0;
  d.eigvals << 1.0 - sp.alpha1, 1.0 + sp.alpha2, 1.0 - sp.alpha2, 1.0 + sp.alpha1;
  return d;
}

GainMoments variance_recursion(const ControllerParams& params, const MomentSpec& moments, int n) {
  params.validate();
  moments.validate();
  require_horizon(n);

  const double mu1 = moments.mu1;
  const double mu2 = moments.mu2;
  const ControllerParams& p = params;

  // Same recursion as x(k+1) = A(rho) x(k) + b(rho), carried in the per-stock
  // coordinates y = T x = [g1L+g1S, g2L+g2S, g1L-g1S, g2L-g2S]. The total gain
  // is y0 + y1, so Var(g) never comes from subtracting large, nearly equal
  // leg covariances. F_i = T A_i T^-1 and h_i = T b_i:
  //   s1' = s1 + rho1 (k1 d1 + delta k2 d2),  d1' = d1 + rho1 (2 I01 + k1 s1 - delta k2 s2)
  //   s2' = s2 + rho2 (k2 d2 + delta k1 d1),  d2' = d2 + rho2 (2 I02 + k2 s2 - delta k1 s1)
  std::array<Eigen::Matrix4d, 2> f;
  f[0] = Eigen::Matrix4d::Zero();
  f[0](0, 2) = p.k1;
  f[0](0, 3) = p.delta * p.k2;
  f[0](2, 0) = p.k1;
  f[0](2, 1) = -p.delta * p.k2;
  f[1] = Eigen::Matrix4d::Zero();
  f[1](1, 2) = p.delta * p.k1;
  f[1](1, 3) = p.k2;
  f[1](3, 0) = -p.delta * p.k1;
  f[1](3, 1) = p.k2;
  std::array<Eigen::Vector4d, 2> h;
  h[0] = Eigen::Vector4d(0.0, 0.0, 2.0 * p.i01, 0.0);
  h[1] = Eigen::Vector4d(0.0, 0.0, 0.0, 2.0 * p.i02);

  const Eigen::Matrix4d f_bar = Eigen::Matrix4d::Identity() + mu1 * f[0] + mu2 * f[1];

  // The covariance C = Cov(y) is propagated rather than E[y y'], so Var(g)
  // is not the difference of two nearly equal second moments. With
  // rho = mu + e, e independent of y(k) and Cov(e) = S:
  //   C' = Fbar C Fbar' + sum_ij S_ij (F_i C F_j' + u_i u_j'),  u_i = F_i m + h_i.
  Eigen::Matrix2d cov;
  cov << moments.var1, moments.cov12, moments.cov12, moments.var2;

  // sum_ij S_ij F_i C F_j' = sum_i F_i C (sum_j S_ij F_j)'.
  std::array<Eigen::Matrix4d, 2> f_mix;
  for (int i = 0; i < 2; ++i) {
    f_mix[i] = cov(i, 0) * f[0] + cov(i, 1) * f[1];
  }

  // The mean is carried in extended precision: when the two stocks' expected
  // gains nearly cancel, double rounding of the per-stock means would
  // otherwise dominate the relative error of E[g].
  using Vector4l = Eigen::Matrix<long double, 4, 1>;
  using Matrix4l = Eigen::Matrix<long double, 4, 4>;
  const long double mu1_l = mu1, mu2_l = mu2;
  const Matrix4l f_bar_l =
      Matrix4l::Identity() + mu1_l * f[0].cast<long double>() + mu2_l * f[1].cast<long double>();
  const Vector4l h_bar_l = mu1_l * h[0].cast<long double>() + mu2_l * h[1].cast<long double>();
  Vector4l m = Vector4l::Zero();
  Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector4d md = m.cast<double>();
    const Eigen::Vector4d u1 = f[0] * md + h[0];
    const Eigen::Vector4d u2 = f[1] * md + h[1];
    Eigen::Matrix4d next = f_bar * c * f_bar.transpose();
    next.noalias() += (f[0] * c) * f_mix[0].transpose();
    next.noalias() += (f[1] * c) * f_mix[1].transpose();
    next.noalias() += u1 * (cov(0, 0) * u1 + cov(0, 1) * u2).transpose();
    next.noalias() += u2 * (cov(1, 0) * u1 + cov(1, 1) * u2).transpose();
    c = next;
    m = (f_bar_l * m + h_bar_l).eval();
  }

  GainMoments out;
  out.mean = static_cast<double>(m(0) + m(1));
  double var = c(0, 0) + c(1, 1) + 2.0 * c(0, 1);
  if (var < 0.0) {
    const double scale = std::max(1.0, c(0, 0) + c(1, 1));
    if (var < -kNegativeVarianceTol * scale) {
      throw ConsistencyError("variance recursion produced negative variance " +
                             std::to_string(var));
    }
    var = 0.0;
  }
  out.variance = var;
  out.std = std::sqrt(var);
  return out;
}

bool rpe_holds(double delta, double mu1, double mu2) {
  const bool zero1 = mu1 == 0.0;
  const bool zero2 = mu2 == 0.0;
  if (zero1 && zero2) {
    return false;
  }
  if (zero1 != zero2) {
    return true;
  }
  const double ad = std::abs(delta);
  return ad > 0.0 && ad < 1.0 && sign_of(delta) == sign_of(mu1) * sign_of(mu2);
}

QuadrantReport quadrant_table_check(const ControllerParams& params, double mu1, double mu2,
                                    int n) {
  if (mu1 == 0.0 || mu2 == 0.0) {
    throw DomainError("quadrant check requires both drifts nonzero");
  }
  require_horizon(n);
  const SpectralParams sp = spectral_params(params, mu1, mu2);
  const double a = params.k1 * mu1;
  const double b = params.k2 * mu2;

  QuadrantReport rep;
  rep.n = n;
  rep.theta = sp.theta;
  rep.sign_alpha1 = sign_of(sp.alpha1);
  rep.sign_alpha2 = sign_of(sp.alpha2);
  rep.sign_beta1 = sign_of(sp.beta1);
  rep.sign_beta2 = sign_of(sp.beta2);

  std::array<int, 4> expected{};
  if (mu1 > 0.0 && mu2 > 0.0) {
    rep.quadrant = Quadrant::kPosPos;
    rep.theta_lower = std::abs(a - b);
    rep.theta_upper = a + b;
    expected = {1, 1, 1, 1};
  } else if (mu1 < 0.0 && mu2 < 0.0) {
    rep.quadrant = Quadrant::kNegNeg;
    rep.theta_lower = std::abs(a - b);
    rep.theta_upper = std::abs(a + b);
    expected = {1, 1, -1, -1};
  } else if (mu1 > 0.0) {
    rep.quadrant = Quadrant::kPosNeg;
    rep.theta_lower = std::abs(a + b);
    rep.theta_upper = a - b;
    expected = {-1, 1, 1, -1};
  } else {
    rep.quadrant = Quadrant::kNegPos;
    rep.theta_lower = std::abs(a + b);
    rep.theta_upper = b - a;
    expected = {1, -1, 1, -1};
  }
  rep.theta_bounds_hold = rep.theta_lower < sp.theta && sp.theta < rep.theta_upper;
  rep.signs_match_table = rep.sign_alpha1 == expected[0] && rep.sign_alpha2 == expected[1] &&
                          rep.sign_beta1 == expected[2] && rep.sign_beta2 == expected[3];

  const double phi1 = phi_n(n, sp.alpha1);
  const double phi2 = phi_n(n, sp.alpha2);
  const double num1 = params.i02 * mu2 * sp.beta1 + params.i01 * mu1 * sp.beta2;
  const double num2 = params.i02 * mu2 * sp.beta2 + params.i01 * mu1 * sp.beta1;
  rep.first_inequality = phi1 * num1 / sp.alpha1 > 0.0;
  rep.second_inequality = phi2 * num2 / sp.alpha2 > 0.0;
  rep.third_inequality = phi1 / sp.alpha1 + phi2 / sp.alpha2 >= 0.0;
  rep.all_satisfied = rep.theta_bounds_hold && rep.signs_match_table && rep.first_inequality &&
                      rep.second_inequality && rep.third_inequality;
  return rep;
}

}  // namespace slslab
