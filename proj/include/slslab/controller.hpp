#pragma once

#include <array>
#include <optional>

namespace slslab {

/// Design vector of the cross-coupled long-short controller.
///
/// `delta == 0` is the decoupled controller: two independent single-stock
/// long-short controllers sharing nothing but the account.
struct ControllerParams {
  double i01 = 1.0;    // initial investment, stock 1
  double i02 = 1.0;    // initial investment, stock 2
  double k1 = 1.0;     // feedback gain, stock 1
  double k2 = 1.0;     // feedback gain, stock 2
  double delta = 0.0;  // cross-coupling coefficient, |delta| < 1

  /// Throws ParameterError unless i0 > 0, k > 0 and |delta| < 1.
  void validate() const;

  bool decoupled() const { return delta == 0.0; }

  /// Same parameters with the coupling removed.
  ControllerParams decoupled_twin() const {
    ControllerParams twin = *this;
    twin.delta = 0.0;
    return twin;
  }

  /// Stock 1 and stock 2 exchanged.
  ControllerParams swapped() const { return {i02, i01, k2, k1, delta}; }

  bool operator==(const ControllerParams&) const = default;
};

/// Cumulative gain-loss of the four legs, ordered as the state vector
/// [g1L, g2S, g1S, g2L].
struct SlsState {
  double g1l = 0.0;
  double g2s = 0.0;
  double g1s = 0.0;
  double g2l = 0.0;
  int stage = 0;

  double total_gain() const { return g1l + g1s + g2l + g2s; }
  std::array<double, 4> as_vector() const { return {g1l, g2s, g1s, g2l}; }

  /// Stock 1 and stock 2 exchanged.
  SlsState swapped() const { return {g2l, g1s, g2s, g1l, stage}; }

  bool operator==(const SlsState&) const = default;
};

/// Long and short investment levels in both stocks at one stage.
struct InvestmentQuad {
  double i1l = 0.0;
  double i1s = 0.0;
  double i2l = 0.0;
  double i2s = 0.0;

  double net1() const { return i1l + i1s; }
  double net2() const { return i2l + i2s; }

  InvestmentQuad scaled(double factor) const {
    return {i1l * factor, i1s * factor, i2l * factor, i2s * factor};
  }

  bool operator==(const InvestmentQuad&) const = default;
};

/// Account value under a zero risk-free rate, V = V0 + g.
struct AccountSnapshot {
  double v0 = 1.0;
  double v = 1.0;
  double leverage = 0.0;  // +inf once v <= 0
  bool bankrupt = false;
};

SlsState init_state(const ControllerParams& params);

/// Long/short investment functions with cross-coupling:
///   I_iL = I0i + K_i g_iL - delta K_j g_jS
///   I_iS = -I0i - K_i g_iS + delta K_j g_jL
InvestmentQuad investments(const SlsState& state, const ControllerParams& params);

/// Advances the gain-loss state by one stage given the two returns.
///
/// Without `override_quad` the investments are those of the controller
/// itself. With it (saturated mode) each leg accumulates its overridden
/// investment times the stage return.
SlsState cc_sls_step(const SlsState& state, double rho1, double rho2,
                     const ControllerParams& params,
                     const std::optional<InvestmentQuad>& override_quad = std::nullopt);

/// Builds the account view of `state` (and the leverage implied by `quad`).
AccountSnapshot make_account(double v0, const SlsState& state, const InvestmentQuad& quad);

/// (|I1| + |I2|) / V, or +inf when V <= 0.
double leverage_ratio(const InvestmentQuad& quad, const AccountSnapshot& account);

/// Scales all four legs by cap/L whenever L exceeds `cap`.
/// Throws BankruptAccountError when account.v <= 0 and ParameterError when cap <= 0.
InvestmentQuad apply_leverage_cap(const InvestmentQuad& quad, const AccountSnapshot& account,
                                  double cap);

}  // namespace slslab
