#include "slslab/controller.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "slslab/errors.hpp"

namespace slslab {

void ControllerParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ParameterError(std::string(name) + " must be a positive finite number, got " +
                           std::to_string(v));
    }
  };
  positive(i01, "i01");
  positive(i02, "i02");
  positive(k1, "k1");
  positive(k2, "k2");
  if (!(std::abs(delta) < 1.0)) {
    throw ParameterError("delta must satisfy |delta| < 1, got " + std::to_string(delta));
  }
}

SlsState init_state(const ControllerParams& params) {
  params.validate();
  return SlsState{};
}

InvestmentQuad investments(const SlsState& s, const ControllerParams& p) {
  InvestmentQuad q;
  q.i1l = p.i01 + p.k1 * s.g1l - p.delta * p.k2 * s.g2s;
  q.i1s = -p.i01 - p.k1 * s.g1s + p.delta * p.k2 * s.g2l;
  q.i2l = p.i02 + p.k2 * s.g2l - p.delta * p.k1 * s.g1s;
  q.i2s = -p.i02 - p.k2 * s.g2s + p.delta * p.k1 * s.g1l;
  return q;
}

SlsState cc_sls_step(const SlsState& s, double rho1, double rho2, const ControllerParams& params,
                     const std::optional<InvestmentQuad>& override_quad) {
  // Accumulating g + I*rho keeps the delta == 0 trajectory bit-identical to
  // the decoupled update equations.
  const InvestmentQuad q = override_quad ? *override_quad : investments(s, params);
  SlsState next;
  next.g1l = s.g1l + q.i1l * rho1;
  next.g1s = s.g1s + q.i1s * rho1;
  next.g2l = s.g2l + q.i2l * rho2;
  next.g2s = s.g2s + q.i2s * rho2;
  next.stage = s.stage + 1;
  return next;
}

AccountSnapshot make_account(double v0, const SlsState& state, const InvestmentQuad& quad) {
  AccountSnapshot a;
  a.v0 = v0;
  a.v = v0 + state.total_gain();
  a.bankrupt = a.v <= 0.0;
  a.leverage = leverage_ratio(quad, a);
  return a;
}

double leverage_ratio(const InvestmentQuad& quad, const AccountSnapshot& account) {
  if (account.v <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return (std::abs(quad.net1()) + std::abs(quad.net2())) / account.v;
}

InvestmentQuad apply_leverage_cap(const InvestmentQuad& quad, const AccountSnapshot& account,
                                  double cap) {
  if (!(cap > 0.0)) {
    throw ParameterError("leverage cap must be positive, got " + std::to_string(cap));
  }
  if (account.v <= 0.0) {
    throw BankruptAccountError("cannot cap leverage of a bankrupt account (V = " +
                               std::to_string(account.v) + ")");
  }
  const double lev = leverage_ratio(quad, account);
  if (lev <= cap) {
    return quad;
  }
  return quad.scaled(cap / lev);
}

}  // namespace slslab
