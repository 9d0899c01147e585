#include "csp/multihome.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csp/conditions.hpp"
#include "csp/errors.hpp"

namespace csp {

ConditionReport validate_appendix(const DuopolyParams& p,
                                  const std::optional<Participation>& participation) {
  check_finite(p, "multihome", "validate_appendix");
  ConditionReport r;

  double c1 = -std::fabs(p.u0_b);
  r.entries.push_back({"C1", c1, std::fabs(p.u0_b) <= 1e-12,
                       "standalone worksite value zero; u0_c assumed high (not verifiable)"});

  // equality regime: zero differentiation on the worksite side; margin 0 passes
  r.entries.push_back({"C2i", -p.t_b, std::fabs(p.t_b) <= 1e-12, "requires t_b = 0 exactly"});

  double q_wb = participation ? participation->q_wb : 0.0;
  double q_nb = participation ? participation->q_nb : 0.0;
  double c2ii = p.t_c - (p.beta_n * q_nb + p.beta_w * q_wb);
  r.entries.push_back({"C2ii", c2ii, c2ii > 0.0,
                       participation ? "at the supplied participation"
                                     : "at the all-multihome participation (q_wb = q_nb = 0)"});

  double c3 = std::min({p.alpha_w / 3.0 - p.f_wb, 0.75 * p.alpha_w - p.f_wc,
                        0.75 * p.alpha_w - p.f_nc});
  r.entries.push_back({"C3", c3, c3 > 0.0, "alpha_w only, as stated"});

  return r;
}

ClampedShare commuter_share_config1(const DuopolyParams& p, const PriceQuad& prices) {
  if (!(p.t_c > 0.0))
    throw Error(ErrorKind::Precondition, "multihome", "commuter_share_config1", "t_c must be positive");
  ClampedShare s;
  s.q_wc = 0.5 + (prices.p_nc - prices.p_wc + p.beta_w - p.beta_n) / (2.0 * p.t_c);
  if (s.q_wc < 0.0) {
    s.q_wc = 0.0;
    s.clamped = true;
  } else if (s.q_wc > 1.0) {
    s.q_wc = 1.0;
    s.clamped = true;
  }
  return s;
}

std::vector<ConfigurationStatus> config_consistency(const DuopolyParams& p, const PriceQuad& prices) {
  check_finite(p, "multihome", "config_consistency");
  if (!(p.t_c > 0.0))
    throw Error(ErrorKind::Precondition, "multihome", "config_consistency", "t_c must be positive");
  double two_tc = 2.0 * p.t_c;
  double dc = prices.p_nc - prices.p_wc;
  const double tol = 1e-12;
  std::vector<ConfigurationStatus> out;

  {  // 1: every worksite multi-homes; both platforms worth joining for the far agent
    ConfigurationStatus s;
    s.id = 1;
    s.q_wc = 0.5 + (dc + p.beta_w - p.beta_n) / two_tc;
    s.margin_w = s.q_wc * p.alpha_w - prices.p_wb;
    s.margin_n = (1.0 - s.q_wc) * p.alpha_n - prices.p_nb;
    s.consistent = s.margin_w >= -tol && s.margin_n >= -tol;
    out.push_back(s);
  }
  {  // 2: all worksites on W only
    ConfigurationStatus s;
    s.id = 2;
    s.q_wc = 0.5 + (dc + p.beta_w) / two_tc;
    s.margin_w = s.q_wc * p.alpha_w - prices.p_wb;
    s.margin_n = prices.p_nb - (1.0 - s.q_wc) * p.alpha_n;
    s.consistent = s.margin_w >= -tol && s.margin_n >= -tol;
    out.push_back(s);
  }
  {  // 3: all worksites on N only
    ConfigurationStatus s;
    s.id = 3;
    s.q_wc = 0.5 + (dc - p.beta_n) / two_tc;
    s.margin_w = prices.p_wb - s.q_wc * p.alpha_w;
    s.margin_n = (1.0 - s.q_wc) * p.alpha_n - prices.p_nb;
    s.consistent = s.margin_w >= -tol && s.margin_n >= -tol;
    out.push_back(s);
  }
  {  // 4: worksites join neither; configuration-1 inequalities reversed
    ConfigurationStatus s;
    s.id = 4;
    s.q_wc = 0.5 + (dc + p.beta_w - p.beta_n) / two_tc;
    s.margin_w = prices.p_wb - s.q_wc * p.alpha_w;
    s.margin_n = prices.p_nb - (1.0 - s.q_wc) * p.alpha_n;
    s.consistent = s.margin_w >= -tol && s.margin_n >= -tol;
    out.push_back(s);
  }
  return out;
}

OverlapClassification overlap_symmetric(const DuopolyParams& p, double p_b, double p_c) {
  check_finite(p, "multihome", "overlap_symmetric");
  if (!(p.t_c > 0.0))
    throw Error(ErrorKind::Precondition, "multihome", "overlap_symmetric", "t_c must be positive");
  (void)p_c;  // the stated ranges bound the worksite price only
  double two_tc = 2.0 * p.t_c;
  OverlapClassification o;
  // lower bound uses beta_n in both terms, as stated
  o.a.lo = std::max((0.5 - p.beta_n / two_tc) * p.alpha_n, (0.5 - p.beta_n / two_tc) * p.alpha_w);
  o.a.hi = std::min((0.5 + (p.beta_w - p.beta_n) / two_tc) * p.alpha_w,
                    (0.5 + (p.beta_n - p.beta_w) / two_tc) * p.alpha_n);
  o.b.lo = std::max((0.5 + (p.beta_w - p.beta_n) / two_tc) * p.alpha_w,
                    (0.5 + (p.beta_n - p.beta_w) / two_tc) * p.alpha_n);
  o.b.hi = std::min((0.5 + p.beta_w / two_tc) * p.alpha_w, (0.5 + p.beta_n / two_tc) * p.alpha_n);
  o.in_a = o.a.contains(p_b);
  o.in_b = o.b.contains(p_b);
  return o;
}

OneSidedEquilibrium onesided_equilibrium(const DuopolyParams& p) {
  check_finite(p, "multihome", "onesided_equilibrium");
  if (p.beta_w != 0.0 || p.beta_n != 0.0)
    throw Error(ErrorKind::Precondition, "multihome", "onesided_equilibrium",
                "beta rates must be exactly zero");
  OneSidedEquilibrium e;
  e.conditions = validate_appendix(p);
  if (!e.conditions.all_pass())
    throw Error(ErrorKind::Precondition, "multihome", "onesided_equilibrium",
                "appendix conditions fail: " + e.conditions.failing_ids());

  // every worksite multi-homes; commuter split carried by one shared expression
  double x = (p.f_nc - p.f_wc - p.alpha_minus()) / (6.0 * p.t_c);
  e.q_wc = 0.5 + x;
  e.q_nc = 1.0 - e.q_wc;
  e.prices.p_wb = e.q_wc * p.alpha_w;  // worksite surplus fully extracted
  e.prices.p_nb = e.q_nc * p.alpha_n;

  e.regime_margin_1 = (p.f_nc / 3.0 + 2.0 * p.f_wc / 3.0 + p.t_c) -
                      (p.alpha_n / 3.0 + 2.0 * p.alpha_w / 3.0);
  e.regime_margin_2 = (2.0 * p.f_nc / 3.0 + p.f_wc / 3.0 + p.t_c) -
                      (2.0 * p.alpha_n / 3.0 + p.alpha_w / 3.0);

  if (e.regime_margin_1 >= 0.0 && e.regime_margin_2 >= 0.0) {
    e.regime = Regime::Interior;
    e.prices.p_wc = (p.f_nc - p.alpha_n) / 3.0 + 2.0 * (p.f_wc - p.alpha_w) / 3.0 + p.t_c;
    e.prices.p_nc = 2.0 * (p.f_nc - p.alpha_n) / 3.0 + (p.f_wc - p.alpha_w) / 3.0 + p.t_c;
  } else if (e.regime_margin_1 < 0.0 && e.regime_margin_2 < 0.0) {
    e.regime = Regime::ZeroCommuterPrice;
    e.prices.p_wc = 0.0;
    e.prices.p_nc = 0.0;
    e.note = "commuter shares reported from the equilibrium share expression, "
             "not the zero-price Hotelling split";
  } else {
    std::ostringstream os;
    os << "regime conditions disagree (margins " << e.regime_margin_1 << ", " << e.regime_margin_2
       << "); no stated equilibrium";
    throw Error(ErrorKind::AmbiguousRegime, "multihome", "onesided_equilibrium", os.str());
  }

  e.r_w = e.prices.p_wb - p.f_wb + (e.prices.p_wc - p.f_wc) * e.q_wc;
  e.r_n = e.prices.p_nb - p.f_nb + (e.prices.p_nc - p.f_nc) * e.q_nc;
  return e;
}

DeviationCheck deviation_profit(const DuopolyParams& p) {
  OneSidedEquilibrium e = onesided_equilibrium(p);
  if (e.regime != Regime::Interior)
    throw Error(ErrorKind::Precondition, "multihome", "deviation_profit",
                "interior-regime parameters required");
  DeviationCheck d;
  d.r_w = e.r_w;
  double z = 2.0 * p.alpha_n + p.alpha_w - 2.0 * p.f_nc + 2.0 * p.f_wc - 6.0 * p.t_c;
  d.r_tilde = z * z / (72.0 * p.t_c);
  d.guard_margin = p.t_c - ((p.f_wc - p.f_nc) / 3.0 + p.alpha_w / 6.0 + p.alpha_n / 3.0);
  d.guard_ok = d.guard_margin > 0.0;
  if (!d.guard_ok) d.note = "positive-profit guard violated; commuter-only deviation unprofitable anyway";
  d.dominated = d.r_tilde < d.r_w;
  return d;
}

}  // namespace csp
