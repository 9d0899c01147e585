#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csp/types.hpp"

namespace csp {

// Appendix model: worksites may multi-home; commuters single-home. Covers
// configuration consistency, price-overlap analysis at symmetric prices, and
// the one-sided-effects equilibrium (beta = 0) with regime selection.

ConditionReport validate_appendix(const DuopolyParams& p,
                                  const std::optional<Participation>& participation = std::nullopt);

struct ClampedShare {
  double q_wc = 0.0;
  bool clamped = false;
};

// Commuter Hotelling share when every worksite multi-homes.
ClampedShare commuter_share_config1(const DuopolyParams& p, const PriceQuad& prices);

struct ConfigurationStatus {
  int id = 0;  // 1 multihome, 2 single-home-W, 3 single-home-N, 4 join-neither
  bool consistent = false;
  double q_wc = 0.0;        // share under this configuration's own formula
  double margin_w = 0.0;    // slack of the W-side inequality
  double margin_n = 0.0;    // slack of the N-side inequality
};

std::vector<ConfigurationStatus> config_consistency(const DuopolyParams& p, const PriceQuad& prices);

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool empty() const { return !(lo <= hi); }
  bool contains(double v) const { return !empty() && lo <= v && v <= hi; }
};

struct OverlapClassification {
  Interval a;  // configurations 1, 2, 3 jointly consistent
  Interval b;  // configurations 2, 3, 4 jointly consistent
  bool in_a = false, in_b = false;
};

// Both platforms at identical prices (p_b, p_c).
OverlapClassification overlap_symmetric(const DuopolyParams& p, double p_b, double p_c);

enum class Regime { Interior, ZeroCommuterPrice };

struct OneSidedEquilibrium {
  Regime regime = Regime::Interior;
  PriceQuad prices;
  double r_w = 0.0, r_n = 0.0;
  double q_wc = 0.0, q_nc = 0.0;  // commuter shares; every worksite multi-homes
  double regime_margin_1 = 0.0, regime_margin_2 = 0.0;
  ConditionReport conditions;
  std::string note;
};

OneSidedEquilibrium onesided_equilibrium(const DuopolyParams& p);

struct DeviationCheck {
  double r_tilde = 0.0;  // commuter-only deviation profit of W
  double r_w = 0.0;
  bool dominated = false;  // r_tilde < r_w
  bool guard_ok = false;
  double guard_margin = 0.0;
  std::string note;
};

DeviationCheck deviation_profit(const DuopolyParams& p);

}  // namespace csp
