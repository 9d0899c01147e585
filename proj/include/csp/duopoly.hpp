#pragma once

#include <cstdint>
#include <utility>

#include "csp/types.hpp"

namespace csp {

// Two platforms W and N, Hotelling competition on each side with cross-side
// externalities. Demands are affine in the four prices.

Participation duopoly_demand(const DuopolyParams& p, const PriceQuad& prices);
std::pair<double, double> duopoly_profits(const DuopolyParams& p, const PriceQuad& prices);

struct SolveOptions {
  int br_starts = 5;
  std::uint64_t seed = 12345;
  bool deviation_check = true;
  int deviation_grid = 101;
  double deviation_span = 1.0;
  double deviation_tol = 1e-6;
  double br_tol = 1e-8;
  bool br_check = true;
};

// Profit-maximizing own prices against fixed rival prices; own-price system is
// linear, solved directly with zero lower bounds handled by a 4-pattern
// complementarity sweep.
PricePair best_response(const DuopolyParams& p, Platform which, const PricePair& rival);

// Simultaneous price-setting Nash equilibrium via the stacked 4x4 FOC system,
// cross-checked by deviation scan and seeded best-response iteration.
DuoOutcome nash_equilibrium(const DuopolyParams& p, const SolveOptions& opt = {});

struct SymmetricDuopolyEquilibrium {
  double p_b = 0.0, p_c = 0.0;
  double psi_b = 0.0, psi_c = 0.0;
  double r = 0.0;
  bool asymmetric_cost_warning = false;  // closed form is written in W costs only
};

// Closed-form equal-price equilibrium; coincides with the unrestricted Nash
// only under full platform symmetry.
SymmetricDuopolyEquilibrium symmetric_equilibrium(const DuopolyParams& p);

struct IncrementalUtilities {
  // Multi-homing increments relative to single-homing.
  // Case (i): all of the group on one platform; evaluated at the far agent x=1.
  // Case (ii): the group is split; evaluated at the indifferent agent.
  double worksite_case1 = 0.0, worksite_case2 = 0.0;
  double commuter_case1 = 0.0, commuter_case2 = 0.0;
  // Case-(i) premise: the far agent weakly prefers the distant platform alone
  // (all-on-W scenario: x=1 prefers W alone over N alone). Negativity of the
  // case-(i) increment is only claimed under this premise.
  bool worksite_case1_premise = false;
  bool commuter_case1_premise = false;
};

IncrementalUtilities multihome_incremental_utility(const DuopolyParams& p, const PriceQuad& prices,
                                                   const Participation& participation);

}  // namespace csp
