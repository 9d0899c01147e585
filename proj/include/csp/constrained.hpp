#pragma once

#include <string>
#include <vector>

#include "csp/duopoly.hpp"
#include "csp/types.hpp"

namespace csp {

// Demand-gap constraint |q_wc - q_wb| <= eta; the N-side gap is the exact
// negative by adding-up, so one bound covers both platforms.

struct GridSpec {
  double min = 0.0, max = 3.0, step = 0.01;
};

struct ConstraintSpec {
  double eta = 0.05;
  GridSpec grid;
};

struct FeasibleCell {
  PriceQuad prices;
  Participation shares;
  double r_w = 0.0, r_n = 0.0;
  double gap = 0.0;  // q_wc - q_wb
  bool feasible = false;
  std::string note;
};

FeasibleCell feasible(const DuopolyParams& p, const PriceQuad& prices, double eta);

// Grid over price differences (p_nb - p_wb, p_nc - p_wc) with the W prices at
// cost; demands depend on the differences only.
std::vector<FeasibleCell> feasible_region(const DuopolyParams& p, const ConstraintSpec& spec,
                                          double diff_min = -1.0, double diff_max = 1.0,
                                          double diff_step = 0.02);

// Alternating constrained best response on the price grid; joint feasibility
// is checked against the rival's current prices.
DuoOutcome constrained_nash(const DuopolyParams& p, const ConstraintSpec& spec,
                            const SolveOptions& opt = {});

}  // namespace csp
