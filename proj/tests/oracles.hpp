#pragma once

#include <cstdint>
#include <random>

#include "csp/duopoly.hpp"
#include "csp/types.hpp"

// Search-based reference solvers. They share only the demand definitions with
// the library and never call the closed-form equilibrium paths, so agreement
// is evidence, not tautology.
namespace csp::test {

// Deterministic unit draw from the engine's raw 64-bit output; portable across
// standard libraries, unlike the distribution adaptors.
inline double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
inline double uniform(std::mt19937_64& g, double lo, double hi) { return lo + (hi - lo) * unit(g); }

// Monopoly profit with demands clamped to [0,1]; the search objective.
double clamped_mono_profit(const MonopolyParams& m, double p_b, double p_c);

struct MonoOracleResult {
  double p_b = 0.0, p_c = 0.0, profit = 0.0;
};

// Exhaustive grid over [lo,hi]^2 at `step`, then `refine_rounds` passes that
// shrink the window tenfold around the incumbent best.
MonoOracleResult oracle_monopoly(const MonopolyParams& m, double lo, double hi, double step,
                                 int refine_rounds);

struct FixedPointResult {
  double q_b = 0.0, q_c = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped iteration on the marginal-agent indifference system
//   q_b = (u0_b + b_b q_c - p_b)/t_b,  q_c = (u0_c + b_c q_b - p_c)/t_c,
// which never forms the matrix-inverse demand expression.
FixedPointResult oracle_mono_demand_fp(const MonopolyParams& m, double p_b, double p_c,
                                       double damping = 0.5, double tol = 1e-13,
                                       int max_iter = 200000);

// One platform's profit with both own shares clamped to [0,1].
double clamped_duo_profit(const DuopolyParams& p, const PriceQuad& q, Platform id);

struct DuoBR {
  double p_b = 0.0, p_c = 0.0, profit = 0.0;
};

// Grid+refine maximization of one platform's clamped profit, rival fixed.
DuoBR oracle_duopoly_br(const DuopolyParams& p, Platform id, double rival_b, double rival_c,
                        double lo, double hi, double step, int refine_rounds);

struct DuoOracleResult {
  PriceQuad prices;
  int rounds = 0;
  bool converged = false;
};

// Alternating grid best responses until a full round moves no price by more
// than `tol`.
DuoOracleResult oracle_duopoly_nash(const DuopolyParams& p, PriceQuad start, double lo, double hi,
                                    double step, int refine_rounds, int max_rounds, double tol);

struct DuoFixedPoint {
  double q_wb = 0.0, q_wc = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped iteration on the two-platform indifference system in (q_wb, q_wc).
DuoFixedPoint oracle_duo_demand_fp(const DuopolyParams& p, const PriceQuad& q, double damping = 0.5,
                                   double tol = 1e-13, int max_iter = 200000);

struct OneSidedOracleResult {
  double p_wb = 0.0, p_nb = 0.0, p_wc = 0.0, p_nc = 0.0;
  double r_w = 0.0, r_n = 0.0;
  double q_wc = 0.0, q_nc = 0.0;
  int rounds = 0;
  bool converged = false;
};

// Appendix model reference: alternating 1-D grid+refine over each commuter
// price with the worksite price pinned to full surplus extraction
// p_ib = q_ic * alpha_i throughout.
OneSidedOracleResult oracle_onesided(const DuopolyParams& p, double lo, double hi, double step,
                                     int refine_rounds, int max_rounds, double tol);

}  // namespace csp::test
