#pragma once

#include <utility>

#include "csp/types.hpp"

namespace csp {

// Monopoly platform on two Hotelling lines with cross-side externalities.

MonoParticipation monopoly_demand(const MonopolyParams& p, const PricePair& prices);
double monopoly_profit(const MonopolyParams& p, const PricePair& prices);
MonoOutcome monopoly_equilibrium(const MonopolyParams& p);
LossLeaderPair loss_leader(const MonopolyParams& p, const PricePair& prices);

// Saturating participation curve phi(U) = clamp(slope*U, 0, 1).
// derivative() returns the secant phi/U above the saturation point so the
// markup phi/phi' stays continuous; markup(u) = max(u, 0) everywhere.
struct LinearCurve {
  double slope = 1.0;

  double value(double u) const {
    double v = slope * u;
    if (v < 0.0) return 0.0;
    if (v > 1.0) return 1.0;
    return v;
  }
  double derivative(double u) const {
    if (slope * u >= 1.0) return 1.0 / u;
    return slope;
  }
  double markup(double u) const { return value(u) / derivative(u); }
};

struct BenchmarkOptions {
  double damping = 0.5;
  double tol = 1e-12;
  int max_iter = 100000;
};

struct BenchmarkSolution {
  double u_b = 0.0, u_c = 0.0;
  PricePair prices;
  double q_b = 0.0, q_c = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Joint markup identities for both sides, solved by damped fixed-point iteration
// on the group utilities. Note the cross-coefficient pairing: the B-side price
// identity carries b_c with q_c (and symmetrically), while utilities carry the
// own-side coefficient. Returned prices invert the utility definition exactly;
// the residual measures the markup identities.
BenchmarkSolution benchmark_solve(const MonopolyParams& p, const LinearCurve& curve_b,
                                  const LinearCurve& curve_c, const BenchmarkOptions& opt = {});

// Relative markup-rule residuals at a solution: zero iff price = perceived cost
// + inverse-semi-elasticity markup on each side.
std::pair<double, double> lerner_residuals(const MonopolyParams& p, const BenchmarkSolution& sol,
                                           const LinearCurve& curve_b, const LinearCurve& curve_c);

}  // namespace csp
