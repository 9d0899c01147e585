#include "csp/monopoly.hpp"

#include <cmath>

#include "csp/conditions.hpp"
#include "csp/errors.hpp"

namespace csp {

MonoParticipation monopoly_demand(const MonopolyParams& p, const PricePair& prices) {
  check_finite(p, "monopoly", "monopoly_demand");
  double den = p.t_b * p.t_c - p.b_b * p.b_c;
  if (!(den > 0.0))
    throw Error(ErrorKind::DegenerateDemand, "monopoly", "monopoly_demand",
                "t_b*t_c - b_b*b_c must be positive");
  MonoParticipation q;
  q.q_b = (p.b_b * (p.u0_c - prices.p_c) + p.t_c * (p.u0_b - prices.p_b)) / den;
  q.q_c = (p.b_c * (p.u0_b - prices.p_b) + p.t_b * (p.u0_c - prices.p_c)) / den;
  q.valid = q.q_b >= -1e-9 && q.q_b <= 1.0 + 1e-9 && q.q_c >= -1e-9 && q.q_c <= 1.0 + 1e-9;
  return q;
}

double monopoly_profit(const MonopolyParams& p, const PricePair& prices) {
  MonoParticipation q = monopoly_demand(p, prices);
  return (prices.p_b - p.f_b) * q.q_b + (prices.p_c - p.f_c) * q.q_c;
}

LossLeaderPair loss_leader(const MonopolyParams& p, const PricePair& prices) {
  LossLeaderPair ll;
  ll.margin_b = prices.p_b - p.f_b;
  ll.margin_c = prices.p_c - p.f_c;
  ll.b = ll.margin_b < 0.0;
  ll.c = ll.margin_c < 0.0;
  return ll;
}

MonoOutcome monopoly_equilibrium(const MonopolyParams& p) {
  MonoOutcome out;
  out.conditions = validate_monopoly(p);
  if (!out.conditions.passed("A0"))
    throw Error(ErrorKind::Precondition, "monopoly", "monopoly_equilibrium",
                "A0 fails: nonpositive rate or differentiation cost");
  if (!out.conditions.passed("A1"))
    throw Error(ErrorKind::GatingCondition, "monopoly", "monopoly_equilibrium",
                "A1 fails: profit is not concave");

  double s = p.b_b + p.b_c;
  double d = 4.0 * p.t_b * p.t_c - s * s;
  double cross = 2.0 * p.t_b * p.t_c - p.b_b * p.b_c;

  out.prices.p_b = (-p.b_b * p.b_b * p.f_b - p.b_c * p.b_c * p.u0_b + cross * (p.f_b + p.u0_b) +
                    p.t_b * (p.b_b - p.b_c) * (p.u0_c - p.f_c)) /
                   d;
  out.prices.p_c = (-p.b_c * p.b_c * p.f_c - p.b_b * p.b_b * p.u0_c + cross * (p.f_c + p.u0_c) +
                    p.t_c * (p.b_b - p.b_c) * (p.f_b - p.u0_b)) /
                   d;
  out.shares.q_b = ((p.u0_c - p.f_c) * s + 2.0 * p.t_c * (p.u0_b - p.f_b)) / d;
  out.shares.q_c = (s * (p.u0_b - p.f_b) + 2.0 * p.t_b * (p.u0_c - p.f_c)) / d;
  out.shares.valid = out.shares.q_b >= -1e-9 && out.shares.q_b <= 1.0 + 1e-9 &&
                     out.shares.q_c >= -1e-9 && out.shares.q_c <= 1.0 + 1e-9;
  out.profit = (s * (p.f_b - p.u0_b) * (p.f_c - p.u0_c) + p.t_c * (p.f_b - p.u0_b) * (p.f_b - p.u0_b) +
                p.t_b * (p.f_c - p.u0_c) * (p.f_c - p.u0_c)) /
               d;
  out.loss_leader = loss_leader(p, out.prices);

  // analytic gradient of the profit in prices; zero at the closed form
  double den = p.t_b * p.t_c - p.b_b * p.b_c;
  double dqb_dpb = -p.t_c / den, dqb_dpc = -p.b_b / den;
  double dqc_dpb = -p.b_c / den, dqc_dpc = -p.t_b / den;
  MonoParticipation q = monopoly_demand(p, out.prices);
  double gb = q.q_b + (out.prices.p_b - p.f_b) * dqb_dpb + (out.prices.p_c - p.f_c) * dqc_dpb;
  double gc = q.q_c + (out.prices.p_b - p.f_b) * dqb_dpc + (out.prices.p_c - p.f_c) * dqc_dpc;
  out.foc_residual = std::max(std::fabs(gb), std::fabs(gc));
  return out;
}

BenchmarkSolution benchmark_solve(const MonopolyParams& p, const LinearCurve& curve_b,
                                  const LinearCurve& curve_c, const BenchmarkOptions& opt) {
  check_finite(p, "monopoly", "benchmark_solve");
  if (!(curve_b.slope > 0.0) || !(curve_c.slope > 0.0))
    throw Error(ErrorKind::InvalidParameter, "monopoly", "benchmark_solve",
                "curve slopes must be positive");

  BenchmarkSolution sol;
  sol.u_b = p.u0_b;
  sol.u_c = p.u0_c;
  double res = 0.0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    double q_b = curve_b.value(sol.u_b);
    double q_c = curve_c.value(sol.u_c);
    // markup identities; cross coefficients pair with the opposite side's label
    double p_b = p.f_b - p.u0_b - p.b_c * q_c + curve_b.markup(sol.u_b);
    double p_c = p.f_c - p.u0_c - p.b_b * q_b + curve_c.markup(sol.u_c);
    double nu_b = p.u0_b + p.b_b * q_c - p_b;
    double nu_c = p.u0_c + p.b_c * q_b - p_c;
    res = std::max(std::fabs(nu_b - sol.u_b), std::fabs(nu_c - sol.u_c));
    if (!std::isfinite(res))
      throw Error(ErrorKind::FixedPointDiverged, "monopoly", "benchmark_solve",
                  "iterate became non-finite");
    sol.u_b += opt.damping * (nu_b - sol.u_b);
    sol.u_c += opt.damping * (nu_c - sol.u_c);
    if (res <= opt.tol) break;
  }
  if (res > opt.tol)
    throw Error(ErrorKind::FixedPointDiverged, "monopoly", "benchmark_solve",
                "no fixed point after " + std::to_string(opt.max_iter) +
                    " iterations; last residual " + std::to_string(res));
  sol.iterations = it + 1;
  sol.q_b = curve_b.value(sol.u_b);
  sol.q_c = curve_c.value(sol.u_c);
  // prices invert the utility definition exactly at the converged utilities
  sol.prices.p_b = p.u0_b + p.b_b * sol.q_c - sol.u_b;
  sol.prices.p_c = p.u0_c + p.b_c * sol.q_b - sol.u_c;
  sol.residual =
      std::max(std::fabs(sol.prices.p_b - (p.f_b - p.u0_b - p.b_c * sol.q_c + curve_b.markup(sol.u_b))),
               std::fabs(sol.prices.p_c - (p.f_c - p.u0_c - p.b_b * sol.q_b + curve_c.markup(sol.u_c))));
  return sol;
}

std::pair<double, double> lerner_residuals(const MonopolyParams& p, const BenchmarkSolution& sol,
                                           const LinearCurve& curve_b, const LinearCurve& curve_c) {
  double q_b = curve_b.value(sol.u_b);
  double q_c = curve_c.value(sol.u_c);
  if (sol.prices.p_b == 0.0 || sol.prices.p_c == 0.0 || q_b == 0.0 || q_c == 0.0)
    throw Error(ErrorKind::UndefinedElasticity, "monopoly", "lerner_residuals",
                "zero price or zero participation");
  double inv_eta_b = curve_b.markup(sol.u_b) / sol.prices.p_b;
  double inv_eta_c = curve_c.markup(sol.u_c) / sol.prices.p_c;
  double res_b = (sol.prices.p_b - (p.f_b - p.u0_b - p.b_c * q_c)) / sol.prices.p_b - inv_eta_b;
  double res_c = (sol.prices.p_c - (p.f_c - p.u0_c - p.b_b * q_b)) / sol.prices.p_c - inv_eta_c;
  return {res_b, res_c};
}

}  // namespace csp
