#include "csp/constrained.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "csp/conditions.hpp"
#include "csp/errors.hpp"

namespace csp {

namespace {

int grid_points(const GridSpec& g, const char* op) {
  if (!(g.step > 0.0) || !(g.min <= g.max))
    throw Error(ErrorKind::InvalidParameter, "constrained", op, "grid needs step > 0 and min <= max");
  return static_cast<int>(std::floor((g.max - g.min) / g.step + 1e-9)) + 1;
}

double snap(const GridSpec& g, int npts, double v) {
  double k = std::round((v - g.min) / g.step);
  if (k < 0.0) k = 0.0;
  if (k > npts - 1) k = npts - 1;
  return g.min + k * g.step;
}

}  // namespace

FeasibleCell feasible(const DuopolyParams& p, const PriceQuad& prices, double eta) {
  if (!(eta >= 0.0))
    throw Error(ErrorKind::InvalidParameter, "constrained", "feasible", "eta must be nonnegative");
  FeasibleCell cell;
  cell.prices = prices;
  cell.shares = duopoly_demand(p, prices);
  auto [r_w, r_n] = duopoly_profits(p, prices);
  cell.r_w = r_w;
  cell.r_n = r_n;
  cell.gap = cell.shares.q_wc - cell.shares.q_wb;
  cell.feasible = std::fabs(cell.gap) <= eta;
  cell.note = "n-side gap is the exact negative under adding-up; one bound covers both platforms";
  return cell;
}

std::vector<FeasibleCell> feasible_region(const DuopolyParams& p, const ConstraintSpec& spec,
                                          double diff_min, double diff_max, double diff_step) {
  check_finite(p, "constrained", "feasible_region");
  if (!(diff_step > 0.0) || !(diff_min <= diff_max))
    throw Error(ErrorKind::InvalidParameter, "constrained", "feasible_region",
                "difference grid needs step > 0 and min <= max");
  int n = static_cast<int>(std::floor((diff_max - diff_min) / diff_step + 1e-9)) + 1;
  std::vector<FeasibleCell> cells;
  cells.reserve(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double db = diff_min + i * diff_step;
      double dc = diff_min + j * diff_step;
      PriceQuad quad{p.f_wb, p.f_wb + db, p.f_wc, p.f_wc + dc};
      cells.push_back(feasible(p, quad, spec.eta));
    }
  }
  return cells;
}

DuoOutcome constrained_nash(const DuopolyParams& p, const ConstraintSpec& spec,
                            const SolveOptions& opt) {
  check_finite(p, "constrained", "constrained_nash");
  if (!(spec.eta > 0.0))
    throw Error(ErrorKind::InvalidParameter, "constrained", "constrained_nash", "eta must be positive");
  const GridSpec& g = spec.grid;
  int npts = grid_points(g, "constrained_nash");

  // start from the unconstrained equilibrium snapped to the grid; fall back to
  // costs if the unconstrained game has no clean solution
  PriceQuad cur;
  {
    SolveOptions cheap = opt;
    cheap.deviation_check = false;
    cheap.br_check = false;
    try {
      cur = nash_equilibrium(p, cheap).prices;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::GatingCondition || e.kind() == ErrorKind::DegenerateDemand) throw;
      cur = PriceQuad{p.f_wb, p.f_nb, p.f_wc, p.f_nc};
    }
  }
  cur = PriceQuad{snap(g, npts, cur.p_wb), snap(g, npts, cur.p_nb), snap(g, npts, cur.p_wc),
                  snap(g, npts, cur.p_nc)};

  // affine demand pieces, gap = q_wc - q_wb as a function of the price quad
  double d = 4.0 * p.t_b * p.t_c - p.alpha_plus() * p.beta_plus();
  double a0 = 0.5 - (p.t_c * p.alpha_minus() + p.alpha_plus() * p.beta_minus() / 2.0) / d;
  double c0 = 0.5 - (p.t_b * p.beta_minus() + p.alpha_minus() * p.beta_plus() / 2.0) / d;

  auto eval = [&](double p_wb, double p_nb, double p_wc, double p_nc, double& q_wb, double& q_wc) {
    double db = p_nb - p_wb;
    double dc = p_nc - p_wc;
    q_wb = a0 + (2.0 * p.t_c * db + p.alpha_plus() * dc) / d;
    q_wc = c0 + (p.beta_plus() * db + 2.0 * p.t_b * dc) / d;
  };

  const int max_rounds = 1000;
  PriceQuad prev = cur, prev2 = cur;
  bool cycle = false;
  int rounds = 0;
  for (rounds = 1; rounds <= max_rounds; ++rounds) {
    prev2 = prev;
    prev = cur;

    // W: own argmax over jointly feasible grid cells, rival fixed; ascending
    // scan keeps the first maximizer, i.e. the lexicographically smallest pair
    bool moved_w = false;
    {
      double best = -1e300;
      double bb = cur.p_wb, bc = cur.p_wc;
      bool found = false;
      for (int ib = 0; ib < npts; ++ib) {
        for (int ic = 0; ic < npts; ++ic) {
          double pb = g.min + ib * g.step;
          double pc = g.min + ic * g.step;
          double q_wb, q_wc;
          eval(pb, cur.p_nb, pc, cur.p_nc, q_wb, q_wc);
          if (std::fabs(q_wc - q_wb) > spec.eta) continue;
          double profit = (pb - p.f_wb) * q_wb + (pc - p.f_wc) * q_wc;
          if (profit > best) {
            best = profit;
            bb = pb;
            bc = pc;
            found = true;
          }
        }
      }
      if (found && (bb != cur.p_wb || bc != cur.p_wc)) {
        cur.p_wb = bb;
        cur.p_wc = bc;
        moved_w = true;
      }
      if (!found) moved_w = false;
    }

    // N: same scan against W's updated prices
    bool moved_n = false;
    {
      double best = -1e300;
      double bb = cur.p_nb, bc = cur.p_nc;
      bool found = false;
      for (int ib = 0; ib < npts; ++ib) {
        for (int ic = 0; ic < npts; ++ic) {
          double pb = g.min + ib * g.step;
          double pc = g.min + ic * g.step;
          double q_wb, q_wc;
          eval(cur.p_wb, pb, cur.p_wc, pc, q_wb, q_wc);
          if (std::fabs(q_wc - q_wb) > spec.eta) continue;
          double profit = (pb - p.f_nb) * (1.0 - q_wb) + (pc - p.f_nc) * (1.0 - q_wc);
          if (profit > best) {
            best = profit;
            bb = pb;
            bc = pc;
            found = true;
          }
        }
      }
      if (found && (bb != cur.p_nb || bc != cur.p_nc)) {
        cur.p_nb = bb;
        cur.p_nc = bc;
        moved_n = true;
      }
      if (!found) moved_n = false;
    }

    if (cur == prev) {
      if (!moved_w && !moved_n) {
        double q_wb, q_wc;
        eval(cur.p_wb, cur.p_nb, cur.p_wc, cur.p_nc, q_wb, q_wc);
        if (std::fabs(q_wc - q_wb) > spec.eta)
          throw Error(ErrorKind::Infeasible, "constrained", "constrained_nash",
                      "no feasible grid cell for either platform");
      }
      break;
    }
    if (cur == prev2) {  // alternating 2-cycle
      if (prev < cur) cur = prev;
      cycle = true;
      break;
    }
  }
  if (rounds > max_rounds) {
    std::ostringstream os;
    os << "no settlement after " << max_rounds << " rounds; last quads (" << prev.p_wb << ","
       << prev.p_nb << "," << prev.p_wc << "," << prev.p_nc << ") -> (" << cur.p_wb << ","
       << cur.p_nb << "," << cur.p_wc << "," << cur.p_nc << ")";
    throw Error(ErrorKind::NonConvergence, "constrained", "constrained_nash", os.str());
  }

  DuoOutcome out;
  out.prices = cur;
  out.shares = duopoly_demand(p, cur);
  auto [r_w, r_n] = duopoly_profits(p, cur);
  out.r_w = r_w;
  out.r_n = r_n;
  out.gap = out.shares.q_wc - out.shares.q_wb;
  out.conditions = validate_duopoly(p, out.shares);
  out.loss_leader = LossLeaderQuad{cur.p_wb < p.f_wb, cur.p_nb < p.f_nb, cur.p_wc < p.f_wc,
                                   cur.p_nc < p.f_nc};
  out.constrained = true;
  out.eta = spec.eta;
  out.cycle = cycle;
  out.diag.iterations = rounds;
  bool negdef = 16.0 * p.t_b * p.t_c > (p.alpha_plus() + p.beta_plus()) * (p.alpha_plus() + p.beta_plus());
  out.diag.hessian_negdef_w = negdef;
  out.diag.hessian_negdef_n = negdef;
  return out;
}

}  // namespace csp
