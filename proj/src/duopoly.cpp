#include "csp/duopoly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "csp/conditions.hpp"
#include "csp/errors.hpp"

namespace csp {

namespace {

struct DemandCoefs {
  double d;        // 4 t_b t_c - alpha_plus*beta_plus, positive under the profit gate
  double a0, c0;   // worksite / commuter intercepts at equal prices
};

DemandCoefs demand_coefs(const DuopolyParams& p, const char* op) {
  double d = 4.0 * p.t_b * p.t_c - p.alpha_plus() * p.beta_plus();
  if (!(d > 0.0))
    throw Error(ErrorKind::DegenerateDemand, "duopoly", op,
                "4*t_b*t_c - alpha_plus*beta_plus must be positive");
  DemandCoefs c;
  c.d = d;
  c.a0 = 0.5 - (p.t_c * p.alpha_minus() + p.alpha_plus() * p.beta_minus() / 2.0) / d;
  c.c0 = 0.5 - (p.t_b * p.beta_minus() + p.alpha_minus() * p.beta_plus() / 2.0) / d;
  return c;
}

// FOC system in x = (p_wb, p_wc, p_nb, p_nc), each row scaled by d:
// row i == d * (owner's own-price profit gradient), owner = W for rows 0-1, N for 2-3.
struct FocSystem {
  Eigen::Matrix4d m;
  Eigen::Vector4d rhs;
};

FocSystem foc_system(const DuopolyParams& p, const DemandCoefs& c) {
  double ap = p.alpha_plus(), bp = p.beta_plus();
  double s = ap + bp;
  FocSystem f;
  f.m << -4.0 * p.t_c, -s, 2.0 * p.t_c, ap,
         -s, -4.0 * p.t_b, bp, 2.0 * p.t_b,
         2.0 * p.t_c, ap, -4.0 * p.t_c, -s,
         bp, 2.0 * p.t_b, -s, -4.0 * p.t_b;
  f.rhs << -c.a0 * c.d - 2.0 * p.t_c * p.f_wb - bp * p.f_wc,
           -c.c0 * c.d - ap * p.f_wb - 2.0 * p.t_b * p.f_wc,
           -(1.0 - c.a0) * c.d - 2.0 * p.t_c * p.f_nb - bp * p.f_nc,
           -(1.0 - c.c0) * c.d - ap * p.f_nb - 2.0 * p.t_b * p.f_nc;
  return f;
}

double foc_scale(const FocSystem& f) {
  double s = 1.0;
  for (int i = 0; i < 4; ++i) s = std::max(s, std::fabs(f.rhs(i)));
  return s;
}

// Solve with prices bound below by zero: enumerate pinned-at-zero patterns by
// ascending pattern size, accept the first where free prices are nonnegative
// and every pinned price has nonpositive owner gradient.
Eigen::Vector4d solve_bounded(const FocSystem& f, const char* op, int* pattern_out) {
  double scale = foc_scale(f);
  std::array<int, 16> order{};
  for (int i = 0; i < 16; ++i) order[static_cast<size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [](int a, int b) { return __builtin_popcount(a) < __builtin_popcount(b); });

  for (int mask : order) {
    std::array<int, 4> free_idx{};
    int nf = 0;
    for (int i = 0; i < 4; ++i)
      if (!(mask & (1 << i))) free_idx[static_cast<size_t>(nf++)] = i;

    Eigen::Vector4d x = Eigen::Vector4d::Zero();
    if (nf > 0) {
      Eigen::MatrixXd mf(nf, nf);
      Eigen::VectorXd rf(nf);
      for (int r = 0; r < nf; ++r) {
        rf(r) = f.rhs(free_idx[static_cast<size_t>(r)]);
        for (int cidx = 0; cidx < nf; ++cidx)
          mf(r, cidx) = f.m(free_idx[static_cast<size_t>(r)], free_idx[static_cast<size_t>(cidx)]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(mf);
      if (!lu.isInvertible()) {
        if (mask == 0)
          throw Error(ErrorKind::SingularSystem, "duopoly", op, "singular first-order system");
        continue;
      }
      Eigen::VectorXd xf = lu.solve(rf);
      for (int r = 0; r < nf; ++r) x(free_idx[static_cast<size_t>(r)]) = xf(r);
    }

    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      if (mask & (1 << i)) {
        double g = f.m.row(i) * x - f.rhs(i);  // d * owner gradient at the bound
        if (g > 1e-9 * scale) ok = false;
      } else if (x(i) < -1e-12) {
        ok = false;
      }
    }
    if (!ok) continue;
    for (int i = 0; i < 4; ++i)
      if (x(i) < 0.0) x(i) = 0.0;
    if (pattern_out) *pattern_out = mask;
    return x;
  }
  throw Error(ErrorKind::NotAnEquilibrium, "duopoly", op,
              "no self-consistent nonnegative-price pattern");
}

PriceQuad to_quad(const Eigen::Vector4d& x) {
  return PriceQuad{x(0), x(2), x(1), x(3)};  // internal order is (wb, wc, nb, nc)
}

double deterministic_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace

Participation duopoly_demand(const DuopolyParams& p, const PriceQuad& prices) {
  check_finite(p, "duopoly", "duopoly_demand");
  DemandCoefs c = demand_coefs(p, "duopoly_demand");
  double db = prices.p_nb - prices.p_wb;
  double dc = prices.p_nc - prices.p_wc;
  Participation q;
  q.q_wb = c.a0 + (2.0 * p.t_c * db + p.alpha_plus() * dc) / c.d;
  q.q_wc = c.c0 + (p.beta_plus() * db + 2.0 * p.t_b * dc) / c.d;
  q.q_nb = 1.0 - q.q_wb;
  q.q_nc = 1.0 - q.q_wc;
  auto in01 = [](double v) { return v >= -1e-9 && v <= 1.0 + 1e-9; };
  q.valid = in01(q.q_wb) && in01(q.q_wc) && in01(q.q_nb) && in01(q.q_nc);
  return q;
}

std::pair<double, double> duopoly_profits(const DuopolyParams& p, const PriceQuad& prices) {
  Participation q = duopoly_demand(p, prices);
  double r_w = (prices.p_wb - p.f_wb) * q.q_wb + (prices.p_wc - p.f_wc) * q.q_wc;
  double r_n = (prices.p_nb - p.f_nb) * q.q_nb + (prices.p_nc - p.f_nc) * q.q_nc;
  return {r_w, r_n};
}

PricePair best_response(const DuopolyParams& p, Platform which, const PricePair& rival) {
  check_finite(p, "duopoly", "best_response");
  DemandCoefs c = demand_coefs(p, "best_response");
  if (!(16.0 * p.t_b * p.t_c > (p.alpha_plus() + p.beta_plus()) * (p.alpha_plus() + p.beta_plus())))
    throw Error(ErrorKind::NotAnEquilibrium, "duopoly", "best_response",
                "own-price profit is not concave");
  FocSystem f = foc_system(p, c);
  double scale = foc_scale(f);

  // own 2x2 block with the rival's prices moved to the right-hand side
  int ob = which == Platform::W ? 0 : 2;  // own rows/cols
  int rb = which == Platform::W ? 2 : 0;
  Eigen::Matrix2d m;
  m << f.m(ob, ob), f.m(ob, ob + 1), f.m(ob + 1, ob), f.m(ob + 1, ob + 1);
  Eigen::Vector2d rhs;
  rhs << f.rhs(ob) - f.m(ob, rb) * rival.p_b - f.m(ob, rb + 1) * rival.p_c,
         f.rhs(ob + 1) - f.m(ob + 1, rb) * rival.p_b - f.m(ob + 1, rb + 1) * rival.p_c;

  for (int mask = 0; mask < 4; ++mask) {
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    if (mask == 0) {
      x = m.fullPivLu().solve(rhs);
    } else if (mask == 1) {  // p_b pinned
      x(1) = (rhs(1)) / m(1, 1);
    } else if (mask == 2) {  // p_c pinned
      x(0) = (rhs(0)) / m(0, 0);
    }
    bool ok = true;
    for (int i = 0; i < 2 && ok; ++i) {
      double g = m.row(i) * x - rhs(i);
      if (mask & (1 << i)) {
        if (g > 1e-9 * scale) ok = false;
      } else if (x(i) < -1e-12) {
        ok = false;
      }
    }
    if (!ok) continue;
    return PricePair{std::max(x(0), 0.0), std::max(x(1), 0.0)};
  }
  throw Error(ErrorKind::NotAnEquilibrium, "duopoly", "best_response",
              "no self-consistent nonnegative best response");
}

SymmetricDuopolyEquilibrium symmetric_equilibrium(const DuopolyParams& p) {
  check_finite(p, "duopoly", "symmetric_equilibrium");
  double ap = p.alpha_plus(), bp = p.beta_plus();
  double den = 8.0 * p.t_b * p.t_c - 2.0 * ap * bp;
  if (!(den > 0.0))
    throw Error(ErrorKind::GatingCondition, "duopoly", "symmetric_equilibrium",
                "positive-profit gate fails: 4*t_b*t_c <= alpha_plus*beta_plus");
  SymmetricDuopolyEquilibrium e;
  e.psi_b = (2.0 * (bp - ap) * p.beta_minus() * p.t_b + (bp * bp - 4.0 * p.t_b * p.t_c) * p.alpha_minus()) / den;
  e.psi_c = (2.0 * (ap - bp) * p.alpha_minus() * p.t_c + (ap * ap - 4.0 * p.t_b * p.t_c) * p.beta_minus()) / den;
  e.p_b = p.f_wb + p.t_b - bp / 2.0 + e.psi_b;
  e.p_c = p.f_wc + p.t_c - ap / 2.0 + e.psi_c;
  if (!(e.p_b > 0.0) || !(e.p_c > 0.0))
    throw Error(ErrorKind::NegativePriceRegime, "duopoly", "symmetric_equilibrium",
                "closed form yields a nonpositive price; formula inapplicable");
  e.r = (p.t_b + p.t_c - (bp + ap) / 2.0 + e.psi_b + e.psi_c) / 2.0;
  e.asymmetric_cost_warning = p.f_wb != p.f_nb || p.f_wc != p.f_nc;
  return e;
}

DuoOutcome nash_equilibrium(const DuopolyParams& p, const SolveOptions& opt) {
  check_finite(p, "duopoly", "nash_equilibrium");
  ConditionReport pre = validate_duopoly(p);
  {
    const ConditionEntry* b3 = pre.find("B3-proof");
    if (!b3->pass) {
      std::ostringstream os;
      os << "positive-profit gate fails: margin " << b3->margin;
      throw Error(ErrorKind::GatingCondition, "duopoly", "nash_equilibrium", os.str());
    }
  }
  DemandCoefs c = demand_coefs(p, "nash_equilibrium");
  FocSystem f = foc_system(p, c);

  DuoOutcome out;
  out.diag.bound_pattern = 0;
  Eigen::Vector4d x = solve_bounded(f, "nash_equilibrium", &out.diag.bound_pattern);
  out.prices = to_quad(x);
  out.shares = duopoly_demand(p, out.prices);
  auto [r_w, r_n] = duopoly_profits(p, out.prices);
  out.r_w = r_w;
  out.r_n = r_n;
  out.gap = out.shares.q_wc - out.shares.q_wb;
  out.conditions = validate_duopoly(p, out.shares);
  out.loss_leader = LossLeaderQuad{out.prices.p_wb < p.f_wb, out.prices.p_nb < p.f_nb,
                                   out.prices.p_wc < p.f_wc, out.prices.p_nc < p.f_nc};

  double scale = foc_scale(f);
  double resid = 0.0;
  for (int i = 0; i < 4; ++i) {
    double g = f.m.row(i) * x - f.rhs(i);
    if (out.diag.bound_pattern & (1 << i)) continue;  // pinned rows checked in solve_bounded
    resid = std::max(resid, std::fabs(g) / c.d);
  }
  out.diag.foc_residual_norm = resid;
  if (resid > 1e-10 * std::max(1.0, scale / c.d))
    throw Error(ErrorKind::SingularSystem, "duopoly", "nash_equilibrium",
                "first-order residual too large after solve");

  bool negdef = 16.0 * p.t_b * p.t_c > (p.alpha_plus() + p.beta_plus()) * (p.alpha_plus() + p.beta_plus());
  out.diag.hessian_negdef_w = negdef;
  out.diag.hessian_negdef_n = negdef;
  if (!negdef)
    throw Error(ErrorKind::NotAnEquilibrium, "duopoly", "nash_equilibrium",
                "own-price profit is not concave at the candidate");

  // unilateral deviation scan on clamped-participation profits; meaningful only
  // when the candidate's raw participation is itself inside [0,1]
  if (opt.deviation_check && out.shares.valid && opt.deviation_grid >= 2) {
    auto clamped_profit = [&](const PriceQuad& quad, Platform who) {
      Participation q = duopoly_demand(p, quad);
      auto cl = [](double v) { return std::min(1.0, std::max(0.0, v)); };
      if (who == Platform::W)
        return (quad.p_wb - p.f_wb) * cl(q.q_wb) + (quad.p_wc - p.f_wc) * cl(q.q_wc);
      return (quad.p_nb - p.f_nb) * cl(q.q_nb) + (quad.p_nc - p.f_nc) * cl(q.q_nc);
    };
    double base_w = clamped_profit(out.prices, Platform::W);
    double base_n = clamped_profit(out.prices, Platform::N);
    double step = 2.0 * opt.deviation_span / static_cast<double>(opt.deviation_grid - 1);
    double best_gain_w = 0.0, best_gain_n = 0.0;
    PriceQuad best_dev{};
    bool dev_is_w = true;
    for (int i = 0; i < opt.deviation_grid; ++i) {
      for (int j = 0; j < opt.deviation_grid; ++j) {
        double db = -opt.deviation_span + static_cast<double>(i) * step;
        double dc = -opt.deviation_span + static_cast<double>(j) * step;
        PriceQuad w = out.prices;
        w.p_wb += db;
        w.p_wc += dc;
        if (w.p_wb >= 0.0 && w.p_wc >= 0.0) {
          double gain = clamped_profit(w, Platform::W) - base_w;
          if (gain > best_gain_w) {
            best_gain_w = gain;
            best_dev = w;
            dev_is_w = true;
          }
        }
        PriceQuad n = out.prices;
        n.p_nb += db;
        n.p_nc += dc;
        if (n.p_nb >= 0.0 && n.p_nc >= 0.0) {
          double gain = clamped_profit(n, Platform::N) - base_n;
          if (gain > best_gain_n) {
            best_gain_n = gain;
            best_dev = n;
            dev_is_w = false;
          }
        }
      }
    }
    out.diag.deviation_gain_w = best_gain_w;
    out.diag.deviation_gain_n = best_gain_n;
    if (std::max(best_gain_w, best_gain_n) > opt.deviation_tol) {
      std::ostringstream os;
      os << "profitable deviation by " << (dev_is_w ? "W" : "N") << " to ("
         << (dev_is_w ? best_dev.p_wb : best_dev.p_nb) << ", "
         << (dev_is_w ? best_dev.p_wc : best_dev.p_nc) << "), gain "
         << std::max(best_gain_w, best_gain_n);
      throw Error(ErrorKind::NotAnEquilibrium, "duopoly", "nash_equilibrium", os.str());
    }
  }

  if (opt.br_check && opt.br_starts > 0) {
    std::mt19937_64 rng(opt.seed);
    int agreed = 0;
    double max_diff = 0.0;
    int max_rounds_used = 0;
    for (int s = 0; s < opt.br_starts; ++s) {
      PriceQuad cur{3.0 * deterministic_unit(rng), 3.0 * deterministic_unit(rng),
                    3.0 * deterministic_unit(rng), 3.0 * deterministic_unit(rng)};
      int round = 0;
      const int max_rounds = 10000;
      for (; round < max_rounds; ++round) {
        PricePair w = best_response(p, Platform::W, PricePair{cur.p_nb, cur.p_nc});
        PricePair n = best_response(p, Platform::N, PricePair{w.p_b, w.p_c});
        double change = std::max({std::fabs(w.p_b - cur.p_wb), std::fabs(w.p_c - cur.p_wc),
                                  std::fabs(n.p_b - cur.p_nb), std::fabs(n.p_c - cur.p_nc)});
        cur = PriceQuad{w.p_b, n.p_b, w.p_c, n.p_c};
        if (change <= 1e-12) break;
      }
      if (round >= 10000)
        throw Error(ErrorKind::NonConvergence, "duopoly", "nash_equilibrium",
                    "best-response iteration did not settle");
      max_rounds_used = std::max(max_rounds_used, round + 1);
      double diff = std::max({std::fabs(cur.p_wb - out.prices.p_wb), std::fabs(cur.p_nb - out.prices.p_nb),
                              std::fabs(cur.p_wc - out.prices.p_wc), std::fabs(cur.p_nc - out.prices.p_nc)});
      max_diff = std::max(max_diff, diff);
      if (diff <= opt.br_tol) ++agreed;
    }
    out.diag.br_starts_agreed = agreed;
    out.diag.br_max_diff = max_diff;
    out.diag.iterations = max_rounds_used;
    if (agreed != opt.br_starts) {
      std::ostringstream os;
      os << "best-response iteration settled " << max_diff
         << " away from the direct solution";
      throw Error(ErrorKind::NotAnEquilibrium, "duopoly", "nash_equilibrium", os.str());
    }
  }
  return out;
}

IncrementalUtilities multihome_incremental_utility(const DuopolyParams& p, const PriceQuad& prices,
                                                   const Participation& part) {
  check_finite(p, "duopoly", "multihome_incremental_utility");
  if (std::fabs(part.q_wb + part.q_nb - 1.0) > 1e-9 || std::fabs(part.q_wc + part.q_nc - 1.0) > 1e-9)
    throw Error(ErrorKind::Precondition, "duopoly", "multihome_incremental_utility",
                "participation fractions must sum to 1 per group");
  IncrementalUtilities iu;
  iu.worksite_case1 = -prices.p_nb + p.alpha_n * part.q_nc;
  iu.worksite_case1_premise =
      (-prices.p_wb - p.t_b + p.alpha_w * part.q_wc) >= (-prices.p_nb + p.alpha_n * part.q_nc);
  iu.worksite_case2 =
      (-prices.p_wb - prices.p_nb - p.t_b + p.alpha_w * part.q_wc + p.alpha_n * part.q_nc) / 2.0;
  iu.commuter_case1 = -prices.p_nc + p.beta_n * part.q_nb;
  iu.commuter_case1_premise =
      (-prices.p_wc - p.t_c + p.beta_w * part.q_wb) >= (-prices.p_nc + p.beta_n * part.q_nb);
  iu.commuter_case2 =
      (-prices.p_wc - prices.p_nc - p.t_c + p.beta_w * part.q_wb + p.beta_n * part.q_nb) / 2.0;
  return iu;
}

}  // namespace csp
