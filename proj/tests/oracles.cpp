#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace csp::test {

namespace {

constexpr double kNegInf = -1e300;

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Scan [lo,hi]^2 at `step` (ascending, first maximizer kept), optionally
// centered: the caller passes the window bounds directly.
template <typename F>
void scan2(double lo_b, double hi_b, double lo_c, double hi_c, double step, F&& eval, double& best,
           double& best_b, double& best_c) {
  int nb = static_cast<int>(std::floor((hi_b - lo_b) / step + 1e-9)) + 1;
  int nc = static_cast<int>(std::floor((hi_c - lo_c) / step + 1e-9)) + 1;
  for (int i = 0; i < nb; ++i) {
    double pb = lo_b + i * step;
    for (int j = 0; j < nc; ++j) {
      double pc = lo_c + j * step;
      double v = eval(pb, pc);
      if (v > best) {
        best = v;
        best_b = pb;
        best_c = pc;
      }
    }
  }
}

template <typename F>
void grid_refine2(double lo, double hi, double step, int refine_rounds, F&& eval, double& best,
                  double& best_b, double& best_c) {
  best = kNegInf;
  best_b = lo;
  best_c = lo;
  scan2(lo, hi, lo, hi, step, eval, best, best_b, best_c);
  double window = step;
  for (int r = 0; r < refine_rounds; ++r) {
    double lb = std::max(lo, best_b - window);
    double hb = std::min(hi, best_b + window);
    double lc = std::max(lo, best_c - window);
    double hc = std::min(hi, best_c + window);
    scan2(lb, hb, lc, hc, window / 10.0, eval, best, best_b, best_c);
    window /= 10.0;
  }
}

}  // namespace

double clamped_mono_profit(const MonopolyParams& m, double p_b, double p_c) {
  double den = m.t_b * m.t_c - m.b_b * m.b_c;
  double q_b = clamp01((m.b_b * (m.u0_c - p_c) + m.t_c * (m.u0_b - p_b)) / den);
  double q_c = clamp01((m.b_c * (m.u0_b - p_b) + m.t_b * (m.u0_c - p_c)) / den);
  return (p_b - m.f_b) * q_b + (p_c - m.f_c) * q_c;
}

MonoOracleResult oracle_monopoly(const MonopolyParams& m, double lo, double hi, double step,
                                 int refine_rounds) {
  MonoOracleResult r;
  grid_refine2(
      lo, hi, step, refine_rounds,
      [&](double pb, double pc) { return clamped_mono_profit(m, pb, pc); }, r.profit, r.p_b, r.p_c);
  return r;
}

FixedPointResult oracle_mono_demand_fp(const MonopolyParams& m, double p_b, double p_c,
                                       double damping, double tol, int max_iter) {
  FixedPointResult r;
  double qb = 0.5, qc = 0.5;
  for (int it = 1; it <= max_iter; ++it) {
    double nb = (m.u0_b + m.b_b * qc - p_b) / m.t_b;
    double nc = (m.u0_c + m.b_c * qb - p_c) / m.t_c;
    r.residual = std::max(std::fabs(nb - qb), std::fabs(nc - qc));
    qb += damping * (nb - qb);
    qc += damping * (nc - qc);
    r.iterations = it;
    if (r.residual <= tol) {
      r.converged = true;
      break;
    }
  }
  r.q_b = qb;
  r.q_c = qc;
  return r;
}

double clamped_duo_profit(const DuopolyParams& p, const PriceQuad& q, Platform id) {
  double d = 4.0 * p.t_b * p.t_c - p.alpha_plus() * p.beta_plus();
  double a0 = 0.5 - (p.t_c * p.alpha_minus() + p.alpha_plus() * p.beta_minus() / 2.0) / d;
  double c0 = 0.5 - (p.t_b * p.beta_minus() + p.alpha_minus() * p.beta_plus() / 2.0) / d;
  double db = q.p_nb - q.p_wb;
  double dc = q.p_nc - q.p_wc;
  double q_wb = a0 + (2.0 * p.t_c * db + p.alpha_plus() * dc) / d;
  double q_wc = c0 + (p.beta_plus() * db + 2.0 * p.t_b * dc) / d;
  if (id == Platform::W)
    return (q.p_wb - p.f_wb) * clamp01(q_wb) + (q.p_wc - p.f_wc) * clamp01(q_wc);
  return (q.p_nb - p.f_nb) * clamp01(1.0 - q_wb) + (q.p_nc - p.f_nc) * clamp01(1.0 - q_wc);
}

DuoBR oracle_duopoly_br(const DuopolyParams& p, Platform id, double rival_b, double rival_c,
                        double lo, double hi, double step, int refine_rounds) {
  DuoBR r;
  auto eval = [&](double pb, double pc) {
    PriceQuad q = id == Platform::W ? PriceQuad{pb, rival_b, pc, rival_c}
                                    : PriceQuad{rival_b, pb, rival_c, pc};
    return clamped_duo_profit(p, q, id);
  };
  grid_refine2(lo, hi, step, refine_rounds, eval, r.profit, r.p_b, r.p_c);
  return r;
}

DuoOracleResult oracle_duopoly_nash(const DuopolyParams& p, PriceQuad start, double lo, double hi,
                                    double step, int refine_rounds, int max_rounds, double tol) {
  DuoOracleResult r;
  r.prices = start;
  for (int round = 1; round <= max_rounds; ++round) {
    r.rounds = round;
    PriceQuad prev = r.prices;
    DuoBR w = oracle_duopoly_br(p, Platform::W, r.prices.p_nb, r.prices.p_nc, lo, hi, step,
                                refine_rounds);
    r.prices.p_wb = w.p_b;
    r.prices.p_wc = w.p_c;
    DuoBR n = oracle_duopoly_br(p, Platform::N, r.prices.p_wb, r.prices.p_wc, lo, hi, step,
                                refine_rounds);
    r.prices.p_nb = n.p_b;
    r.prices.p_nc = n.p_c;
    double move = std::max(std::max(std::fabs(r.prices.p_wb - prev.p_wb),
                                    std::fabs(r.prices.p_nb - prev.p_nb)),
                           std::max(std::fabs(r.prices.p_wc - prev.p_wc),
                                    std::fabs(r.prices.p_nc - prev.p_nc)));
    if (move <= tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

DuoFixedPoint oracle_duo_demand_fp(const DuopolyParams& p, const PriceQuad& q, double damping,
                                   double tol, int max_iter) {
  DuoFixedPoint r;
  double qwb = 0.5, qwc = 0.5;
  for (int it = 1; it <= max_iter; ++it) {
    double nb =
        0.5 + (p.alpha_w * qwc - p.alpha_n * (1.0 - qwc) + q.p_nb - q.p_wb) / (2.0 * p.t_b);
    double nc = 0.5 + (p.beta_w * qwb - p.beta_n * (1.0 - qwb) + q.p_nc - q.p_wc) / (2.0 * p.t_c);
    r.residual = std::max(std::fabs(nb - qwb), std::fabs(nc - qwc));
    qwb += damping * (nb - qwb);
    qwc += damping * (nc - qwc);
    r.iterations = it;
    if (r.residual <= tol) {
      r.converged = true;
      break;
    }
  }
  r.q_wb = qwb;
  r.q_wc = qwc;
  return r;
}

OneSidedOracleResult oracle_onesided(const DuopolyParams& p, double lo, double hi, double step,
                                     int refine_rounds, int max_rounds, double tol) {
  OneSidedOracleResult r;
  // commuter split under full worksite multi-homing; beta rates are zero in
  // this model but keep them for the share formula's generality
  auto share_w = [&](double pwc, double pnc) {
    return clamp01(0.5 + (pnc - pwc + p.beta_w - p.beta_n) / (2.0 * p.t_c));
  };
  auto profit_w = [&](double pwc, double pnc) {
    double qwc = share_w(pwc, pnc);
    return qwc * p.alpha_w - p.f_wb + (pwc - p.f_wc) * qwc;
  };
  auto profit_n = [&](double pwc, double pnc) {
    double qnc = 1.0 - share_w(pwc, pnc);
    return qnc * p.alpha_n - p.f_nb + (pnc - p.f_nc) * qnc;
  };
  auto argmax1 = [&](auto&& f) {
    double best = kNegInf, arg = lo;
    int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (int i = 0; i < n; ++i) {
      double x = lo + i * step;
      double v = f(x);
      if (v > best) {
        best = v;
        arg = x;
      }
    }
    double window = step;
    for (int rr = 0; rr < refine_rounds; ++rr) {
      double l = std::max(lo, arg - window), h = std::min(hi, arg + window);
      double s = window / 10.0;
      int m = static_cast<int>(std::floor((h - l) / s + 1e-9)) + 1;
      for (int i = 0; i < m; ++i) {
        double x = l + i * s;
        double v = f(x);
        if (v > best) {
          best = v;
          arg = x;
        }
      }
      window /= 10.0;
    }
    return arg;
  };

  double pwc = p.f_wc, pnc = p.f_nc;
  for (int round = 1; round <= max_rounds; ++round) {
    r.rounds = round;
    double prev_w = pwc, prev_n = pnc;
    pwc = argmax1([&](double x) { return profit_w(x, pnc); });
    pnc = argmax1([&](double x) { return profit_n(pwc, x); });
    if (std::max(std::fabs(pwc - prev_w), std::fabs(pnc - prev_n)) <= tol) {
      r.converged = true;
      break;
    }
  }
  r.p_wc = pwc;
  r.p_nc = pnc;
  r.q_wc = share_w(pwc, pnc);
  r.q_nc = 1.0 - r.q_wc;
  r.p_wb = r.q_wc * p.alpha_w;
  r.p_nb = r.q_nc * p.alpha_n;
  r.r_w = r.p_wb - p.f_wb + (pwc - p.f_wc) * r.q_wc;
  r.r_n = r.p_nb - p.f_nb + (pnc - p.f_nc) * r.q_nc;
  return r;
}

}  // namespace csp::test
