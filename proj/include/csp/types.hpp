#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace csp {

// Commuter-service market, two sides: B = worksites (businesses), C = commuters.
// Monopoly: one platform prices both sides. Duopoly: platforms W and N compete
// on a Hotelling line on each side.

struct MonopolyParams {
  double u0_b, u0_c;  // standalone values
  double b_b, b_c;    // cross-side externality rates
  double t_b, t_c;    // differentiation (transport) costs
  double f_b, f_c;    // per-unit service costs
};

struct DuopolyParams {
  double alpha_n, alpha_w;  // worksite-side externality rate of commuter mass
  double beta_n, beta_w;    // commuter-side externality rate of worksite mass
  double t_b, t_c;
  double f_wb, f_nb, f_wc, f_nc;
  double u0_b = 0.0, u0_c = 0.0;  // inert for solvers; utility reconstruction only

  double alpha_plus() const { return alpha_n + alpha_w; }
  double alpha_minus() const { return alpha_n - alpha_w; }
  double beta_plus() const { return beta_n + beta_w; }
  double beta_minus() const { return beta_n - beta_w; }
};

enum class Platform { W, N };

struct PricePair {
  double p_b = 0.0, p_c = 0.0;
};

struct PriceQuad {
  double p_wb = 0.0, p_nb = 0.0, p_wc = 0.0, p_nc = 0.0;

  friend bool operator==(const PriceQuad& a, const PriceQuad& b) {
    return a.p_wb == b.p_wb && a.p_nb == b.p_nb && a.p_wc == b.p_wc && a.p_nc == b.p_nc;
  }
  // lexicographic in declaration order; used for deterministic tie-breaks
  friend bool operator<(const PriceQuad& a, const PriceQuad& b) {
    if (a.p_wb != b.p_wb) return a.p_wb < b.p_wb;
    if (a.p_nb != b.p_nb) return a.p_nb < b.p_nb;
    if (a.p_wc != b.p_wc) return a.p_wc < b.p_wc;
    return a.p_nc < b.p_nc;
  }
};

struct MonoParticipation {
  double q_b = 0.0, q_c = 0.0;
  bool valid = true;  // raw values within [0,1] up to 1e-9
};

struct Participation {
  double q_wb = 0.0, q_wc = 0.0, q_nb = 0.0, q_nc = 0.0;
  double mh_b = 0.0, mh_c = 0.0;  // multi-homing fractions (appendix model only)
  bool valid = true;
};

struct ConditionEntry {
  std::string id;
  double margin = 0.0;
  bool pass = false;
  std::string note;
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;

  const ConditionEntry* find(std::string_view id) const {
    for (const auto& e : entries)
      if (e.id == id) return &e;
    return nullptr;
  }
  bool passed(std::string_view id) const {
    const auto* e = find(id);
    return e && e->pass;
  }
  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
  std::string failing_ids() const {
    std::string out;
    for (const auto& e : entries) {
      if (e.pass) continue;
      if (!out.empty()) out += '|';
      out += e.id;
    }
    return out;
  }
};

struct LossLeaderPair {
  bool b = false, c = false;
  double margin_b = 0.0, margin_c = 0.0;  // p - f per side
};

struct LossLeaderQuad {
  bool wb = false, nb = false, wc = false, nc = false;
};

struct MonoOutcome {
  PricePair prices;
  MonoParticipation shares;
  double profit = 0.0;
  ConditionReport conditions;
  LossLeaderPair loss_leader;
  double foc_residual = 0.0;
};

struct NashDiagnostics {
  double foc_residual_norm = 0.0;
  bool hessian_negdef_w = false, hessian_negdef_n = false;
  double deviation_gain_w = 0.0, deviation_gain_n = 0.0;
  int br_starts_agreed = 0;
  double br_max_diff = 0.0;
  int iterations = 0;
  int bound_pattern = 0;  // bitmask of prices pinned at zero, 0 = interior
};

struct DuoOutcome {
  PriceQuad prices;
  Participation shares;
  double r_w = 0.0, r_n = 0.0;
  double gap = 0.0;  // q_wc - q_wb
  ConditionReport conditions;
  LossLeaderQuad loss_leader;
  NashDiagnostics diag;
  bool constrained = false;
  double eta = 0.0;
  bool cycle = false;
};

}  // namespace csp
