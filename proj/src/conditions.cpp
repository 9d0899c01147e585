#include "csp/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "csp/errors.hpp"

namespace csp {

namespace {

void require_finite(double v, const char* name, const char* module, const char* op) {
  if (!std::isfinite(v))
    throw Error(ErrorKind::InvalidParameter, module, op, std::string("non-finite ") + name);
}

}  // namespace

void check_finite(const MonopolyParams& p, const char* module, const char* op) {
  require_finite(p.u0_b, "u0_b", module, op);
  require_finite(p.u0_c, "u0_c", module, op);
  require_finite(p.b_b, "b_b", module, op);
  require_finite(p.b_c, "b_c", module, op);
  require_finite(p.t_b, "t_b", module, op);
  require_finite(p.t_c, "t_c", module, op);
  require_finite(p.f_b, "f_b", module, op);
  require_finite(p.f_c, "f_c", module, op);
}

void check_finite(const DuopolyParams& p, const char* module, const char* op) {
  require_finite(p.alpha_n, "alpha_n", module, op);
  require_finite(p.alpha_w, "alpha_w", module, op);
  require_finite(p.beta_n, "beta_n", module, op);
  require_finite(p.beta_w, "beta_w", module, op);
  require_finite(p.t_b, "t_b", module, op);
  require_finite(p.t_c, "t_c", module, op);
  require_finite(p.f_wb, "f_wb", module, op);
  require_finite(p.f_nb, "f_nb", module, op);
  require_finite(p.f_wc, "f_wc", module, op);
  require_finite(p.f_nc, "f_nc", module, op);
  require_finite(p.u0_b, "u0_b", module, op);
  require_finite(p.u0_c, "u0_c", module, op);
}

ConditionReport validate_monopoly(const MonopolyParams& p) {
  check_finite(p, "monopoly", "validate_monopoly");
  ConditionReport r;

  double a0 = std::min({p.b_b, p.b_c, p.t_b, p.t_c});
  r.entries.push_back({"A0", a0, a0 > 0.0, "network effects and differentiation positive"});

  double s = p.b_b + p.b_c;
  double a1 = 4.0 * p.t_b * p.t_c - s * s;
  r.entries.push_back({"A1", a1, a1 > 0.0, "profit concavity"});

  double num_b = (p.u0_c - p.f_c) * s + 2.0 * p.t_c * (p.u0_b - p.f_b);
  double num_c = s * (p.u0_b - p.f_b) + 2.0 * p.t_b * (p.u0_c - p.f_c);
  double a2 = a1 - std::max(num_b, num_c);
  r.entries.push_back({"A2", a2, a2 > 0.0, "equilibrium shares at most one; reported, not gating"});

  return r;
}

ConditionReport validate_duopoly(const DuopolyParams& p,
                                 const std::optional<Participation>& demands) {
  check_finite(p, "duopoly", "validate_duopoly");
  ConditionReport r;

  double a0 = std::min({p.alpha_n, p.alpha_w, p.beta_n, p.beta_w, p.t_b, p.t_c});
  r.entries.push_back({"A0", a0, a0 > 0.0, "rates and differentiation positive; reported, not gating"});

  double b2s = std::min(p.t_b - std::max(p.alpha_w, p.alpha_n),
                        p.t_c - std::max(p.beta_w, p.beta_n));
  r.entries.push_back({"B2-sufficient", b2s, b2s > 0.0, "single-homing at any nonnegative prices"});

  if (demands) {
    double b2e = std::min(p.t_b - (p.alpha_w * demands->q_wc + p.alpha_n * demands->q_nc),
                          p.t_c - (p.beta_w * demands->q_wb + p.beta_n * demands->q_nb));
    r.entries.push_back({"B2-exact", b2e, b2e > 0.0, "single-homing at the supplied participation"});
  }

  double b3p = 4.0 * p.t_b * p.t_c - p.alpha_plus() * p.beta_plus();
  r.entries.push_back({"B3-proof", b3p, b3p > 0.0, "positive profits; gates the solvers"});

  double sum = p.alpha_plus() + p.beta_plus();
  double b3s = 4.0 * p.t_b * p.t_c - sum * sum;
  r.entries.push_back({"B3-stated", b3s, b3s > 0.0, "informational; the proof form gates"});

  return r;
}

}  // namespace csp
