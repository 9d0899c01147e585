#include "csp/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "csp/errors.hpp"
#include "csp/monopoly.hpp"
#include "csp/multihome.hpp"

namespace csp {

namespace {

const char* const kMonoKeys[] = {"u0_b", "u0_c", "b_b", "b_c", "t_b", "t_c", "f_b", "f_c"};
const char* const kDuoKeys[] = {"alpha_n", "alpha_w",  "beta_n",     "beta_w",      "alpha_plus",
                                "alpha_minus", "beta_plus", "beta_minus", "t_b",    "t_c",
                                "f_wb",    "f_nb",     "f_wc",       "f_nc",        "u0_b",
                                "u0_c"};

bool known_key(SweepModel model, const std::string& key) {
  if (model == SweepModel::Monopoly) {
    for (const char* k : kMonoKeys)
      if (key == k) return true;
    return false;
  }
  for (const char* k : kDuoKeys)
    if (key == k) return true;
  return key == "eta" && model == SweepModel::Constrained;
}

void validate_axis(const AxisSpec& a, SweepModel model, const char* which) {
  if (!(a.count >= 2) || !(a.min < a.max) || !std::isfinite(a.min) || !std::isfinite(a.max))
    throw Error(ErrorKind::InvalidParameter, "sweep", "run_sweep",
                std::string(which) + " axis needs count >= 2 and finite min < max");
  if (!known_key(model, a.key))
    throw Error(ErrorKind::InvalidParameter, "sweep", "run_sweep",
                std::string("unknown axis key '") + a.key + "' for this model");
}

struct Assignment {
  std::string key;
  double value;
};

// Aggregate/difference keys materialize jointly after the plain keys.
void apply_axes(SweepModel model, ModelParams& params, double* eta,
                const std::vector<Assignment>& as) {
  std::optional<double> a_plus, a_minus, b_plus, b_minus;
  for (const auto& a : as) {
    if (a.key == "alpha_plus") {
      a_plus = a.value;
      continue;
    }
    if (a.key == "alpha_minus") {
      a_minus = a.value;
      continue;
    }
    if (a.key == "beta_plus") {
      b_plus = a.value;
      continue;
    }
    if (a.key == "beta_minus") {
      b_minus = a.value;
      continue;
    }
    if (a.key == "eta") {
      *eta = a.value;
      continue;
    }
    if (model == SweepModel::Monopoly) {
      auto& m = std::get<MonopolyParams>(params);
      if (a.key == "u0_b") m.u0_b = a.value;
      else if (a.key == "u0_c") m.u0_c = a.value;
      else if (a.key == "b_b") m.b_b = a.value;
      else if (a.key == "b_c") m.b_c = a.value;
      else if (a.key == "t_b") m.t_b = a.value;
      else if (a.key == "t_c") m.t_c = a.value;
      else if (a.key == "f_b") m.f_b = a.value;
      else if (a.key == "f_c") m.f_c = a.value;
    } else {
      auto& d = std::get<DuopolyParams>(params);
      if (a.key == "alpha_n") d.alpha_n = a.value;
      else if (a.key == "alpha_w") d.alpha_w = a.value;
      else if (a.key == "beta_n") d.beta_n = a.value;
      else if (a.key == "beta_w") d.beta_w = a.value;
      else if (a.key == "t_b") d.t_b = a.value;
      else if (a.key == "t_c") d.t_c = a.value;
      else if (a.key == "f_wb") d.f_wb = a.value;
      else if (a.key == "f_nb") d.f_nb = a.value;
      else if (a.key == "f_wc") d.f_wc = a.value;
      else if (a.key == "f_nc") d.f_nc = a.value;
      else if (a.key == "u0_b") d.u0_b = a.value;
      else if (a.key == "u0_c") d.u0_c = a.value;
    }
  }
  if (model != SweepModel::Monopoly && (a_plus || a_minus || b_plus || b_minus)) {
    auto& d = std::get<DuopolyParams>(params);
    if (a_plus || a_minus) {
      double ap = a_plus ? *a_plus : d.alpha_plus();
      double am = a_minus ? *a_minus : d.alpha_minus();
      d.alpha_n = (ap + am) / 2.0;
      d.alpha_w = (ap - am) / 2.0;
    }
    if (b_plus || b_minus) {
      double bp = b_plus ? *b_plus : d.beta_plus();
      double bm = b_minus ? *b_minus : d.beta_minus();
      d.beta_n = (bp + bm) / 2.0;
      d.beta_w = (bp - bm) / 2.0;
    }
  }
}

ModelParams cell_params(const SweepGrid& grid, int ix, int iy, double* eta_out) {
  ModelParams params = grid.base;
  double eta = eta_out ? *eta_out : 0.0;
  apply_axes(grid.model, params, &eta,
             {{grid.x.key, grid.x.value(ix)}, {grid.y.key, grid.y.value(iy)}});
  if (eta_out) *eta_out = eta;
  return params;
}

void fill_duo(SweepCell& cell, const DuoOutcome& o, bool constrained) {
  cell.p_wb = o.prices.p_wb;
  cell.p_nb = o.prices.p_nb;
  cell.p_wc = o.prices.p_wc;
  cell.p_nc = o.prices.p_nc;
  cell.q_wb = o.shares.q_wb;
  cell.q_wc = o.shares.q_wc;
  cell.q_nb = o.shares.q_nb;
  cell.q_nc = o.shares.q_nc;
  cell.r_w = o.r_w;
  cell.r_n = o.r_n;
  cell.gap = o.gap;
  cell.feasible = constrained ? (o.shares.valid && std::fabs(o.gap) <= o.eta) : o.shares.valid;
  cell.cond_flags = o.conditions.failing_ids();
}

void run_cell(SweepModel model, const SweepGrid& grid, const SweepOptions& opt, SweepCell& cell) {
  double eta = opt.eta.value_or(0.0);
  ModelParams params = cell_params(grid, cell.ix, cell.iy, &eta);
  try {
    switch (model) {
      case SweepModel::Monopoly: {
        MonoOutcome o = monopoly_equilibrium(std::get<MonopolyParams>(params));
        cell.p_wb = o.prices.p_b;
        cell.p_wc = o.prices.p_c;
        cell.q_wb = o.shares.q_b;
        cell.q_wc = o.shares.q_c;
        cell.r_w = o.profit;
        cell.feasible = o.shares.valid;
        cell.cond_flags = o.conditions.failing_ids();
        break;
      }
      case SweepModel::Duopoly: {
        DuoOutcome o = nash_equilibrium(std::get<DuopolyParams>(params), opt.solve);
        fill_duo(cell, o, false);
        break;
      }
      case SweepModel::Constrained: {
        ConstraintSpec spec{eta, opt.grid};
        DuoOutcome o = constrained_nash(std::get<DuopolyParams>(params), spec, opt.solve);
        fill_duo(cell, o, true);
        break;
      }
      case SweepModel::Multihome: {
        OneSidedEquilibrium o = onesided_equilibrium(std::get<DuopolyParams>(params));
        cell.p_wb = o.prices.p_wb;
        cell.p_nb = o.prices.p_nb;
        cell.p_wc = o.prices.p_wc;
        cell.p_nc = o.prices.p_nc;
        cell.q_wc = o.q_wc;
        cell.q_nc = o.q_nc;
        cell.r_w = o.r_w;
        cell.r_n = o.r_n;
        cell.feasible = o.q_wc >= -1e-9 && o.q_wc <= 1.0 + 1e-9;
        cell.cond_flags = o.conditions.failing_ids();
        break;
      }
    }
  } catch (const Error& e) {
    cell.error = to_string(e.kind());
  } catch (const std::exception&) {
    cell.error = "internal";
  }
}

int thread_budget(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CSPMKT_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0 && v < 1024) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

AxisSpec default_axis_x(SweepModel model) {
  switch (model) {
    case SweepModel::Monopoly: return {"t_b", 0.9, 2.0, 40};
    case SweepModel::Duopoly: return {"alpha_plus", 0.9, 2.7, 50};
    case SweepModel::Constrained: return {"alpha_plus", 0.9, 2.7, 21};
    case SweepModel::Multihome: break;
  }
  throw Error(ErrorKind::InvalidParameter, "sweep", "default_axis_x",
              "no default axes for this model; supply them explicitly");
}

AxisSpec default_axis_y(SweepModel model) {
  switch (model) {
    case SweepModel::Monopoly: return {"t_c", 1.0, 2.2, 40};
    case SweepModel::Duopoly: return {"alpha_minus", -1.3, 1.3, 50};
    case SweepModel::Constrained: return {"alpha_minus", -1.3, 1.3, 21};
    case SweepModel::Multihome: break;
  }
  throw Error(ErrorKind::InvalidParameter, "sweep", "default_axis_y",
              "no default axes for this model; supply them explicitly");
}

SweepGrid run_sweep(SweepModel model, const ModelParams& base, const AxisSpec& x, const AxisSpec& y,
                    const SweepOptions& opt) {
  validate_axis(x, model, "x");
  validate_axis(y, model, "y");
  if (model == SweepModel::Monopoly) {
    if (!std::holds_alternative<MonopolyParams>(base))
      throw Error(ErrorKind::InvalidParameter, "sweep", "run_sweep",
                  "monopoly sweep needs monopoly parameters");
  } else if (!std::holds_alternative<DuopolyParams>(base)) {
    throw Error(ErrorKind::InvalidParameter, "sweep", "run_sweep",
                "duopoly-family sweep needs duopoly parameters");
  }
  if (model == SweepModel::Constrained && !opt.eta && x.key != "eta" && y.key != "eta")
    throw Error(ErrorKind::InvalidParameter, "sweep", "run_sweep",
                "constrained sweep needs eta (option or axis); never defaulted");

  SweepGrid grid;
  grid.model = model;
  grid.x = x;
  grid.y = y;
  grid.base = base;
  grid.cells.resize(static_cast<size_t>(x.count) * static_cast<size_t>(y.count));
  for (int ix = 0; ix < x.count; ++ix) {
    for (int iy = 0; iy < y.count; ++iy) {
      SweepCell& cell = grid.cells[static_cast<size_t>(ix * y.count + iy)];
      cell.ix = ix;
      cell.iy = iy;
      cell.x = x.value(ix);
      cell.y = y.value(iy);
    }
  }

  int n = static_cast<int>(grid.cells.size());
  int threads = std::min(thread_budget(opt.threads), n);
  if (threads <= 1) {
    for (auto& cell : grid.cells) run_cell(model, grid, opt, cell);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        int lo = t * n / threads;
        int hi = (t + 1) * n / threads;
        for (int i = lo; i < hi; ++i) run_cell(model, grid, opt, grid.cells[static_cast<size_t>(i)]);
      });
    }
    for (auto& th : pool) th.join();
  }

  bool any_ok = false;
  for (const auto& cell : grid.cells)
    if (cell.error.empty()) {
      any_ok = true;
      break;
    }
  if (!any_ok)
    throw Error(ErrorKind::Infeasible, "sweep", "run_sweep",
                "every cell failed; first error: " + grid.cells.front().error);
  return grid;
}

namespace {

std::optional<double> predicate_quantity(const SweepGrid& grid, const SweepCell& cell,
                                         const ThresholdPredicate& pred) {
  if (!cell.error.empty()) return std::nullopt;
  if (pred.kind == ThresholdPredicate::Kind::ProfitLevel) {
    const std::optional<double>& r = pred.platform == Platform::W ? cell.r_w : cell.r_n;
    if (!r) return std::nullopt;
    return *r - pred.level;
  }
  double eta = 0.0;
  ModelParams params = cell_params(grid, cell.ix, cell.iy, &eta);
  if (grid.model == SweepModel::Monopoly) {
    const auto& m = std::get<MonopolyParams>(params);
    const std::optional<double>& p = pred.side == 'b' ? cell.p_wb : cell.p_wc;
    if (!p) return std::nullopt;
    return *p - (pred.side == 'b' ? m.f_b : m.f_c);
  }
  const auto& d = std::get<DuopolyParams>(params);
  const std::optional<double>* p = nullptr;
  double f = 0.0;
  if (pred.platform == Platform::W && pred.side == 'b') p = &cell.p_wb, f = d.f_wb;
  else if (pred.platform == Platform::W && pred.side == 'c') p = &cell.p_wc, f = d.f_wc;
  else if (pred.platform == Platform::N && pred.side == 'b') p = &cell.p_nb, f = d.f_nb;
  else p = &cell.p_nc, f = d.f_nc;
  if (!*p) return std::nullopt;
  return **p - f;
}

}  // namespace

std::vector<Crossing> find_threshold(const SweepGrid& grid, const ThresholdPredicate& pred) {
  if (pred.kind == ThresholdPredicate::Kind::PriceBelowCost && pred.side != 'b' && pred.side != 'c')
    throw Error(ErrorKind::InvalidParameter, "sweep", "find_threshold", "side must be 'b' or 'c'");
  std::vector<Crossing> out;
  for (int iy = 0; iy < grid.y.count; ++iy) {
    for (int ix = 0; ix + 1 < grid.x.count; ++ix) {
      std::optional<double> v0 = predicate_quantity(grid, grid.at(ix, iy), pred);
      std::optional<double> v1 = predicate_quantity(grid, grid.at(ix + 1, iy), pred);
      if (!v0 || !v1) continue;
      double x0 = grid.x.value(ix), x1 = grid.x.value(ix + 1);
      if (*v0 == 0.0) {
        out.push_back({iy, x0});
      } else if (*v0 * *v1 < 0.0) {
        out.push_back({iy, x0 + (0.0 - *v0) / (*v1 - *v0) * (x1 - x0)});
      }
    }
  }
  return out;
}

}  // namespace csp
