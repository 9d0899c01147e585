#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "csp/constrained.hpp"
#include "csp/duopoly.hpp"
#include "csp/types.hpp"

namespace csp {

enum class SweepModel { Monopoly, Duopoly, Constrained, Multihome };

struct AxisSpec {
  std::string key;
  double min = 0.0, max = 0.0;
  int count = 0;

  // value(i) = min + i*(max-min)/(count-1); exact halving subsets by construction
  double value(int i) const {
    return min + static_cast<double>(i) * (max - min) / static_cast<double>(count - 1);
  }
};

struct SweepCell {
  int ix = 0, iy = 0;
  double x = 0.0, y = 0.0;
  // filled per model; monopoly populates the W columns only
  std::optional<double> p_wb, p_nb, p_wc, p_nc;
  std::optional<double> q_wb, q_wc, q_nb, q_nc;
  std::optional<double> r_w, r_n;
  std::optional<double> gap;
  std::optional<bool> feasible;
  std::string cond_flags;  // failing condition ids, '|'-separated
  std::string error;       // empty on success
};

using ModelParams = std::variant<MonopolyParams, DuopolyParams>;

struct SweepGrid {
  SweepModel model = SweepModel::Monopoly;
  AxisSpec x, y;
  std::vector<SweepCell> cells;  // row-major: index = ix*y.count + iy
  ModelParams base;

  const SweepCell& at(int ix, int iy) const { return cells[ix * y.count + iy]; }
};

struct SweepOptions {
  std::optional<double> eta;      // constrained model
  GridSpec grid;                  // constrained model price grid
  SolveOptions solve;
  int threads = 0;                // 0 = CSPMKT_THREADS env or hardware
};

// Default inferred axes per model (documented in the README); multihome has no
// published ranges and requires explicit axes.
AxisSpec default_axis_x(SweepModel model);
AxisSpec default_axis_y(SweepModel model);

// Axis keys: monopoly u0_b, u0_c, b_b, b_c, t_b, t_c, f_b, f_c; duopoly family
// alpha_n, alpha_w, beta_n, beta_w, alpha_plus, alpha_minus, beta_plus,
// beta_minus, t_b, t_c, f_wb, f_nb, f_wc, f_nc, eta (constrained only).
// Aggregate/difference keys materialize jointly: alpha_n = (a+ + a-)/2,
// alpha_w = (a+ - a-)/2.
SweepGrid run_sweep(SweepModel model, const ModelParams& base, const AxisSpec& x,
                    const AxisSpec& y, const SweepOptions& opt = {});

struct ThresholdPredicate {
  enum class Kind { PriceBelowCost, ProfitLevel };
  Kind kind = Kind::PriceBelowCost;
  char side = 'c';                     // 'b' or 'c' (PriceBelowCost)
  Platform platform = Platform::W;     // ignored for monopoly grids
  double level = 0.0;                  // ProfitLevel threshold
};

struct Crossing {
  int iy = 0;       // row (y index) the crossing was found in
  double x = 0.0;   // interpolated x-axis location
};

// Sign changes of the predicate quantity between x-adjacent cells, linearly
// interpolated; cells with errors break adjacency.
std::vector<Crossing> find_threshold(const SweepGrid& grid, const ThresholdPredicate& pred);

}  // namespace csp
