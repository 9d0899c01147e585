#pragma once

#include <optional>
#include <string>

#include "csp/multihome.hpp"
#include "csp/sweep.hpp"
#include "csp/types.hpp"

namespace csp {

struct RunConfig {
  SweepModel model = SweepModel::Monopoly;
  ModelParams params;
  std::optional<double> eta;
  std::optional<GridSpec> grid;
  std::optional<AxisSpec> sweep_x, sweep_y;
};

// Strict JSON config: unknown keys are rejected by name; model parameters are
// never defaulted (only u0_b/u0_c in the duopoly family, which no solver
// reads, default to 0).
RunConfig parse_config(const std::string& json_text);

// Shortest round-trip decimal form.
std::string format_double(double v);

inline constexpr const char* kCsvHeader =
    "x_key,x_value,y_key,y_value,p_wb,p_nb,p_wc,p_nc,q_wb,q_wc,q_nb,q_nc,r_w,r_n,gap,"
    "feasible,cond_flags,error";

std::string to_csv(const SweepGrid& grid);
std::string to_csv(const MonoOutcome& o);
std::string to_csv(const DuoOutcome& o);
std::string to_csv(const OneSidedEquilibrium& o);

std::string to_json(const MonoOutcome& o);
std::string to_json(const DuoOutcome& o);
std::string to_json(const OneSidedEquilibrium& o);
std::string to_json(const ConditionReport& r);
std::string to_json(const SweepGrid& grid);

// Write via temp file + rename in the target directory.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace csp
