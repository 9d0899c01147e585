#include "csp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <system_error>

#include "csp/errors.hpp"

namespace csp {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void cfg_error(const std::string& msg) {
  throw Error(ErrorKind::InvalidParameter, "cli", "parse_config", msg);
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const char* where) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        ok = true;
        break;
      }
    if (!ok) cfg_error(std::string("unknown key '") + item.key() + "' in " + where);
  }
}

double need_number(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key)) cfg_error(std::string("missing '") + key + "' in " + where);
  const json& v = obj.at(key);
  if (!v.is_number()) cfg_error(std::string("'") + key + "' in " + where + " must be a number");
  return v.get<double>();
}

double opt_number(const json& obj, const char* key, const char* where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) cfg_error(std::string("'") + key + "' in " + where + " must be a number");
  return v.get<double>();
}

AxisSpec parse_axis(const json& obj, const char* where) {
  if (!obj.is_object()) cfg_error(std::string(where) + " must be an object");
  reject_unknown(obj, {"key", "min", "max", "count"}, where);
  AxisSpec a;
  if (!obj.contains("key") || !obj.at("key").is_string())
    cfg_error(std::string("missing or non-string 'key' in ") + where);
  a.key = obj.at("key").get<std::string>();
  a.min = need_number(obj, "min", where);
  a.max = need_number(obj, "max", where);
  if (!obj.contains("count") || !obj.at("count").is_number_integer())
    cfg_error(std::string("missing or non-integer 'count' in ") + where);
  a.count = obj.at("count").get<int>();
  if (a.count < 2 || !(a.min < a.max))
    cfg_error(std::string(where) + " needs count >= 2 and min < max");
  return a;
}

std::string csv_bool(bool b) { return b ? "true" : "false"; }

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void csv_row(std::string& out, const std::string& xk, const std::string& xv, const std::string& yk,
             const std::string& yv, const std::optional<double>& p_wb,
             const std::optional<double>& p_nb, const std::optional<double>& p_wc,
             const std::optional<double>& p_nc, const std::optional<double>& q_wb,
             const std::optional<double>& q_wc, const std::optional<double>& q_nb,
             const std::optional<double>& q_nc, const std::optional<double>& r_w,
             const std::optional<double>& r_n, const std::optional<double>& gap,
             const std::optional<bool>& feas, const std::string& flags, const std::string& err) {
  out += xk;
  out += ',';
  out += xv;
  out += ',';
  out += yk;
  out += ',';
  out += yv;
  for (const auto* v : {&p_wb, &p_nb, &p_wc, &p_nc, &q_wb, &q_wc, &q_nb, &q_nc, &r_w, &r_n, &gap}) {
    out += ',';
    out += opt_field(*v);
  }
  out += ',';
  out += feas ? csv_bool(*feas) : "";
  out += ',';
  out += flags;
  out += ',';
  out += err;
  out += '\n';
}

json conditions_json(const ConditionReport& r) {
  json arr = json::array();
  for (const auto& e : r.entries) {
    json o;
    o["id"] = e.id;
    o["margin"] = e.margin;
    o["pass"] = e.pass;
    o["note"] = e.note;
    arr.push_back(o);
  }
  return arr;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    cfg_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) cfg_error("config root must be an object");
  reject_unknown(root, {"model", "params", "eta", "grid", "sweep"}, "config");

  if (!root.contains("model") || !root.at("model").is_string())
    cfg_error("missing or non-string 'model'");
  std::string model = root.at("model").get<std::string>();

  RunConfig cfg;
  if (model == "monopoly") cfg.model = SweepModel::Monopoly;
  else if (model == "duopoly") cfg.model = SweepModel::Duopoly;
  else if (model == "constrained") cfg.model = SweepModel::Constrained;
  else if (model == "multihome") cfg.model = SweepModel::Multihome;
  else cfg_error("model must be one of monopoly|duopoly|constrained|multihome");

  if (!root.contains("params") || !root.at("params").is_object())
    cfg_error("missing 'params' object");
  const json& pj = root.at("params");

  if (cfg.model == SweepModel::Monopoly) {
    reject_unknown(pj, {"u0_b", "u0_c", "b_b", "b_c", "t_b", "t_c", "f_b", "f_c"}, "params");
    MonopolyParams m{};
    m.u0_b = need_number(pj, "u0_b", "params");
    m.u0_c = need_number(pj, "u0_c", "params");
    m.b_b = need_number(pj, "b_b", "params");
    m.b_c = need_number(pj, "b_c", "params");
    m.t_b = need_number(pj, "t_b", "params");
    m.t_c = need_number(pj, "t_c", "params");
    m.f_b = need_number(pj, "f_b", "params");
    m.f_c = need_number(pj, "f_c", "params");
    cfg.params = m;
  } else {
    reject_unknown(pj,
                   {"alpha_n", "alpha_w", "beta_n", "beta_w", "t_b", "t_c", "f_wb", "f_nb", "f_wc",
                    "f_nc", "u0_b", "u0_c"},
                   "params");
    DuopolyParams d{};
    d.alpha_n = need_number(pj, "alpha_n", "params");
    d.alpha_w = need_number(pj, "alpha_w", "params");
    d.beta_n = need_number(pj, "beta_n", "params");
    d.beta_w = need_number(pj, "beta_w", "params");
    d.t_b = need_number(pj, "t_b", "params");
    d.t_c = need_number(pj, "t_c", "params");
    d.f_wb = need_number(pj, "f_wb", "params");
    d.f_nb = need_number(pj, "f_nb", "params");
    d.f_wc = need_number(pj, "f_wc", "params");
    d.f_nc = need_number(pj, "f_nc", "params");
    d.u0_b = opt_number(pj, "u0_b", "params", 0.0);  // inert for these solvers
    d.u0_c = opt_number(pj, "u0_c", "params", 0.0);
    cfg.params = d;
  }

  if (root.contains("eta")) {
    if (cfg.model != SweepModel::Constrained) cfg_error("'eta' is only valid for model constrained");
    if (!root.at("eta").is_number()) cfg_error("'eta' must be a number");
    cfg.eta = root.at("eta").get<double>();
    if (!(*cfg.eta > 0.0)) cfg_error("'eta' must be positive");
  }
  if (root.contains("grid")) {
    if (cfg.model != SweepModel::Constrained) cfg_error("'grid' is only valid for model constrained");
    const json& gj = root.at("grid");
    if (!gj.is_object()) cfg_error("'grid' must be an object");
    reject_unknown(gj, {"min", "max", "step"}, "grid");
    GridSpec g;
    g.min = opt_number(gj, "min", "grid", 0.0);
    g.max = opt_number(gj, "max", "grid", 3.0);
    g.step = opt_number(gj, "step", "grid", 0.01);
    if (!(g.step > 0.0) || !(g.min <= g.max)) cfg_error("grid needs step > 0 and min <= max");
    cfg.grid = g;
  }
  if (root.contains("sweep")) {
    const json& sj = root.at("sweep");
    if (!sj.is_object()) cfg_error("'sweep' must be an object");
    reject_unknown(sj, {"x", "y"}, "sweep");
    if (sj.contains("x")) cfg.sweep_x = parse_axis(sj.at("x"), "sweep.x");
    if (sj.contains("y")) cfg.sweep_y = parse_axis(sj.at("y"), "sweep.y");
  }
  return cfg;
}

std::string format_double(double v) {
  char buf[64];
  std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const SweepGrid& grid) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& cell : grid.cells) {
    csv_row(out, grid.x.key, format_double(cell.x), grid.y.key, format_double(cell.y), cell.p_wb,
            cell.p_nb, cell.p_wc, cell.p_nc, cell.q_wb, cell.q_wc, cell.q_nb, cell.q_nc, cell.r_w,
            cell.r_n, cell.gap, cell.feasible, cell.cond_flags, cell.error);
  }
  return out;
}

std::string to_csv(const MonoOutcome& o) {
  std::string out = kCsvHeader;
  out += '\n';
  csv_row(out, "", "", "", "", o.prices.p_b, std::nullopt, o.prices.p_c, std::nullopt, o.shares.q_b,
          o.shares.q_c, std::nullopt, std::nullopt, o.profit, std::nullopt, std::nullopt,
          o.shares.valid, o.conditions.failing_ids(), "");
  return out;
}

std::string to_csv(const DuoOutcome& o) {
  std::string out = kCsvHeader;
  out += '\n';
  bool feas = o.constrained ? (o.shares.valid && std::fabs(o.gap) <= o.eta) : o.shares.valid;
  csv_row(out, "", "", "", "", o.prices.p_wb, o.prices.p_nb, o.prices.p_wc, o.prices.p_nc,
          o.shares.q_wb, o.shares.q_wc, o.shares.q_nb, o.shares.q_nc, o.r_w, o.r_n, o.gap, feas,
          o.conditions.failing_ids(), "");
  return out;
}

std::string to_csv(const OneSidedEquilibrium& o) {
  std::string out = kCsvHeader;
  out += '\n';
  bool feas = o.q_wc >= -1e-9 && o.q_wc <= 1.0 + 1e-9;
  csv_row(out, "", "", "", "", o.prices.p_wb, o.prices.p_nb, o.prices.p_wc, o.prices.p_nc,
          std::nullopt, o.q_wc, std::nullopt, o.q_nc, o.r_w, o.r_n, std::nullopt, feas,
          o.conditions.failing_ids(), "");
  return out;
}

std::string to_json(const ConditionReport& r) {
  json o;
  o["conditions"] = conditions_json(r);
  o["all_pass"] = r.all_pass();
  return o.dump(2) + "\n";
}

std::string to_json(const MonoOutcome& o) {
  json j;
  j["model"] = "monopoly";
  j["prices"] = {{"p_b", o.prices.p_b}, {"p_c", o.prices.p_c}};
  j["participation"] = {{"q_b", o.shares.q_b}, {"q_c", o.shares.q_c}, {"valid", o.shares.valid}};
  j["profit"] = o.profit;
  j["loss_leader"] = {{"b", o.loss_leader.b},
                      {"c", o.loss_leader.c},
                      {"margin_b", o.loss_leader.margin_b},
                      {"margin_c", o.loss_leader.margin_c}};
  j["conditions"] = conditions_json(o.conditions);
  j["diagnostics"] = {{"foc_residual", o.foc_residual}};
  return j.dump(2) + "\n";
}

std::string to_json(const DuoOutcome& o) {
  json j;
  j["model"] = o.constrained ? "constrained" : "duopoly";
  j["prices"] = {{"p_wb", o.prices.p_wb},
                 {"p_nb", o.prices.p_nb},
                 {"p_wc", o.prices.p_wc},
                 {"p_nc", o.prices.p_nc}};
  j["participation"] = {{"q_wb", o.shares.q_wb},
                        {"q_wc", o.shares.q_wc},
                        {"q_nb", o.shares.q_nb},
                        {"q_nc", o.shares.q_nc},
                        {"valid", o.shares.valid}};
  j["profits"] = {{"r_w", o.r_w}, {"r_n", o.r_n}};
  j["gap"] = o.gap;
  if (o.constrained) {
    j["eta"] = o.eta;
    j["cycle"] = o.cycle;
  }
  j["loss_leader"] = {{"wb", o.loss_leader.wb},
                      {"nb", o.loss_leader.nb},
                      {"wc", o.loss_leader.wc},
                      {"nc", o.loss_leader.nc}};
  j["conditions"] = conditions_json(o.conditions);
  j["diagnostics"] = {{"foc_residual_norm", o.diag.foc_residual_norm},
                      {"hessian_negdef_w", o.diag.hessian_negdef_w},
                      {"hessian_negdef_n", o.diag.hessian_negdef_n},
                      {"deviation_gain_w", o.diag.deviation_gain_w},
                      {"deviation_gain_n", o.diag.deviation_gain_n},
                      {"br_starts_agreed", o.diag.br_starts_agreed},
                      {"br_max_diff", o.diag.br_max_diff},
                      {"iterations", o.diag.iterations},
                      {"bound_pattern", o.diag.bound_pattern}};
  return j.dump(2) + "\n";
}

std::string to_json(const OneSidedEquilibrium& o) {
  json j;
  j["model"] = "multihome";
  j["regime"] = o.regime == Regime::Interior ? "interior" : "zero_commuter_price";
  j["prices"] = {{"p_wb", o.prices.p_wb},
                 {"p_nb", o.prices.p_nb},
                 {"p_wc", o.prices.p_wc},
                 {"p_nc", o.prices.p_nc}};
  j["participation"] = {{"q_wc", o.q_wc}, {"q_nc", o.q_nc}, {"worksites_multihome", 1.0}};
  j["profits"] = {{"r_w", o.r_w}, {"r_n", o.r_n}};
  j["regime_margins"] = {{"interior_1", o.regime_margin_1}, {"interior_2", o.regime_margin_2}};
  j["conditions"] = conditions_json(o.conditions);
  if (!o.note.empty()) j["note"] = o.note;
  return j.dump(2) + "\n";
}

std::string to_json(const SweepGrid& grid) {
  json j;
  switch (grid.model) {
    case SweepModel::Monopoly: j["model"] = "monopoly"; break;
    case SweepModel::Duopoly: j["model"] = "duopoly"; break;
    case SweepModel::Constrained: j["model"] = "constrained"; break;
    case SweepModel::Multihome: j["model"] = "multihome"; break;
  }
  j["x"] = {{"key", grid.x.key}, {"min", grid.x.min}, {"max", grid.x.max}, {"count", grid.x.count}};
  j["y"] = {{"key", grid.y.key}, {"min", grid.y.min}, {"max", grid.y.max}, {"count", grid.y.count}};
  json cells = json::array();
  for (const auto& c : grid.cells) {
    json o;
    o["x"] = c.x;
    o["y"] = c.y;
    auto put = [&o](const char* k, const std::optional<double>& v) {
      if (v) o[k] = *v;
    };
    put("p_wb", c.p_wb);
    put("p_nb", c.p_nb);
    put("p_wc", c.p_wc);
    put("p_nc", c.p_nc);
    put("q_wb", c.q_wb);
    put("q_wc", c.q_wc);
    put("q_nb", c.q_nb);
    put("q_nc", c.q_nc);
    put("r_w", c.r_w);
    put("r_n", c.r_n);
    put("gap", c.gap);
    if (c.feasible) o["feasible"] = *c.feasible;
    if (!c.cond_flags.empty()) o["cond_flags"] = c.cond_flags;
    if (!c.error.empty()) o["error"] = c.error;
    cells.push_back(o);
  }
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::InvalidParameter, "cli", "write_atomic", "cannot open " + tmp);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw Error(ErrorKind::InvalidParameter, "cli", "write_atomic", "short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error(ErrorKind::InvalidParameter, "cli", "write_atomic", "rename failed for " + path);
  }
}

}  // namespace csp
