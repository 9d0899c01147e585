#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "csp/conditions.hpp"
#include "csp/constrained.hpp"
#include "csp/duopoly.hpp"
#include "csp/errors.hpp"
#include "csp/io.hpp"
#include "csp/monopoly.hpp"
#include "csp/multihome.hpp"
#include "csp/sweep.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 12345;
  std::optional<double> eta_flag;
  std::optional<std::string> x_flag, y_flag;
};

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitGate = 4;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw csp::Error(csp::ErrorKind::InvalidParameter, "cli", "read_file", "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void emit(const CommonOpts& opts, const std::string& content) {
  if (opts.out_path.empty())
    std::cout << content;
  else
    csp::write_atomic(opts.out_path, content);
}

csp::AxisSpec parse_axis_flag(const std::string& text, const char* which) {
  // key:min:max:count
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4)
    throw csp::Error(csp::ErrorKind::InvalidParameter, "cli", "parse_axis",
                     std::string(which) + " must look like key:min:max:count");
  csp::AxisSpec a;
  a.key = parts[0];
  try {
    size_t used = 0;
    a.min = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("min");
    a.max = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("max");
    a.count = std::stoi(parts[3], &used);
    if (used != parts[3].size()) throw std::invalid_argument("count");
  } catch (const std::exception&) {
    throw csp::Error(csp::ErrorKind::InvalidParameter, "cli", "parse_axis",
                     std::string("non-numeric field in ") + which);
  }
  if (a.count < 2 || !(a.min < a.max))
    throw csp::Error(csp::ErrorKind::InvalidParameter, "cli", "parse_axis",
                     std::string(which) + " needs count >= 2 and min < max");
  return a;
}

csp::ConditionReport gate_report(const csp::RunConfig& cfg) {
  if (cfg.model == csp::SweepModel::Monopoly)
    return csp::validate_monopoly(std::get<csp::MonopolyParams>(cfg.params));
  return csp::validate_duopoly(std::get<csp::DuopolyParams>(cfg.params));
}

std::string report_csv(const csp::ConditionReport& r) {
  std::string out = "id,margin,pass,note\n";
  for (const auto& e : r.entries) {
    out += e.id;
    out += ',';
    out += csp::format_double(e.margin);
    out += ',';
    out += e.pass ? "true" : "false";
    out += ',';
    out += '"' + e.note + '"';
    out += '\n';
  }
  return out;
}

int run_command(const std::string& cmd, const CommonOpts& opts) {
  csp::RunConfig cfg;
  try {
    cfg = csp::parse_config(read_file(opts.config_path));
  } catch (const csp::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  auto model_name = [&]() {
    switch (cfg.model) {
      case csp::SweepModel::Monopoly: return "monopoly";
      case csp::SweepModel::Duopoly: return "duopoly";
      case csp::SweepModel::Constrained: return "constrained";
      case csp::SweepModel::Multihome: return "multihome";
    }
    return "";
  };

  if (cmd != "sweep" && cmd != "check" && cmd != model_name()) {
    std::cerr << "[cli." << cmd << "] config declares model '" << model_name() << "'\n";
    return kExitConfig;
  }

  csp::SolveOptions solve;
  solve.seed = opts.seed;

  try {
    if (cmd == "check") {
      csp::ConditionReport r;
      if (cfg.model == csp::SweepModel::Multihome)
        r = csp::validate_appendix(std::get<csp::DuopolyParams>(cfg.params));
      else
        r = gate_report(cfg);
      emit(opts, opts.format == "csv" ? report_csv(r) : csp::to_json(r));
      return 0;
    }
    if (cmd == "monopoly") {
      csp::MonoOutcome o = csp::monopoly_equilibrium(std::get<csp::MonopolyParams>(cfg.params));
      emit(opts, opts.format == "csv" ? csp::to_csv(o) : csp::to_json(o));
      return 0;
    }
    if (cmd == "duopoly") {
      csp::DuoOutcome o = csp::nash_equilibrium(std::get<csp::DuopolyParams>(cfg.params), solve);
      emit(opts, opts.format == "csv" ? csp::to_csv(o) : csp::to_json(o));
      return 0;
    }
    if (cmd == "constrained") {
      std::optional<double> eta = opts.eta_flag ? opts.eta_flag : cfg.eta;
      if (!eta) {
        std::cerr << "[cli.constrained] eta is required (config key or --eta); never defaulted\n";
        return kExitConfig;
      }
      csp::ConstraintSpec spec{*eta, cfg.grid.value_or(csp::GridSpec{})};
      csp::DuoOutcome o =
          csp::constrained_nash(std::get<csp::DuopolyParams>(cfg.params), spec, solve);
      emit(opts, opts.format == "csv" ? csp::to_csv(o) : csp::to_json(o));
      return 0;
    }
    if (cmd == "multihome") {
      csp::OneSidedEquilibrium o =
          csp::onesided_equilibrium(std::get<csp::DuopolyParams>(cfg.params));
      emit(opts, opts.format == "csv" ? csp::to_csv(o) : csp::to_json(o));
      return 0;
    }
    // sweep
    csp::SweepOptions sopt;
    sopt.solve = solve;
    if (opts.eta_flag)
      sopt.eta = opts.eta_flag;
    else if (cfg.eta)
      sopt.eta = cfg.eta;
    if (cfg.grid) sopt.grid = *cfg.grid;
    csp::AxisSpec x, y;
    try {
      x = opts.x_flag ? parse_axis_flag(*opts.x_flag, "--x")
                      : (cfg.sweep_x ? *cfg.sweep_x : csp::default_axis_x(cfg.model));
      y = opts.y_flag ? parse_axis_flag(*opts.y_flag, "--y")
                      : (cfg.sweep_y ? *cfg.sweep_y : csp::default_axis_y(cfg.model));
    } catch (const csp::Error& e) {
      std::cerr << e.what() << "\n";
      return kExitConfig;
    }
    csp::SweepGrid grid = csp::run_sweep(cfg.model, cfg.params, x, y, sopt);
    emit(opts, opts.format == "json" ? csp::to_json(grid) : csp::to_csv(grid));
    return 0;
  } catch (const csp::Error& e) {
    if (e.kind() == csp::ErrorKind::GatingCondition) {
      std::cerr << e.what() << "\n";
      std::cout << csp::to_json(gate_report(cfg));
      return kExitGate;
    }
    std::cerr << e.what() << "\n";
    return e.kind() == csp::ErrorKind::InvalidParameter ? kExitConfig : kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "[cli." << cmd << "] " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"commuting-service platform market solver"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const char* name : {"monopoly", "duopoly", "constrained", "multihome", "sweep", "check"}) {
    CLI::App* sub = app.add_subcommand(name, "");
    sub->add_option("--config", opts.config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_path, "output file (default stdout)");
    sub->add_option("--format", opts.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", opts.seed, "seed for solver cross-check starts");
    if (std::string(name) == "constrained" || std::string(name) == "sweep") {
      sub->add_option_function<double>(
          "--eta", [&opts](double v) { opts.eta_flag = v; }, "participation-gap bound");
    }
    if (std::string(name) == "sweep") {
      sub->add_option_function<std::string>(
          "--x", [&opts](const std::string& v) { opts.x_flag = v; }, "x axis key:min:max:count");
      sub->add_option_function<std::string>(
          "--y", [&opts](const std::string& v) { opts.y_flag = v; }, "y axis key:min:max:count");
    }
    subs.emplace_back(name, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) {
      if (name == "sweep" && !sub->count("--format")) opts.format = "csv";
      return run_command(name, opts);
    }
  }
  return kExitConfig;
}
