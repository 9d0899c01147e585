#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace csp {

enum class ErrorKind {
  InvalidParameter,
  DegenerateDemand,
  GatingCondition,
  FixedPointDiverged,
  UndefinedElasticity,
  SingularSystem,
  NotAnEquilibrium,
  Infeasible,
  NonConvergence,
  AmbiguousRegime,
  NegativePriceRegime,
  Precondition,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidParameter: return "invalid_parameter";
    case ErrorKind::DegenerateDemand: return "degenerate_demand";
    case ErrorKind::GatingCondition: return "gating_condition";
    case ErrorKind::FixedPointDiverged: return "fixed_point_diverged";
    case ErrorKind::UndefinedElasticity: return "undefined_elasticity";
    case ErrorKind::SingularSystem: return "singular_system";
    case ErrorKind::NotAnEquilibrium: return "not_an_equilibrium";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::NonConvergence: return "non_convergence";
    case ErrorKind::AmbiguousRegime: return "ambiguous_regime";
    case ErrorKind::NegativePriceRegime: return "negative_price_regime";
    case ErrorKind::Precondition: return "precondition";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string op, const std::string& msg)
      : std::runtime_error("[" + module + "." + op + "] " + msg),
        kind_(kind),
        module_(std::move(module)),
        op_(std::move(op)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& module() const { return module_; }
  const std::string& op() const { return op_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string op_;
};

}  // namespace csp
