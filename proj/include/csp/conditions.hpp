#pragma once

#include <optional>

#include "csp/types.hpp"

namespace csp {

// Parameter screening. Margin sign convention: positive = satisfied, magnitude = slack.
// Gates: A1 (monopoly solver), B3-proof (duopoly family). Everything else is reported.

ConditionReport validate_monopoly(const MonopolyParams& p);

// B2-exact is emitted only when demands are supplied.
ConditionReport validate_duopoly(const DuopolyParams& p,
                                 const std::optional<Participation>& demands = std::nullopt);

void check_finite(const MonopolyParams& p, const char* module, const char* op);
void check_finite(const DuopolyParams& p, const char* module, const char* op);

}  // namespace csp
