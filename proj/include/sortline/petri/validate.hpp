#pragma once

#include <string>
#include <vector>

#include "sortline/petri/net.hpp"

namespace sortline::petri {

enum class DiagnosticKind {
  dimension_mismatch,
  negative_arc_weight,
  missing_hidden_place,
  bad_hidden_place,
  bad_duration,
  place_class_violation,
  bad_inscription,
  invalid_initial_marking,
  unfireable_transition,
};

struct Diagnostic {
  DiagnosticKind kind;
  std::string message;
};

inline constexpr int kDefaultReachabilityBudget = 10'000;

/// Structural and behavioural checks. An empty result means the net is
/// well formed and every transition fires somewhere in the bounded
/// reachability graph of the declared initial marking. Successors follow
/// the step semantics: fire one enabled transition (or none) then tick.
[[nodiscard]] std::vector<Diagnostic> validate_net(const PetriNet& net,
                                                   int marking_budget = kDefaultReachabilityBudget);

/// Structural checks only (no reachability exploration).
[[nodiscard]] std::vector<Diagnostic> validate_structure(const PetriNet& net);

}  // namespace sortline::petri
