#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pacsyn/transition_system.hpp"
#include "pacsyn/types.hpp"

namespace pacsyn {

inline constexpr double kRowSumTolerance = 1e-9;
/// Entries below this are treated as structural zeros when a model is finalized.
inline constexpr double kStructuralZero = 1e-12;

/// Finite labeled MDP with dense state/action indices and string names at the edges.
class LabeledMdp {
 public:
  LabeledMdp() = default;
  LabeledMdp(std::vector<std::string> states, std::vector<std::string> actions, StateId initial,
             std::vector<std::string> propositions, std::vector<Letter> labels,
             TransitionSystem kernel);

  std::size_t num_states() const { return states_.size(); }
  std::size_t num_actions() const { return actions_.size(); }
  StateId initial() const { return initial_; }

  const std::vector<std::string>& state_names() const { return states_; }
  const std::vector<std::string>& action_names() const { return actions_; }
  const std::vector<std::string>& propositions() const { return propositions_; }
  const std::string& state_name(StateId q) const { return states_.at(q); }
  const std::string& action_name(ActionId a) const { return actions_.at(a); }

  std::optional<StateId> find_state(std::string_view name) const;
  std::optional<ActionId> find_action(std::string_view name) const;
  StateId state_index(std::string_view name) const;
  ActionId action_index(std::string_view name) const;

  Letter label(StateId q) const { return labels_.at(q); }
  const std::vector<Letter>& labels() const { return labels_; }

  const TransitionSystem& kernel() const { return kernel_; }

  /// Renormalizes every enabled row in place: entries below kStructuralZero
  /// are dropped and the residual is absorbed by the largest entry, so that
  /// re-applying is a no-op. Call only on a model that passed validate().
  void renormalize();

 private:
  std::vector<std::string> states_;
  std::vector<std::string> actions_;
  StateId initial_ = 0;
  std::vector<std::string> propositions_;
  std::vector<Letter> labels_;
  TransitionSystem kernel_;
  std::unordered_map<std::string, StateId> state_lookup_;
  std::unordered_map<std::string, ActionId> action_lookup_;
};

struct Violation {
  enum class Kind { RowSum, ProbabilityRange, DeadState, Structure };
  Kind kind;
  StateId state;
  std::optional<ActionId> action;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report)
      : Error("invalid model:\n" + report.to_string()), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

ValidationReport validate(const LabeledMdp& m);

/// Throws ValidationError unless valid, then renormalizes.
void finalize(LabeledMdp& m);

struct Edge {
  StateId from;
  ActionId action;
  StateId to;
  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

/// The positive-probability triples, in (from, action, to) order.
std::vector<Edge> structure(const LabeledMdp& m);

std::vector<ActionId> enabled_actions(const LabeledMdp& m, StateId q);

}  // namespace pacsyn
