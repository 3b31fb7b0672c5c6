#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pacsyn/types.hpp"

namespace pacsyn {

/// Successor distribution of one (state, action) row, stored structure-of-arrays.
struct RowView {
  std::span<const StateId> targets;
  std::span<const double> probs;

  std::size_t size() const { return targets.size(); }
  bool empty() const { return targets.empty(); }
};

/// Sparse kernel shared by labeled MDPs, product MDPs and known products.
/// Rows are indexed by state * num_actions + action; an empty row means the
/// action is disabled at that state. Targets within a row are strictly increasing.
class TransitionSystem {
 public:
  struct Entry {
    StateId target;
    double prob;
  };

  class Builder {
   public:
    Builder(std::size_t num_states, std::size_t num_actions);
    /// Accumulates into an existing entry with the same target.
    Builder& add(StateId from, ActionId action, StateId to, double prob);
    TransitionSystem build() &&;

   private:
    std::size_t num_states_;
    std::size_t num_actions_;
    std::vector<std::vector<Entry>> rows_;
  };

  TransitionSystem() = default;

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t num_transitions() const { return targets_.size(); }

  RowView row(StateId state, ActionId action) const {
    const std::size_t r = static_cast<std::size_t>(state) * num_actions_ + action;
    const std::size_t b = offsets_[r];
    const std::size_t e = offsets_[r + 1];
    return {std::span<const StateId>(targets_.data() + b, e - b),
            std::span<const double>(probs_.data() + b, e - b)};
  }
  bool enabled(StateId state, ActionId action) const { return !row(state, action).empty(); }
  std::vector<ActionId> enabled_actions(StateId state) const;
  /// Probability of a single transition, 0 if absent.
  double prob(StateId from, ActionId action, StateId to) const;

  /// Mutable access for in-place reweighting that preserves the support.
  std::span<double> mutable_probs(StateId state, ActionId action);

 private:
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<StateId> targets_;
  std::vector<double> probs_;
};

class MarkovChain {
 public:
  MarkovChain() = default;
  MarkovChain(std::vector<std::size_t> offsets, std::vector<StateId> targets,
              std::vector<double> probs);

  std::size_t num_states() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  RowView row(StateId state) const {
    const std::size_t b = offsets_[state];
    const std::size_t e = offsets_[state + 1];
    return {std::span<const StateId>(targets_.data() + b, e - b),
            std::span<const double>(probs_.data() + b, e - b)};
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<StateId> targets_;
  std::vector<double> probs_;
};

/// Total map state -> action.
struct MemorylessPolicy {
  std::vector<ActionId> choice;

  ActionId operator()(StateId v) const { return choice[v]; }
  std::size_t size() const { return choice.size(); }
  bool operator==(const MemorylessPolicy&) const = default;
};

/// Chain whose row at v is the system's row at (v, policy(v)).
/// Throws ContractViolation naming the state if the policy picks a disabled action.
MarkovChain induce_chain(const TransitionSystem& system, const MemorylessPolicy& policy);

/// Lowest enabled action per state; throws ContractViolation on a dead state.
MemorylessPolicy first_enabled_policy(const TransitionSystem& system);

/// Forward reachability from the given sources over all actions.
StateSet reachable_from(const TransitionSystem& system, std::span<const StateId> sources);

}  // namespace pacsyn
