#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pacsyn/product.hpp"
#include "pacsyn/transition_system.hpp"

namespace pacsyn {

/// Sub-MDP closed under its actions and strongly connected.
struct EndComponent {
  /// W, sorted.
  std::vector<StateId> states;
  /// Stay-inside actions per state of W (same order as `states`).
  std::vector<std::vector<ActionId>> actions;
  /// One action per state of W (same order as `states`).
  std::vector<ActionId> policy;
  /// Whether (W, ->policy) is strongly connected. Always true for accepting
  /// end components; false for a maximal end component that no single
  /// memoryless choice keeps strongly connected.
  bool policy_strongly_connected = false;

  bool contains(StateId v) const;
};

/// Maximal end components restricted to `allowed` (all states if empty), by
/// iterated SCC refinement. Components are disjoint and listed by smallest state.
std::vector<EndComponent> max_end_components(const TransitionSystem& system,
                                             const StateSet& allowed = {});
std::vector<EndComponent> max_end_components(const ProductMdp& p);

struct AcceptingSummary {
  std::vector<EndComponent> aecs;
  /// Rabin pair satisfied by each entry of `aecs`.
  std::vector<std::size_t> witness_pair;
  /// C: union of the AEC state sets.
  StateSet accepting_states;
  /// False if the per-state search ran out of budget somewhere and the
  /// affected maximal component was taken whole (see README).
  bool exhaustive = true;
};

struct AecOptions {
  /// Node expansions allowed per state in the memoryless-witness search.
  std::uint64_t search_budget = 2'000'000;
};

/// Accepting end components with memoryless deterministic witnesses.
///
/// For each pair i, the maximal end components of the product restricted to
/// V \ J_i that meet K_i are kept. Inside each such component, a state is
/// accepting iff some memoryless choice puts it in one strongly connected
/// closed set with a K_i state; each returned AEC carries that choice.
AcceptingSummary accepting_end_components(const TransitionSystem& system,
                                          const std::vector<RabinPair>& pairs,
                                          const AecOptions& options = {});
AcceptingSummary accepting_end_components(const ProductMdp& p, const AecOptions& options = {});

/// The stored in-component choice as (state, action) pairs.
std::vector<std::pair<StateId, ActionId>> in_component_policy(const EndComponent& ec);

/// Overrides `policy` on every accepting state with the first AEC containing it.
void apply_component_policies(const AcceptingSummary& summary, MemorylessPolicy& policy);

}  // namespace pacsyn
