#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pacsyn/labeled_mdp.hpp"
#include "pacsyn/rabin.hpp"
#include "pacsyn/transition_system.hpp"

namespace pacsyn {

/// Synchronized product of a labeled MDP and a Rabin automaton.
///
/// All |Q|·|S| pairs are materialized, with the fixed encoding
/// v = q * |S| + s. The automaton component reads the label of the state
/// being entered: (q, s) --σ--> (q', T(s, L(q'))).
class ProductMdp {
 public:
  ProductMdp() = default;
  /// Product given directly by its parts (|S| may be 1 for plain MDPs).
  ProductMdp(TransitionSystem system, std::vector<RabinPair> pairs, StateId initial,
             std::size_t num_mdp_states, std::size_t num_automaton_states);

  const TransitionSystem& system() const { return system_; }
  const std::vector<RabinPair>& pairs() const { return pairs_; }
  StateId initial() const { return initial_; }
  std::size_t num_states() const { return system_.num_states(); }
  std::size_t num_actions() const { return system_.num_actions(); }
  std::size_t num_mdp_states() const { return num_q_; }
  std::size_t num_automaton_states() const { return num_s_; }

  StateId index(StateId q, StateId s) const { return static_cast<StateId>(q * num_s_ + s); }
  StateId mdp_state(StateId v) const { return static_cast<StateId>(v / num_s_); }
  StateId automaton_state(StateId v) const { return static_cast<StateId>(v % num_s_); }

  /// Set when built by build_product; needed to lift policies.
  const RabinAutomaton* automaton() const { return automaton_.get(); }
  /// Automaton letter of each MDP state (empty unless built by build_product).
  const std::vector<Letter>& letters() const { return letters_; }

  /// "q|s" when names are available, otherwise the index.
  std::string state_name(StateId v) const;

 private:
  friend ProductMdp build_product(const LabeledMdp&, const RabinAutomaton&);

  TransitionSystem system_;
  std::vector<RabinPair> pairs_;
  StateId initial_ = 0;
  std::size_t num_q_ = 0;
  std::size_t num_s_ = 1;
  std::shared_ptr<const RabinAutomaton> automaton_;
  std::vector<Letter> letters_;
  std::vector<std::string> mdp_names_;
};

/// Translates each MDP label into the automaton's proposition numbering.
/// Throws DomainError unless both declare the same proposition set.
std::vector<Letter> automaton_letters(const LabeledMdp& m, const RabinAutomaton& a);

ProductMdp build_product(const LabeledMdp& m, const RabinAutomaton& a);

/// States reachable from the product's initial state.
StateSet reachable_states(const ProductMdp& p);

/// Product policy executed on the base MDP with the automaton state as memory.
class FiniteMemoryPolicy {
 public:
  FiniteMemoryPolicy(std::shared_ptr<const RabinAutomaton> automaton, std::vector<Letter> letters,
                     std::vector<ActionId> output);

  std::size_t num_memory_states() const { return automaton_->num_states(); }
  /// Memory after observing the initial MDP state.
  StateId initial_memory(StateId q0) const;
  /// Memory after moving to q_next.
  StateId update(StateId memory, StateId q_next) const;
  ActionId action(StateId q, StateId memory) const;

  const RabinAutomaton& automaton() const { return *automaton_; }
  /// Output table indexed like the product (q * |S| + s).
  const std::vector<ActionId>& output() const { return output_; }

 private:
  std::shared_ptr<const RabinAutomaton> automaton_;
  std::vector<Letter> letters_;
  std::vector<ActionId> output_;
};

FiniteMemoryPolicy lift_policy(const ProductMdp& p, const MemorylessPolicy& f);

}  // namespace pacsyn
