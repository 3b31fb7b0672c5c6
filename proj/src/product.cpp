#include "pacsyn/product.hpp"

#include <algorithm>

namespace pacsyn {

ProductMdp::ProductMdp(TransitionSystem system, std::vector<RabinPair> pairs, StateId initial,
                       std::size_t num_mdp_states, std::size_t num_automaton_states)
    : system_(std::move(system)),
      pairs_(std::move(pairs)),
      initial_(initial),
      num_q_(num_mdp_states),
      num_s_(num_automaton_states) {
  if (num_q_ * num_s_ != system_.num_states()) {
    throw DomainError("product dimensions do not match the transition system");
  }
  if (initial_ >= system_.num_states()) throw DomainError("initial product state out of range");
  for (const RabinPair& p : pairs_) {
    if (p.finite.size() != system_.num_states() || p.infinite.size() != system_.num_states()) {
      throw DomainError("acceptance pair has wrong dimension");
    }
  }
}

std::string ProductMdp::state_name(StateId v) const {
  if (automaton_ && !mdp_names_.empty()) {
    return mdp_names_[mdp_state(v)] + "|" + automaton_->state_name(automaton_state(v));
  }
  return std::to_string(v);
}

std::vector<Letter> automaton_letters(const LabeledMdp& m, const RabinAutomaton& a) {
  const auto& mp = m.propositions();
  const auto& ap = a.propositions();
  std::vector<std::size_t> bit(mp.size());
  for (std::size_t i = 0; i < mp.size(); ++i) {
    auto idx = a.proposition_index(mp[i]);
    if (!idx) throw DomainError("proposition '" + mp[i] + "' is not declared by the automaton");
    bit[i] = *idx;
  }
  for (const std::string& p : ap) {
    if (std::find(mp.begin(), mp.end(), p) == mp.end()) {
      throw DomainError("proposition '" + p + "' is not declared by the MDP");
    }
  }
  std::vector<Letter> out(m.num_states(), 0);
  for (StateId q = 0; q < m.num_states(); ++q) {
    for (std::size_t i = 0; i < mp.size(); ++i) {
      if (m.label(q) & (Letter{1} << i)) out[q] |= Letter{1} << bit[i];
    }
  }
  return out;
}

ProductMdp build_product(const LabeledMdp& m, const RabinAutomaton& a) {
  std::vector<Letter> letters = automaton_letters(m, a);
  const std::size_t nq = m.num_states();
  const std::size_t ns = a.num_states();
  const TransitionSystem& k = m.kernel();
  TransitionSystem::Builder b(nq * ns, m.num_actions());
  for (StateId q = 0; q < nq; ++q) {
    for (StateId s = 0; s < ns; ++s) {
      const StateId v = static_cast<StateId>(q * ns + s);
      for (ActionId act = 0; act < m.num_actions(); ++act) {
        const RowView r = k.row(q, act);
        for (std::size_t i = 0; i < r.size(); ++i) {
          const StateId q2 = r.targets[i];
          const StateId s2 = a.step(s, letters[q2]);
          b.add(v, act, static_cast<StateId>(q2 * ns + s2), r.probs[i]);
        }
      }
    }
  }
  std::vector<RabinPair> pairs;
  for (const RabinPair& p : a.pairs()) {
    RabinPair lifted{StateSet(nq * ns, 0), StateSet(nq * ns, 0)};
    for (StateId q = 0; q < nq; ++q) {
      for (StateId s = 0; s < ns; ++s) {
        lifted.finite[q * ns + s] = p.finite[s];
        lifted.infinite[q * ns + s] = p.infinite[s];
      }
    }
    pairs.push_back(std::move(lifted));
  }
  const StateId q0 = m.initial();
  const StateId v0 = static_cast<StateId>(q0 * ns + a.step(a.initial(), letters[q0]));
  ProductMdp p(std::move(b).build(), std::move(pairs), v0, nq, ns);
  p.automaton_ = std::make_shared<const RabinAutomaton>(a);
  p.letters_ = std::move(letters);
  p.mdp_names_ = m.state_names();
  return p;
}

StateSet reachable_states(const ProductMdp& p) {
  const StateId init = p.initial();
  return reachable_from(p.system(), std::span<const StateId>(&init, 1));
}

FiniteMemoryPolicy::FiniteMemoryPolicy(std::shared_ptr<const RabinAutomaton> automaton,
                                       std::vector<Letter> letters, std::vector<ActionId> output)
    : automaton_(std::move(automaton)), letters_(std::move(letters)), output_(std::move(output)) {
  if (!automaton_) throw DomainError("finite-memory policy needs an automaton");
  if (output_.size() != letters_.size() * automaton_->num_states()) {
    throw DomainError("policy table does not cover Q x S");
  }
}

StateId FiniteMemoryPolicy::initial_memory(StateId q0) const {
  return automaton_->step(automaton_->initial(), letters_.at(q0));
}

StateId FiniteMemoryPolicy::update(StateId memory, StateId q_next) const {
  return automaton_->step(memory, letters_.at(q_next));
}

ActionId FiniteMemoryPolicy::action(StateId q, StateId memory) const {
  return output_.at(static_cast<std::size_t>(q) * automaton_->num_states() + memory);
}

FiniteMemoryPolicy lift_policy(const ProductMdp& p, const MemorylessPolicy& f) {
  if (!p.automaton()) throw DomainError("product was not built from an automaton");
  if (f.size() != p.num_states()) throw DomainError("policy does not cover the product");
  return FiniteMemoryPolicy(std::make_shared<const RabinAutomaton>(*p.automaton()), p.letters(),
                            f.choice);
}

}  // namespace pacsyn
