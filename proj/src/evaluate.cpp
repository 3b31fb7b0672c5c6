#include "pacsyn/evaluate.hpp"

namespace pacsyn {

Synthesis synthesize(const ProductMdp& p) {
  Synthesis out{accepting_end_components(p), {}};
  out.solution = optimal_unbounded(p.system(), out.summary.accepting_states);
  apply_component_policies(out.summary, out.solution.policy);
  return out;
}

std::vector<double> evaluate_policy(const ProductMdp& truth, const MemorylessPolicy& f) {
  if (f.size() != truth.num_states()) throw DomainError("policy does not cover the product");
  const AcceptingSummary summary = accepting_end_components(truth);
  return unbounded_hit(induce_chain(truth.system(), f), summary.accepting_states);
}

ValueTable evaluate_policy_bounded(const ProductMdp& truth, const MemorylessPolicy& f,
                                   std::size_t horizon) {
  if (f.size() != truth.num_states()) throw DomainError("policy does not cover the product");
  const AcceptingSummary summary = accepting_end_components(truth);
  return policy_bounded_value(truth, f, summary.accepting_states, horizon);
}

StateId entry_state(const ProductMdp& p, StateId q) {
  if (q >= p.num_mdp_states()) throw DomainError("MDP state out of range");
  if (!p.automaton()) return p.index(q, 0);
  const RabinAutomaton& a = *p.automaton();
  return p.index(q, a.step(a.initial(), p.letters()[q]));
}

std::vector<double> values_by_mdp_state(const ProductMdp& p, const std::vector<double>& values) {
  std::vector<double> out(p.num_mdp_states());
  for (StateId q = 0; q < out.size(); ++q) out[q] = values.at(entry_state(p, q));
  return out;
}

}  // namespace pacsyn
