#pragma once

#include <vector>

#include "pacsyn/end_components.hpp"
#include "pacsyn/product.hpp"
#include "pacsyn/values.hpp"

namespace pacsyn {

/// Known-model synthesis: accepting end states, then the policy maximizing
/// the probability of reaching them, with the in-component choice on C.
struct Synthesis {
  AcceptingSummary summary;
  UnboundedSolution solution;
};

Synthesis synthesize(const ProductMdp& p);

/// Exact probability of reaching the true accepting end states under f.
/// Throws DomainError if f does not cover the product.
std::vector<double> evaluate_policy(const ProductMdp& truth, const MemorylessPolicy& f);
/// Same with a step bound.
ValueTable evaluate_policy_bounded(const ProductMdp& truth, const MemorylessPolicy& f,
                                   std::size_t horizon);

/// Product state entered when the MDP starts in q: (q, T(I, L(q))), or q itself
/// for a product without automaton.
StateId entry_state(const ProductMdp& p, StateId q);

/// values[entry_state(p, q)] for every MDP state q.
std::vector<double> values_by_mdp_state(const ProductMdp& p, const std::vector<double>& values);

}  // namespace pacsyn
