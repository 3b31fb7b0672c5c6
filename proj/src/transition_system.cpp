#include "pacsyn/transition_system.hpp"

#include <algorithm>
#include <string>

namespace pacsyn {

TransitionSystem::Builder::Builder(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states), num_actions_(num_actions), rows_(num_states * num_actions) {
  if (num_actions > kMaxActions) {
    throw DomainError("at most " + std::to_string(kMaxActions) + " actions are supported");
  }
}

TransitionSystem::Builder& TransitionSystem::Builder::add(StateId from, ActionId action,
                                                          StateId to, double prob) {
  if (from >= num_states_ || to >= num_states_ || action >= num_actions_) {
    throw DomainError("transition index out of range");
  }
  auto& row = rows_[static_cast<std::size_t>(from) * num_actions_ + action];
  auto it = std::find_if(row.begin(), row.end(), [to](const Entry& e) { return e.target == to; });
  if (it != row.end()) {
    it->prob += prob;
  } else {
    row.push_back({to, prob});
  }
  return *this;
}

TransitionSystem TransitionSystem::Builder::build() && {
  TransitionSystem ts;
  ts.num_states_ = num_states_;
  ts.num_actions_ = num_actions_;
  ts.offsets_.reserve(rows_.size() + 1);
  ts.offsets_.push_back(0);
  for (auto& row : rows_) {
    std::sort(row.begin(), row.end(),
              [](const Entry& a, const Entry& b) { return a.target < b.target; });
    for (const Entry& e : row) {
      if (e.prob == 0.0) continue;
      ts.targets_.push_back(e.target);
      ts.probs_.push_back(e.prob);
    }
    ts.offsets_.push_back(ts.targets_.size());
  }
  return ts;
}

std::vector<ActionId> TransitionSystem::enabled_actions(StateId state) const {
  if (state >= num_states_) throw DomainError("unknown state index " + std::to_string(state));
  std::vector<ActionId> out;
  for (ActionId a = 0; a < num_actions_; ++a) {
    if (enabled(state, a)) out.push_back(a);
  }
  return out;
}

double TransitionSystem::prob(StateId from, ActionId action, StateId to) const {
  const RowView r = row(from, action);
  auto it = std::lower_bound(r.targets.begin(), r.targets.end(), to);
  if (it == r.targets.end() || *it != to) return 0.0;
  return r.probs[static_cast<std::size_t>(it - r.targets.begin())];
}

std::span<double> TransitionSystem::mutable_probs(StateId state, ActionId action) {
  const std::size_t r = static_cast<std::size_t>(state) * num_actions_ + action;
  return {probs_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
}

MarkovChain::MarkovChain(std::vector<std::size_t> offsets, std::vector<StateId> targets,
                         std::vector<double> probs)
    : offsets_(std::move(offsets)), targets_(std::move(targets)), probs_(std::move(probs)) {}

MarkovChain induce_chain(const TransitionSystem& system, const MemorylessPolicy& policy) {
  const std::size_t n = system.num_states();
  if (policy.size() != n) {
    throw ContractViolation("policy covers " + std::to_string(policy.size()) +
                            " states, system has " + std::to_string(n));
  }
  std::vector<std::size_t> offsets{0};
  std::vector<StateId> targets;
  std::vector<double> probs;
  offsets.reserve(n + 1);
  for (StateId v = 0; v < n; ++v) {
    const ActionId a = policy(v);
    if (a >= system.num_actions() || !system.enabled(v, a)) {
      throw ContractViolation("policy chooses disabled action " + std::to_string(a) +
                              " at state " + std::to_string(v));
    }
    const RowView r = system.row(v, a);
    targets.insert(targets.end(), r.targets.begin(), r.targets.end());
    probs.insert(probs.end(), r.probs.begin(), r.probs.end());
    offsets.push_back(targets.size());
  }
  return MarkovChain(std::move(offsets), std::move(targets), std::move(probs));
}

MemorylessPolicy first_enabled_policy(const TransitionSystem& system) {
  MemorylessPolicy f;
  f.choice.resize(system.num_states());
  for (StateId v = 0; v < system.num_states(); ++v) {
    ActionId a = 0;
    while (a < system.num_actions() && !system.enabled(v, a)) ++a;
    if (a == system.num_actions()) {
      throw ContractViolation("state " + std::to_string(v) + " has no enabled action");
    }
    f.choice[v] = a;
  }
  return f;
}

StateSet reachable_from(const TransitionSystem& system, std::span<const StateId> sources) {
  StateSet seen(system.num_states(), 0);
  std::vector<StateId> stack(sources.begin(), sources.end());
  for (StateId s : stack) seen[s] = 1;
  while (!stack.empty()) {
    const StateId v = stack.back();
    stack.pop_back();
    for (ActionId a = 0; a < system.num_actions(); ++a) {
      for (StateId t : system.row(v, a).targets) {
        if (!seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
      }
    }
  }
  return seen;
}

}  // namespace pacsyn
