#include "pacsyn/labeled_mdp.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace pacsyn {

LabeledMdp::LabeledMdp(std::vector<std::string> states, std::vector<std::string> actions,
                       StateId initial, std::vector<std::string> propositions,
                       std::vector<Letter> labels, TransitionSystem kernel)
    : states_(std::move(states)),
      actions_(std::move(actions)),
      initial_(initial),
      propositions_(std::move(propositions)),
      labels_(std::move(labels)),
      kernel_(std::move(kernel)) {
  if (states_.empty()) throw DomainError("an MDP needs at least one state");
  if (initial_ >= states_.size()) throw DomainError("initial state index out of range");
  if (labels_.size() != states_.size()) throw DomainError("one label per state is required");
  if (propositions_.size() > kMaxPropositions) {
    throw DomainError("at most " + std::to_string(kMaxPropositions) + " propositions are supported");
  }
  if (kernel_.num_states() != states_.size() || kernel_.num_actions() != actions_.size()) {
    throw DomainError("kernel dimensions do not match the state/action sets");
  }
  for (StateId q = 0; q < states_.size(); ++q) {
    if (!state_lookup_.emplace(states_[q], q).second) {
      throw DomainError("duplicate state name '" + states_[q] + "'");
    }
  }
  for (ActionId a = 0; a < actions_.size(); ++a) {
    if (!action_lookup_.emplace(actions_[a], a).second) {
      throw DomainError("duplicate action name '" + actions_[a] + "'");
    }
  }
}

std::optional<StateId> LabeledMdp::find_state(std::string_view name) const {
  auto it = state_lookup_.find(std::string(name));
  if (it == state_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<ActionId> LabeledMdp::find_action(std::string_view name) const {
  auto it = action_lookup_.find(std::string(name));
  if (it == action_lookup_.end()) return std::nullopt;
  return it->second;
}

StateId LabeledMdp::state_index(std::string_view name) const {
  if (auto q = find_state(name)) return *q;
  throw DomainError("unknown state '" + std::string(name) + "'");
}

ActionId LabeledMdp::action_index(std::string_view name) const {
  if (auto a = find_action(name)) return *a;
  throw DomainError("unknown action '" + std::string(name) + "'");
}

void LabeledMdp::renormalize() {
  TransitionSystem::Builder b(num_states(), num_actions());
  for (StateId q = 0; q < num_states(); ++q) {
    for (ActionId a = 0; a < num_actions(); ++a) {
      const RowView r = kernel_.row(q, a);
      if (r.empty()) continue;
      std::size_t largest = r.size();
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.probs[i] < kStructuralZero) continue;
        if (largest == r.size() || r.probs[i] > r.probs[largest]) largest = i;
      }
      double others = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i == largest || r.probs[i] < kStructuralZero) continue;
        others += r.probs[i];
        b.add(q, a, r.targets[i], r.probs[i]);
      }
      b.add(q, a, r.targets[largest], 1.0 - others);
    }
  }
  kernel_ = std::move(b).build();
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const Violation& v : violations) out << "  " << v.message << '\n';
  return out.str();
}

ValidationReport validate(const LabeledMdp& m) {
  ValidationReport report;
  const TransitionSystem& k = m.kernel();
  for (StateId q = 0; q < m.num_states(); ++q) {
    bool any_enabled = false;
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      const RowView r = k.row(q, a);
      if (r.empty()) continue;
      any_enabled = true;
      double sum = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double p = r.probs[i];
        sum += p;
        if (!(p >= 0.0 && p <= 1.0)) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.17g", p);
          report.violations.push_back(
              {Violation::Kind::ProbabilityRange, q, a,
               "probability " + std::string(buf) + " out of [0,1] for (" + m.state_name(q) + "," +
                   m.action_name(a) + "," + m.state_name(r.targets[i]) + ")"});
        }
      }
      if (!(std::fabs(sum - 1.0) <= kRowSumTolerance)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", sum);
        report.violations.push_back({Violation::Kind::RowSum, q, a,
                                     "row sum " + std::string(buf) + " for (" + m.state_name(q) +
                                         "," + m.action_name(a) + ")"});
      }
    }
    if (!any_enabled) {
      report.violations.push_back({Violation::Kind::DeadState, q, std::nullopt,
                                   "state " + m.state_name(q) + " has no enabled action"});
    }
  }
  return report;
}

void finalize(LabeledMdp& m) {
  ValidationReport report = validate(m);
  if (!report.ok()) throw ValidationError(std::move(report));
  m.renormalize();
}

std::vector<Edge> structure(const LabeledMdp& m) {
  std::vector<Edge> edges;
  for (StateId q = 0; q < m.num_states(); ++q) {
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      const RowView r = m.kernel().row(q, a);
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.probs[i] > 0.0) edges.push_back({q, a, r.targets[i]});
      }
    }
  }
  return edges;
}

std::vector<ActionId> enabled_actions(const LabeledMdp& m, StateId q) {
  if (q >= m.num_states()) throw DomainError("unknown state index " + std::to_string(q));
  return m.kernel().enabled_actions(q);
}

}  // namespace pacsyn
