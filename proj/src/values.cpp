#include "pacsyn/values.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pacsyn/kernels.hpp"

namespace pacsyn {
namespace {

void check_target(std::size_t n, const StateSet& target) {
  if (target.size() != n) throw DomainError("target set does not match the state space");
}

double row_value(const RowView& r, const double* values) {
  return kernels::gather_dot(r.probs.data(), r.targets.data(), r.size(), values);
}

/// States from which the target is reachable along positive-probability edges.
template <class Successors>
StateSet backward_reach(std::size_t n, const StateSet& target, const StateSet& allowed,
                        Successors&& succ) {
  std::vector<std::vector<StateId>> pred(n);
  for (StateId v = 0; v < n; ++v) {
    if (!allowed[v]) continue;
    succ(v, [&](StateId t) { pred[t].push_back(v); });
  }
  StateSet seen(n, 0);
  std::vector<StateId> stack;
  for (StateId v = 0; v < n; ++v) {
    if (target[v]) {
      seen[v] = 1;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const StateId v = stack.back();
    stack.pop_back();
    for (StateId u : pred[v]) {
      if (allowed[u] && !seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  return seen;
}

}  // namespace

ValueTable bounded_hit(const MarkovChain& chain, const StateSet& target, std::size_t horizon) {
  const std::size_t n = chain.num_states();
  if (n == 0) throw DomainError("empty Markov chain");
  check_target(n, target);
  ValueTable table(n, horizon);
  for (StateId v = 0; v < n; ++v) table.at(0)[v] = target[v] ? 1.0 : 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double* prev = table.at(t - 1).data();
    std::span<double> cur = table.at(t);
    for (StateId v = 0; v < n; ++v) {
      cur[v] = target[v] ? 1.0 : row_value(chain.row(v), prev);
    }
  }
  return table;
}

std::vector<double> unbounded_hit(const MarkovChain& chain, const StateSet& target) {
  const std::size_t n = chain.num_states();
  if (n == 0) throw DomainError("empty Markov chain");
  check_target(n, target);
  const StateSet everywhere(n, 1);
  auto succ = [&](StateId v, auto&& emit) {
    if (target[v]) return;
    for (StateId t : chain.row(v).targets) emit(t);
  };
  const StateSet can_reach = backward_reach(n, target, everywhere, succ);
  StateSet zero(n, 0);
  for (StateId v = 0; v < n; ++v) zero[v] = !can_reach[v];
  // Almost sure: no path to a zero state that avoids the target.
  const StateSet can_fail = backward_reach(n, zero, everywhere, succ);
  std::vector<double> cur(n, 0.0);
  std::vector<StateId> open;
  for (StateId v = 0; v < n; ++v) {
    if (target[v] || !can_fail[v]) {
      cur[v] = 1.0;
    } else if (!zero[v]) {
      open.push_back(v);
    }
  }
  std::vector<double> next = cur;
  const std::size_t cap = 100 * n;
  double residual = 0.0;
  for (std::size_t it = 0; it < cap; ++it) {
    residual = 0.0;
    for (StateId v : open) {
      next[v] = row_value(chain.row(v), cur.data());
      residual = std::max(residual, std::abs(next[v] - cur[v]));
    }
    std::swap(cur, next);
    if (residual < kResidualTolerance) return cur;
  }
  if (open.empty()) return cur;
  throw ConvergenceError("value iteration did not converge within " + std::to_string(cap) +
                             " sweeps",
                         residual);
}

BoundedSolution optimal_bounded(const TransitionSystem& system, const StateSet& target,
                                std::size_t horizon) {
  if (horizon == 0) throw DomainError("horizon must be at least 1");
  const std::size_t n = system.num_states();
  if (n == 0) throw DomainError("empty transition system");
  check_target(n, target);
  BoundedSolution out{ValueTable(n, horizon), MemorylessPolicy{std::vector<ActionId>(n, 0)}};
  ValueTable& table = out.values;
  for (StateId v = 0; v < n; ++v) table.at(0)[v] = target[v] ? 1.0 : 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double* prev = table.at(t - 1).data();
    std::span<double> cur = table.at(t);
    const bool last = t == horizon;
    for (StateId v = 0; v < n; ++v) {
      double best = -1.0;
      ActionId arg = 0;
      for (ActionId a = 0; a < system.num_actions(); ++a) {
        const RowView r = system.row(v, a);
        if (r.empty()) continue;
        const double q = row_value(r, prev);
        if (q > best + kTieTolerance || best < 0.0) {
          best = q;
          arg = a;
        }
      }
      if (best < 0.0) throw ContractViolation("state " + std::to_string(v) + " has no enabled action");
      cur[v] = target[v] ? 1.0 : best;
      if (last) out.policy.choice[v] = arg;
    }
  }
  // A tie at the full horizon is settled at the shortest horizon where the
  // tied actions differ: the action that gets there sooner wins. Without this
  // the stationary policy can keep circling between equally good states.
  std::vector<ActionId> tied;
  for (StateId v = 0; v < n; ++v) {
    tied.clear();
    const double best = row_value(system.row(v, out.policy.choice[v]), table.at(horizon - 1).data());
    for (ActionId a = 0; a < system.num_actions(); ++a) {
      const RowView r = system.row(v, a);
      if (!r.empty() && row_value(r, table.at(horizon - 1).data()) >= best - kTieTolerance) {
        tied.push_back(a);
      }
    }
    for (std::size_t t = horizon - 1; t-- > 0 && tied.size() > 1;) {
      const double* values = table.at(t).data();
      double top = -1.0;
      for (ActionId a : tied) top = std::max(top, row_value(system.row(v, a), values));
      std::erase_if(tied, [&](ActionId a) {
        return row_value(system.row(v, a), values) < top - kTieTolerance;
      });
    }
    out.policy.choice[v] = tied.front();
  }
  return out;
}

BoundedSolution optimal_bounded(const ProductMdp& p, const StateSet& target, std::size_t horizon) {
  return optimal_bounded(p.system(), target, horizon);
}

ValueTable policy_bounded_value(const TransitionSystem& system, const MemorylessPolicy& f,
                                const StateSet& target, std::size_t horizon) {
  return bounded_hit(induce_chain(system, f), target, horizon);
}

ValueTable policy_bounded_value(const ProductMdp& p, const MemorylessPolicy& f,
                                const StateSet& target, std::size_t horizon) {
  return policy_bounded_value(p.system(), f, target, horizon);
}

UnboundedSolution optimal_unbounded(const TransitionSystem& system, const StateSet& target) {
  const std::size_t n = system.num_states();
  if (n == 0) throw DomainError("empty transition system");
  check_target(n, target);
  const std::size_t na = system.num_actions();
  const StateSet everywhere(n, 1);
  auto succ = [&](StateId v, auto&& emit) {
    if (target[v]) return;
    for (ActionId a = 0; a < na; ++a) {
      for (StateId t : system.row(v, a).targets) emit(t);
    }
  };
  const StateSet positive = backward_reach(n, target, everywhere, succ);

  // States where some policy reaches the target almost surely.
  StateSet sure = positive;
  while (true) {
    auto inside = [&](StateId v, auto&& emit) {
      if (target[v]) return;
      for (ActionId a = 0; a < na; ++a) {
        const RowView r = system.row(v, a);
        if (r.empty()) continue;
        const bool closed =
            std::all_of(r.targets.begin(), r.targets.end(), [&](StateId t) { return sure[t] != 0; });
        if (!closed) continue;
        for (StateId t : r.targets) emit(t);
      }
    };
    StateSet next = backward_reach(n, target, sure, inside);
    for (StateId v = 0; v < n; ++v) next[v] = next[v] && sure[v];
    if (next == sure) break;
    sure = std::move(next);
  }

  std::vector<double> cur(n, 0.0);
  std::vector<StateId> open;
  for (StateId v = 0; v < n; ++v) {
    if (target[v] || sure[v]) {
      cur[v] = 1.0;
    } else if (positive[v]) {
      open.push_back(v);
    }
  }
  std::vector<double> next = cur;
  const std::size_t cap = 100 * n;
  double residual = 0.0;
  bool converged = open.empty();
  for (std::size_t it = 0; it < cap && !converged; ++it) {
    residual = 0.0;
    for (StateId v : open) {
      double best = 0.0;
      for (ActionId a = 0; a < na; ++a) {
        const RowView r = system.row(v, a);
        if (!r.empty()) best = std::max(best, row_value(r, cur.data()));
      }
      next[v] = best;
      residual = std::max(residual, std::abs(best - cur[v]));
    }
    std::swap(cur, next);
    converged = residual < kResidualTolerance;
  }
  if (!converged) {
    throw ConvergenceError("value iteration did not converge within " + std::to_string(cap) +
                               " sweeps",
                           residual);
  }

  // Among optimal actions, choose one with an edge into the set already
  // settled, growing that set outward from the target.
  constexpr double kOptimalSlack = 1e-9;
  UnboundedSolution out{cur, MemorylessPolicy{std::vector<ActionId>(n, 0)}};
  StateSet settled(n, 0);
  for (StateId v = 0; v < n; ++v) {
    const auto enabled = system.enabled_actions(v);
    if (enabled.empty()) throw ContractViolation("state " + std::to_string(v) + " has no enabled action");
    out.policy.choice[v] = enabled.front();
    if (target[v] || !positive[v]) settled[v] = 1;
  }
  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<std::pair<StateId, ActionId>> layer;
    for (StateId v = 0; v < n; ++v) {
      if (settled[v]) continue;
      for (ActionId a = 0; a < na; ++a) {
        const RowView r = system.row(v, a);
        if (r.empty() || row_value(r, cur.data()) < cur[v] - kOptimalSlack) continue;
        bool reaches = false;
        for (StateId t : r.targets) reaches |= settled[t] && (target[t] || positive[t]);
        if (reaches) {
          layer.emplace_back(v, a);
          break;
        }
      }
    }
    for (const auto& [v, a] : layer) {
      out.policy.choice[v] = a;
      settled[v] = 1;
      progress = true;
    }
  }
  return out;
}

MixingReport mixing_time(const MarkovChain& chain, const StateSet& target, double epsilon,
                         std::size_t cap) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  const std::vector<double> limit = unbounded_hit(chain, target);
  const ValueTable table = bounded_hit(chain, target, cap);
  MixingReport out;
  for (std::size_t t = 0; t <= cap; ++t) {
    const double d = kernels::max_abs_diff(table.at(t).data(), limit.data(), limit.size());
    out.d_curve.push_back(d);
    if (!out.t_mix && d <= epsilon) out.t_mix = t;
  }
  return out;
}

MixingReport mixing_time(const TransitionSystem& system, const MemorylessPolicy& f,
                         const StateSet& target, double epsilon, std::size_t cap) {
  return mixing_time(induce_chain(system, f), target, epsilon, cap);
}

}  // namespace pacsyn
