#include "pacsyn/end_components.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "graph.hpp"

namespace pacsyn {
namespace {

using Mask = std::uint64_t;

inline Mask bit(ActionId a) { return Mask{1} << a; }

inline ActionId lowest(Mask m) { return static_cast<ActionId>(std::countr_zero(m)); }

template <class F>
void for_each_action(Mask m, F&& f) {
  while (m) {
    const ActionId a = lowest(m);
    m &= m - 1;
    f(a);
  }
}

detail::Adjacency adjacency(const TransitionSystem& ts, const std::vector<Mask>& act,
                            const StateSet& active) {
  detail::Adjacency adj(ts.num_states());
  for (StateId v = 0; v < ts.num_states(); ++v) {
    if (!active[v]) continue;
    for_each_action(act[v], [&](ActionId a) {
      for (StateId t : ts.row(v, a).targets) adj[v].push_back(t);
    });
  }
  return adj;
}

/// Picks one action per state of W, lowest index first, keeping the graph
/// strongly connected after every choice. Returns false if some state has
/// no such action; `cur` is then left partially fixed.
bool greedy_strongly_connected(const TransitionSystem& ts, const std::vector<StateId>& w,
                               const StateSet& in_w, std::vector<Mask>& cur) {
  for (StateId v : w) {
    const Mask full = cur[v];
    if (std::popcount(full) == 1) continue;
    bool found = false;
    for_each_action(full, [&](ActionId a) {
      if (found) return;
      cur[v] = bit(a);
      if (detail::strongly_connected(adjacency(ts, cur, in_w), in_w)) found = true;
    });
    if (!found) {
      cur[v] = full;
      return false;
    }
  }
  return true;
}

/// Completes a partial choice on W: every unassigned state takes the lowest
/// action with an edge into the already-covered set, starting from `seed`.
void attract(const TransitionSystem& ts, const std::vector<StateId>& w,
             const std::vector<Mask>& act, std::vector<int>& choice, StateSet covered) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (StateId v : w) {
      if (covered[v]) continue;
      for_each_action(act[v], [&](ActionId a) {
        if (covered[v]) return;
        for (StateId t : ts.row(v, a).targets) {
          if (covered[t]) {
            choice[v] = static_cast<int>(a);
            covered[v] = 1;
            progress = true;
            return;
          }
        }
      });
    }
  }
}

EndComponent make_component(const std::vector<StateId>& w, const std::vector<Mask>& act,
                            const std::vector<int>& choice, bool sc) {
  EndComponent ec;
  ec.states = w;
  ec.policy_strongly_connected = sc;
  for (StateId v : w) {
    std::vector<ActionId> acts;
    for_each_action(act[v], [&](ActionId a) { acts.push_back(a); });
    ec.actions.push_back(std::move(acts));
    ec.policy.push_back(static_cast<ActionId>(choice[v]));
  }
  return ec;
}

struct Decomposition {
  std::vector<std::vector<StateId>> components;
  std::vector<Mask> act;
};

Decomposition decompose(const TransitionSystem& ts, StateSet alive) {
  const std::size_t n = ts.num_states();
  Decomposition d;
  d.act.assign(n, 0);
  for (StateId v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    for (ActionId a = 0; a < ts.num_actions(); ++a) {
      if (ts.enabled(v, a)) d.act[v] |= bit(a);
    }
  }
  detail::SccResult scc;
  while (true) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (StateId v = 0; v < n; ++v) {
        if (!alive[v]) continue;
        for_each_action(d.act[v], [&](ActionId a) {
          for (StateId t : ts.row(v, a).targets) {
            if (!alive[t]) {
              d.act[v] &= ~bit(a);
              break;
            }
          }
        });
        if (d.act[v] == 0) {
          alive[v] = 0;
          changed = true;
        }
      }
    }
    scc = detail::tarjan_scc(adjacency(ts, d.act, alive), alive);
    bool dropped = false;
    for (StateId v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      for_each_action(d.act[v], [&](ActionId a) {
        for (StateId t : ts.row(v, a).targets) {
          if (scc.component[t] != scc.component[v]) {
            d.act[v] &= ~bit(a);
            dropped = true;
            break;
          }
        }
      });
    }
    if (!dropped) break;
  }
  std::map<int, std::vector<StateId>> groups;
  for (StateId v = 0; v < n; ++v) {
    if (alive[v] && d.act[v] != 0) groups[scc.component[v]].push_back(v);
  }
  for (auto& [id, states] : groups) d.components.push_back(std::move(states));
  std::sort(d.components.begin(), d.components.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return d;
}

EndComponent finish_mec(const TransitionSystem& ts, const std::vector<StateId>& w,
                        const std::vector<Mask>& act) {
  StateSet in_w(ts.num_states(), 0);
  for (StateId v : w) in_w[v] = 1;
  std::vector<Mask> cur = act;
  std::vector<int> choice(ts.num_states(), -1);
  if (greedy_strongly_connected(ts, w, in_w, cur)) {
    for (StateId v : w) choice[v] = static_cast<int>(lowest(cur[v]));
    return make_component(w, act, choice, true);
  }
  // No single memoryless choice keeps W strongly connected: funnel everything
  // into the smallest state instead, which leaves one recurrent class.
  StateSet covered(ts.num_states(), 0);
  covered[w.front()] = 1;
  choice[w.front()] = static_cast<int>(lowest(act[w.front()]));
  attract(ts, w, act, choice, covered);
  return make_component(w, act, choice, false);
}

/// Search for a memoryless choice under which `start` and some target state
/// are mutually reachable inside one maximal end component.
class WitnessSearch {
 public:
  WitnessSearch(const TransitionSystem& ts, const std::vector<Mask>& act, const StateSet& target,
                std::uint64_t budget)
      : ts_(ts), act_(act), target_(target), budget_(budget) {}

  /// On success `choice` holds the actions of a closed walk through `start`
  /// that visits a target state.
  bool find(StateId start, std::vector<int>& choice) {
    choice_ = &choice;
    start_ = start;
    remaining_ = budget_;
    exhausted_ = false;
    return forward(start, target_[start] != 0);
  }
  bool exhausted() const { return exhausted_; }

 private:
  /// Extends a simple path ending in u; `hit` records a target on the path.
  bool forward(StateId u, bool hit) {
    if (remaining_ == 0) {
      exhausted_ = true;
      return false;
    }
    --remaining_;
    std::vector<int>& choice = *choice_;
    bool done = false;
    for_each_action(act_[u], [&](ActionId a) {
      if (done || exhausted_) return;
      choice[u] = static_cast<int>(a);
      for (StateId t : ts_.row(u, a).targets) {
        if (t == start_) {
          if (hit) {
            done = true;
            return;
          }
          continue;
        }
        if (choice[t] != -1) continue;
        if (hit || target_[t]) {
          // Any way back now closes an accepting walk; if none exists no
          // extension through t can return either.
          if (back_to(t, start_)) {
            done = true;
            return;
          }
          continue;
        }
        if (forward(t, false)) {
          done = true;
          return;
        }
        if (exhausted_) return;
      }
    });
    if (!done) choice[u] = -1;
    return done;
  }

  /// BFS from `from` to `to` where assigned states keep their action. Extends
  /// the assignment along the path found.
  bool back_to(StateId from, StateId to) {
    std::vector<int>& choice = *choice_;
    if (from == to) return true;
    const std::size_t n = ts_.num_states();
    std::vector<std::pair<StateId, int>> parent(n, {0, -2});
    std::vector<StateId> queue{from};
    parent[from] = {from, -1};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const StateId x = queue[head];
      const Mask options = choice[x] != -1 ? bit(static_cast<ActionId>(choice[x])) : act_[x];
      bool reached = false;
      for_each_action(options, [&](ActionId a) {
        if (reached) return;
        for (StateId t : ts_.row(x, a).targets) {
          if (parent[t].second != -2) continue;
          parent[t] = {x, static_cast<int>(a)};
          if (t == to) {
            reached = true;
            return;
          }
          queue.push_back(t);
        }
      });
      if (reached) {
        for (StateId y = to; y != from;) {
          const auto [prev, a] = parent[y];
          if (choice[prev] == -1) choice[prev] = a;
          y = prev;
        }
        return true;
      }
    }
    return false;
  }

  const TransitionSystem& ts_;
  const std::vector<Mask>& act_;
  const StateSet& target_;
  std::uint64_t budget_;
  std::uint64_t remaining_ = 0;
  StateId start_ = 0;
  bool exhausted_ = false;
  std::vector<int>* choice_ = nullptr;
};

void refine_accepting(const TransitionSystem& ts, const std::vector<StateId>& mec,
                      const std::vector<Mask>& act, const StateSet& k, std::size_t pair,
                      const AecOptions& options, AcceptingSummary& out) {
  const std::size_t n = ts.num_states();
  StateSet in_w(n, 0);
  for (StateId v : mec) in_w[v] = 1;
  std::vector<Mask> cur = act;
  std::vector<int> choice(n, -1);
  if (greedy_strongly_connected(ts, mec, in_w, cur)) {
    for (StateId v : mec) choice[v] = static_cast<int>(lowest(cur[v]));
    out.aecs.push_back(make_component(mec, act, choice, true));
    out.witness_pair.push_back(pair);
    for (StateId v : mec) out.accepting_states[v] = 1;
    return;
  }

  StateSet target(n, 0);
  for (StateId v : mec) target[v] = k[v];
  WitnessSearch search(ts, act, target, options.search_budget);
  StateSet covered(n, 0);
  for (StateId w : mec) {
    if (covered[w]) continue;
    std::vector<int> walk(n, -1);
    if (!search.find(w, walk)) {
      if (!search.exhausted()) continue;
      // Out of budget: take the whole component, funnelled into a target state.
      out.exhaustive = false;
      std::vector<int> fallback(n, -1);
      StateSet seed(n, 0);
      const StateId anchor = *std::find_if(mec.begin(), mec.end(), [&](StateId v) { return target[v]; });
      seed[anchor] = 1;
      fallback[anchor] = static_cast<int>(lowest(act[anchor]));
      attract(ts, mec, act, fallback, seed);
      out.aecs.push_back(make_component(mec, act, fallback, false));
      out.witness_pair.push_back(pair);
      for (StateId v : mec) out.accepting_states[v] = 1;
      return;
    }
    StateSet seed(n, 0);
    for (StateId v : mec) seed[v] = walk[v] != -1;
    attract(ts, mec, act, walk, seed);
    // The walk's states now form the unique bottom SCC of the induced graph.
    std::vector<Mask> single(n, 0);
    for (StateId v : mec) single[v] = bit(static_cast<ActionId>(walk[v]));
    const detail::SccResult scc = detail::tarjan_scc(adjacency(ts, single, in_w), in_w);
    std::vector<StateId> bottom;
    for (StateId v : mec) {
      if (scc.component[v] == scc.component[w]) bottom.push_back(v);
    }
    EndComponent ec = make_component(bottom, act, walk, true);
    // Stay-inside actions relative to the sub-component.
    for (std::size_t i = 0; i < bottom.size(); ++i) {
      std::vector<ActionId> inside;
      for (ActionId a : ec.actions[i]) {
        bool stays = true;
        for (StateId t : ts.row(bottom[i], a).targets) stays &= scc.component[t] == scc.component[w];
        if (stays) inside.push_back(a);
      }
      ec.actions[i] = std::move(inside);
    }
    for (StateId v : bottom) {
      covered[v] = 1;
      out.accepting_states[v] = 1;
    }
    out.aecs.push_back(std::move(ec));
    out.witness_pair.push_back(pair);
  }
}

}  // namespace

bool EndComponent::contains(StateId v) const {
  return std::binary_search(states.begin(), states.end(), v);
}

std::vector<EndComponent> max_end_components(const TransitionSystem& system,
                                             const StateSet& allowed) {
  StateSet alive = allowed.empty() ? StateSet(system.num_states(), 1) : allowed;
  const Decomposition d = decompose(system, std::move(alive));
  std::vector<EndComponent> out;
  for (const auto& w : d.components) out.push_back(finish_mec(system, w, d.act));
  return out;
}

std::vector<EndComponent> max_end_components(const ProductMdp& p) {
  return max_end_components(p.system());
}

AcceptingSummary accepting_end_components(const TransitionSystem& system,
                                          const std::vector<RabinPair>& pairs,
                                          const AecOptions& options) {
  AcceptingSummary out;
  out.accepting_states.assign(system.num_states(), 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    StateSet allowed(system.num_states(), 0);
    for (StateId v = 0; v < system.num_states(); ++v) allowed[v] = !pairs[i].finite[v];
    const Decomposition d = decompose(system, std::move(allowed));
    for (const auto& w : d.components) {
      const bool meets_k =
          std::any_of(w.begin(), w.end(), [&](StateId v) { return pairs[i].infinite[v] != 0; });
      if (meets_k) refine_accepting(system, w, d.act, pairs[i].infinite, i, options, out);
    }
  }
  return out;
}

AcceptingSummary accepting_end_components(const ProductMdp& p, const AecOptions& options) {
  return accepting_end_components(p.system(), p.pairs(), options);
}

std::vector<std::pair<StateId, ActionId>> in_component_policy(const EndComponent& ec) {
  std::vector<std::pair<StateId, ActionId>> out;
  out.reserve(ec.states.size());
  for (std::size_t i = 0; i < ec.states.size(); ++i) out.emplace_back(ec.states[i], ec.policy[i]);
  return out;
}

void apply_component_policies(const AcceptingSummary& summary, MemorylessPolicy& policy) {
  StateSet done(policy.size(), 0);
  for (const EndComponent& ec : summary.aecs) {
    for (const auto& [v, a] : in_component_policy(ec)) {
      if (done[v]) continue;
      policy.choice[v] = a;
      done[v] = 1;
    }
  }
}

}  // namespace pacsyn
