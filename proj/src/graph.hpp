#pragma once

// Internal graph utilities: iterative Tarjan SCC over an explicit adjacency list.

#include <algorithm>
#include <vector>

#include "pacsyn/types.hpp"

namespace pacsyn::detail {

using Adjacency = std::vector<std::vector<StateId>>;

struct SccResult {
  std::vector<int> component;  // -1 for inactive nodes
  int count = 0;
};

/// Components are numbered in reverse topological order (sinks first), as Tarjan emits them.
inline SccResult tarjan_scc(const Adjacency& adj, const StateSet& active) {
  const std::size_t n = adj.size();
  SccResult out;
  out.component.assign(n, -1);
  std::vector<int> index(n, -1);
  std::vector<int> low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<StateId> stack;
  struct Frame {
    StateId v;
    std::size_t next;
  };
  std::vector<Frame> call;
  int counter = 0;
  for (StateId root = 0; root < n; ++root) {
    if (!active[root] || index[root] != -1) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& fr = call.back();
      const StateId v = fr.v;
      if (fr.next < adj[v].size()) {
        const StateId w = adj[v][fr.next++];
        if (!active[w]) continue;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        StateId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          out.component[w] = out.count;
        } while (w != v);
        ++out.count;
      }
      call.pop_back();
      if (!call.empty()) {
        const StateId parent = call.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return out;
}

/// True iff every active node reaches and is reached from the first active node.
inline bool strongly_connected(const Adjacency& adj, const StateSet& active) {
  const std::size_t n = adj.size();
  StateId root = 0;
  while (root < n && !active[root]) ++root;
  if (root == n) return false;
  Adjacency radj(n);
  for (StateId v = 0; v < n; ++v) {
    if (!active[v]) continue;
    for (StateId w : adj[v]) {
      if (active[w]) radj[w].push_back(v);
    }
  }
  const Adjacency* graphs[] = {&adj, &radj};
  for (const Adjacency* g : graphs) {
    StateSet seen(n, 0);
    std::vector<StateId> stack{root};
    seen[root] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const StateId v = stack.back();
      stack.pop_back();
      for (StateId w : (*g)[v]) {
        if (active[w] && !seen[w]) {
          seen[w] = 1;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    if (reached != count(active)) return false;
  }
  return true;
}

}  // namespace pacsyn::detail
