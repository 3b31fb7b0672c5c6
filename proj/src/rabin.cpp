#include "pacsyn/rabin.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "json.hpp"
#include "json_support.hpp"

namespace pacsyn {

using nlohmann::json;

RabinAutomaton::RabinAutomaton(std::vector<std::string> states, StateId initial,
                               std::vector<std::string> propositions, std::vector<StateId> delta,
                               std::vector<RabinPair> pairs)
    : states_(std::move(states)),
      initial_(initial),
      propositions_(std::move(propositions)),
      delta_(std::move(delta)),
      pairs_(std::move(pairs)) {
  if (states_.empty()) throw ParseError("automaton has no states");
  if (initial_ >= states_.size()) throw ParseError("initial state out of range");
  if (propositions_.size() > kMaxPropositions) {
    throw ParseError("at most " + std::to_string(kMaxPropositions) + " propositions are supported");
  }
  if (delta_.size() != states_.size() * num_letters()) {
    throw ParseError("transition table has wrong size");
  }
  for (StateId t : delta_) {
    if (t >= states_.size()) throw ParseError("transition target out of range");
  }
  if (pairs_.empty()) throw ParseError("automaton has no acceptance pairs");
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const RabinPair& p = pairs_[i];
    if (p.finite.size() != states_.size() || p.infinite.size() != states_.size()) {
      throw ParseError("acceptance pair " + std::to_string(i) + " has wrong dimension");
    }
    if (count(p.infinite) == 0) {
      throw ParseError("acceptance pair " + std::to_string(i) + " has empty K and can never accept");
    }
  }
}

std::optional<StateId> RabinAutomaton::find_state(std::string_view name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  if (it == states_.end()) return std::nullopt;
  return static_cast<StateId>(it - states_.begin());
}

std::optional<std::size_t> RabinAutomaton::proposition_index(std::string_view name) const {
  auto it = std::find(propositions_.begin(), propositions_.end(), name);
  if (it == propositions_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - propositions_.begin());
}

StateId RabinAutomaton::step(StateId s, Letter letter) const {
  if (s >= states_.size()) throw DomainError("unknown automaton state " + std::to_string(s));
  if (letter >= num_letters()) throw DomainError("letter uses undeclared propositions");
  return delta_[static_cast<std::size_t>(s) * num_letters() + letter];
}

std::vector<StateId> run(const RabinAutomaton& a, std::span<const Letter> word) {
  std::vector<StateId> out;
  out.reserve(word.size() + 1);
  out.push_back(a.initial());
  for (Letter l : word) out.push_back(a.step(out.back(), l));
  return out;
}

StateSet recurring_states(const RabinAutomaton& a, const LassoWord& w) {
  if (w.cycle.empty()) throw DomainError("lasso cycle must be non-empty");
  StateId s = a.initial();
  for (Letter l : w.prefix) s = a.step(s, l);
  // Deterministic run over (state, cycle position) pairs: the first repeated
  // pair closes the loop, and everything visited since then recurs forever.
  const std::size_t period = w.cycle.size();
  std::vector<std::size_t> first_seen(a.num_states() * period, SIZE_MAX);
  std::vector<StateId> trace;
  std::size_t pos = 0;
  while (first_seen[s * period + pos] == SIZE_MAX) {
    first_seen[s * period + pos] = trace.size();
    trace.push_back(s);
    s = a.step(s, w.cycle[pos]);
    pos = (pos + 1) % period;
  }
  StateSet inf(a.num_states(), 0);
  for (std::size_t i = first_seen[s * period + pos]; i < trace.size(); ++i) inf[trace[i]] = 1;
  return inf;
}

bool accepts(const RabinAutomaton& a, const LassoWord& w) {
  const StateSet inf = recurring_states(a, w);
  for (const RabinPair& p : a.pairs()) {
    bool hits_j = false;
    bool hits_k = false;
    for (StateId s = 0; s < a.num_states(); ++s) {
      if (!inf[s]) continue;
      hits_j |= p.finite[s] != 0;
      hits_k |= p.infinite[s] != 0;
    }
    if (!hits_j && hits_k) return true;
  }
  return false;
}

Letter make_letter(const RabinAutomaton& a, std::span<const std::string> props) {
  Letter l = 0;
  for (const std::string& p : props) {
    auto idx = a.proposition_index(p);
    if (!idx) throw ParseError("unknown proposition '" + p + "'");
    l |= Letter{1} << *idx;
  }
  return l;
}

namespace {

std::vector<std::string> string_array(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const json& e : j) {
    if (!e.is_string()) throw ParseError(std::string(what) + " must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

RabinAutomaton parse_dra(std::string_view text) {
  const json doc = detail::parse_json(text);
  if (!doc.is_object()) throw ParseError("automaton document must be a JSON object");
  for (const char* key : {"states", "initial", "ap", "trans", "pairs"}) {
    if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  }
  const std::vector<std::string> states = string_array(doc["states"], "states");
  std::unordered_map<std::string, StateId> index;
  for (StateId s = 0; s < states.size(); ++s) {
    if (!index.emplace(states[s], s).second) throw ParseError("duplicate state '" + states[s] + "'");
  }
  auto lookup = [&](const json& j) -> StateId {
    if (!j.is_string()) throw ParseError("state reference must be a string");
    auto it = index.find(j.get<std::string>());
    if (it == index.end()) throw ParseError("unknown state '" + j.get<std::string>() + "'");
    return it->second;
  };
  const std::vector<std::string> ap = string_array(doc["ap"], "ap");
  if (ap.size() > kMaxPropositions) {
    throw ParseError("at most " + std::to_string(kMaxPropositions) + " propositions are supported");
  }
  for (std::size_t i = 0; i < ap.size(); ++i) {
    if (std::find(ap.begin(), ap.begin() + static_cast<std::ptrdiff_t>(i), ap[i]) !=
        ap.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw ParseError("duplicate proposition '" + ap[i] + "'");
    }
  }
  const StateId initial = lookup(doc["initial"]);
  const std::size_t letters = std::size_t{1} << ap.size();

  constexpr StateId kUnset = UINT32_MAX;
  std::vector<StateId> explicit_target(states.size() * letters, kUnset);
  std::vector<StateId> fallback(states.size(), kUnset);
  if (!doc["trans"].is_array()) throw ParseError("trans must be an array");
  for (const json& t : doc["trans"]) {
    if (!t.is_object() || !t.contains("from") || !t.contains("guard") || !t.contains("to")) {
      throw ParseError("each transition needs from, guard and to");
    }
    const StateId from = lookup(t["from"]);
    const StateId to = lookup(t["to"]);
    const json& guard = t["guard"];
    if (guard.is_string() && guard.get<std::string>() == "*") {
      if (fallback[from] != kUnset) {
        throw ParseError("state '" + states[from] + "' has two '*' transitions");
      }
      fallback[from] = to;
      continue;
    }
    Letter letter = 0;
    for (const std::string& p : string_array(guard, "guard")) {
      auto it = std::find(ap.begin(), ap.end(), p);
      if (it == ap.end()) throw ParseError("unknown proposition '" + p + "'");
      letter |= Letter{1} << (it - ap.begin());
    }
    StateId& slot = explicit_target[from * letters + letter];
    if (slot != kUnset) {
      throw ParseError("state '" + states[from] + "' has two transitions for the same letter");
    }
    slot = to;
  }

  std::vector<StateId> delta(states.size() * letters);
  std::vector<std::pair<std::string, Letter>> missing;
  for (StateId s = 0; s < states.size(); ++s) {
    for (Letter l = 0; l < letters; ++l) {
      StateId t = explicit_target[s * letters + l];
      if (t == kUnset) t = fallback[s];
      if (t == kUnset) missing.emplace_back(states[s], l);
      delta[s * letters + l] = t;
    }
  }
  if (!missing.empty()) {
    std::string msg = "incomplete transition function; missing:";
    for (std::size_t i = 0; i < missing.size() && i < 16; ++i) {
      msg += " (" + missing[i].first + ", {";
      bool first = true;
      for (std::size_t p = 0; p < ap.size(); ++p) {
        if (missing[i].second & (Letter{1} << p)) {
          msg += (first ? "" : ",") + ap[p];
          first = false;
        }
      }
      msg += "})";
    }
    if (missing.size() > 16) msg += " ... (" + std::to_string(missing.size()) + " total)";
    throw CompletenessError(msg, std::move(missing));
  }

  if (!doc["pairs"].is_array()) throw ParseError("pairs must be an array");
  std::vector<RabinPair> pairs;
  for (const json& p : doc["pairs"]) {
    if (!p.is_object() || !p.contains("J") || !p.contains("K")) {
      throw ParseError("each pair needs J and K");
    }
    RabinPair pair{StateSet(states.size(), 0), StateSet(states.size(), 0)};
    for (const json& s : p["J"]) pair.finite[lookup(s)] = 1;
    for (const json& s : p["K"]) pair.infinite[lookup(s)] = 1;
    pairs.push_back(std::move(pair));
  }
  return RabinAutomaton(states, initial, ap, std::move(delta), std::move(pairs));
}

std::string serialize_dra(const RabinAutomaton& a) {
  std::vector<StateId> order(a.num_states());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](StateId x, StateId y) { return a.state_name(x) < a.state_name(y); });

  auto letter_json = [&](Letter l) {
    json arr = json::array();
    for (std::size_t p = 0; p < a.propositions().size(); ++p) {
      if (l & (Letter{1} << p)) arr.push_back(a.propositions()[p]);
    }
    return arr;
  };
  auto names_of = [&](const StateSet& set) {
    json arr = json::array();
    for (StateId s : order) {
      if (set[s]) arr.push_back(a.state_name(s));
    }
    return arr;
  };

  json doc;
  doc["ap"] = a.propositions();
  doc["initial"] = a.state_name(a.initial());
  json states = json::array();
  for (StateId s : order) states.push_back(a.state_name(s));
  doc["states"] = std::move(states);

  json trans = json::array();
  for (StateId s : order) {
    std::map<StateId, std::size_t> freq;
    for (Letter l = 0; l < a.num_letters(); ++l) ++freq[a.step(s, l)];
    StateId fallback = freq.begin()->first;
    for (const auto& [t, n] : freq) {
      const std::size_t best = freq[fallback];
      if (n > best || (n == best && a.state_name(t) < a.state_name(fallback))) fallback = t;
    }
    for (Letter l = 0; l < a.num_letters(); ++l) {
      const StateId t = a.step(s, l);
      if (t == fallback) continue;
      trans.push_back({{"from", a.state_name(s)}, {"guard", letter_json(l)}, {"to", a.state_name(t)}});
    }
    trans.push_back({{"from", a.state_name(s)}, {"guard", "*"}, {"to", a.state_name(fallback)}});
  }
  doc["trans"] = std::move(trans);

  json pairs = json::array();
  for (const RabinPair& p : a.pairs()) pairs.push_back({{"J", names_of(p.finite)}, {"K", names_of(p.infinite)}});
  doc["pairs"] = std::move(pairs);
  return doc.dump(2) + "\n";
}

}  // namespace pacsyn
