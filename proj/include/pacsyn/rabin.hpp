#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pacsyn/types.hpp"

namespace pacsyn {

/// Acceptance pair: a run accepts if it visits J finitely often and K infinitely often.
struct RabinPair {
  StateSet finite;    // J
  StateSet infinite;  // K
};

/// Deterministic Rabin automaton over the alphabet 2^AP with a total transition table.
class RabinAutomaton {
 public:
  RabinAutomaton() = default;
  /// `delta` is row-major: delta[s * 2^|AP| + letter]. Throws on an
  /// incomplete table, out-of-range targets, or a pair with empty K.
  RabinAutomaton(std::vector<std::string> states, StateId initial,
                 std::vector<std::string> propositions, std::vector<StateId> delta,
                 std::vector<RabinPair> pairs);

  std::size_t num_states() const { return states_.size(); }
  std::size_t num_letters() const { return std::size_t{1} << propositions_.size(); }
  StateId initial() const { return initial_; }
  const std::vector<std::string>& state_names() const { return states_; }
  const std::string& state_name(StateId s) const { return states_.at(s); }
  std::optional<StateId> find_state(std::string_view name) const;
  const std::vector<std::string>& propositions() const { return propositions_; }
  std::optional<std::size_t> proposition_index(std::string_view name) const;
  const std::vector<RabinPair>& pairs() const { return pairs_; }

  StateId step(StateId s, Letter letter) const;

 private:
  std::vector<std::string> states_;
  StateId initial_ = 0;
  std::vector<std::string> propositions_;
  std::vector<StateId> delta_;
  std::vector<RabinPair> pairs_;
};

/// Missing (state, letter) entries in a transition table.
class CompletenessError : public ParseError {
 public:
  CompletenessError(const std::string& what, std::vector<std::pair<std::string, Letter>> missing)
      : ParseError(what), missing_(std::move(missing)) {}
  const std::vector<std::pair<std::string, Letter>>& missing() const { return missing_; }

 private:
  std::vector<std::pair<std::string, Letter>> missing_;
};

/// Finite presentation prefix . cycle^omega of an infinite word.
struct LassoWord {
  std::vector<Letter> prefix;
  std::vector<Letter> cycle;
};

/// s0 = initial, s_{k+1} = step(s_k, word[k]); returns |word| + 1 states.
std::vector<StateId> run(const RabinAutomaton& a, std::span<const Letter> word);

/// States visited infinitely often by the run on the lasso.
StateSet recurring_states(const RabinAutomaton& a, const LassoWord& w);

bool accepts(const RabinAutomaton& a, const LassoWord& w);

/// Parses the JSON automaton format (see README). Guards are exact letters
/// given as proposition arrays, or "*" for every letter not listed for that state.
RabinAutomaton parse_dra(std::string_view text);

/// Canonical JSON: sorted keys, states sorted by name, per-state default
/// target emitted as "*" and the remaining letters listed explicitly.
std::string serialize_dra(const RabinAutomaton& a);

/// Letter from proposition names; throws ParseError on an unknown name.
Letter make_letter(const RabinAutomaton& a, std::span<const std::string> props);

}  // namespace pacsyn
