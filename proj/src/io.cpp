#include "pacsyn/io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json_support.hpp"

namespace pacsyn {

using nlohmann::json;

namespace {

std::vector<std::string> string_array(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const json& x : arr) {
    if (!x.is_string()) throw ParseError(std::string("field '") + key + "' must hold strings");
    if (!seen.insert(x.get<std::string>()).second) {
      throw ParseError(std::string("duplicate name '") + x.get<std::string>() + "' in '" + key + "'");
    }
    out.push_back(x.get<std::string>());
  }
  return out;
}

std::size_t lookup(const std::vector<std::string>& names, const std::string& name,
                   const char* what) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw ParseError(std::string("unknown ") + what + " '" + name + "'");
}

std::string text_field(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_string()) {
    throw ParseError(std::string("transition field '") + key + "' must be a string");
  }
  return obj.at(key).get<std::string>();
}

}  // namespace

LabeledMdp parse_mdp(std::string_view text) {
  const json doc = detail::parse_json(text);
  if (!doc.is_object()) throw ParseError("MDP file must be a JSON object");
  std::vector<std::string> states = string_array(doc, "states");
  std::vector<std::string> actions = string_array(doc, "actions");
  std::vector<std::string> props = doc.contains("ap") ? string_array(doc, "ap") : std::vector<std::string>{};
  if (states.empty()) throw ParseError("MDP has no states");
  if (actions.empty()) throw ParseError("MDP has no actions");
  if (actions.size() > kMaxActions) throw ParseError("too many actions");
  if (props.size() > kMaxPropositions) throw ParseError("too many propositions");
  if (!doc.contains("initial") || !doc.at("initial").is_string()) {
    throw ParseError("field 'initial' must be a state name");
  }
  const auto initial = static_cast<StateId>(lookup(states, doc.at("initial").get<std::string>(), "state"));

  std::vector<Letter> labels(states.size(), 0);
  if (doc.contains("label")) {
    const json& lab = doc.at("label");
    if (!lab.is_object()) throw ParseError("field 'label' must be an object");
    for (const auto& [name, set] : lab.items()) {
      const std::size_t q = lookup(states, name, "state");
      if (!set.is_array()) throw ParseError("label of '" + name + "' must be an array");
      for (const json& p : set) {
        if (!p.is_string()) throw ParseError("label of '" + name + "' must hold strings");
        labels[q] |= Letter{1} << lookup(props, p.get<std::string>(), "proposition");
      }
    }
  }

  if (!doc.contains("trans") || !doc.at("trans").is_array()) {
    throw ParseError("field 'trans' must be an array");
  }
  TransitionSystem::Builder b(states.size(), actions.size());
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  for (const json& t : doc.at("trans")) {
    if (!t.is_object()) throw ParseError("transition must be an object");
    const std::size_t from = lookup(states, text_field(t, "from"), "state");
    const std::size_t act = lookup(actions, text_field(t, "action"), "action");
    const std::size_t to = lookup(states, text_field(t, "to"), "state");
    if (!t.contains("p") || !t.at("p").is_number()) throw ParseError("transition field 'p' must be a number");
    if (!seen.emplace(from, act, to).second) {
      throw ParseError("duplicate transition " + states[from] + " --" + actions[act] + "--> " + states[to]);
    }
    b.add(static_cast<StateId>(from), static_cast<ActionId>(act), static_cast<StateId>(to),
          t.at("p").get<double>());
  }
  return LabeledMdp(std::move(states), std::move(actions), initial, std::move(props),
                    std::move(labels), std::move(b).build());
}

std::string serialize_mdp(const LabeledMdp& m) {
  json doc;
  doc["states"] = m.state_names();
  doc["actions"] = m.action_names();
  doc["initial"] = m.state_name(m.initial());
  doc["ap"] = m.propositions();
  json label = json::object();
  for (StateId q = 0; q < m.num_states(); ++q) {
    json set = json::array();
    for (std::size_t p = 0; p < m.propositions().size(); ++p) {
      if (m.label(q) & (Letter{1} << p)) set.push_back(m.propositions()[p]);
    }
    if (!set.empty()) label[m.state_name(q)] = std::move(set);
  }
  doc["label"] = std::move(label);
  json trans = json::array();
  for (StateId q = 0; q < m.num_states(); ++q) {
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      const RowView r = m.kernel().row(q, a);
      for (std::size_t i = 0; i < r.size(); ++i) {
        trans.push_back({{"from", m.state_name(q)},
                         {"action", m.action_name(a)},
                         {"to", m.state_name(r.targets[i])},
                         {"p", r.probs[i]}});
      }
    }
  }
  doc["trans"] = std::move(trans);
  return doc.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

LabeledMdp load_mdp(const std::string& path) {
  LabeledMdp m = parse_mdp(read_file(path));
  finalize(m);
  return m;
}

ProductMdp mdp_as_product(const LabeledMdp& m, const StateSet& accepting) {
  if (accepting.size() != m.num_states()) throw DomainError("accepting set does not match the MDP");
  RabinPair pair{StateSet(m.num_states(), 0), accepting};
  return ProductMdp(m.kernel(), {std::move(pair)}, m.initial(), m.num_states(), 1);
}

std::vector<std::string> product_state_names(const ProductMdp& p, const LabeledMdp& m) {
  std::vector<std::string> out;
  out.reserve(p.num_states());
  for (StateId v = 0; v < p.num_states(); ++v) {
    out.push_back(p.automaton() ? p.state_name(v) : m.state_name(p.mdp_state(v)));
  }
  return out;
}

std::string serialize_policy(const MemorylessPolicy& f, const std::vector<std::string>& state_names,
                             const std::vector<std::string>& action_names) {
  if (f.size() != state_names.size()) throw DomainError("policy does not match the state names");
  json doc = json::object();
  for (StateId v = 0; v < f.size(); ++v) doc[state_names[v]] = action_names.at(f(v));
  return doc.dump(2) + "\n";
}

MemorylessPolicy parse_policy(std::string_view text, const std::vector<std::string>& state_names,
                              const std::vector<std::string>& action_names) {
  const json doc = detail::parse_json(text);
  if (!doc.is_object()) throw ParseError("policy file must be a JSON object");
  MemorylessPolicy f{std::vector<ActionId>(state_names.size(), 0)};
  std::vector<char> seen(state_names.size(), 0);
  for (const auto& [name, action] : doc.items()) {
    const std::size_t v = lookup(state_names, name, "state");
    if (!action.is_string()) throw ParseError("action for '" + name + "' must be a string");
    f.choice[v] = static_cast<ActionId>(lookup(action_names, action.get<std::string>(), "action"));
    seen[v] = 1;
  }
  for (std::size_t v = 0; v < seen.size(); ++v) {
    if (!seen[v]) throw ParseError("policy has no action for state '" + state_names[v] + "'");
  }
  return f;
}

std::string value_table_csv(const ValueTable& table, const std::vector<std::string>& names) {
  std::string out = "state,t,value\n";
  for (StateId v = 0; v < table.num_states(); ++v) {
    for (std::size_t t = 0; t <= table.horizon(); ++t) {
      out += names.at(v) + "," + std::to_string(t) + "," + detail::format_double(table(v, t)) + "\n";
    }
  }
  return out;
}

std::string value_vector_csv(const std::vector<double>& values, const std::vector<std::string>& names) {
  std::string out = "state,t,value\n";
  for (std::size_t v = 0; v < values.size(); ++v) {
    out += names.at(v) + ",inf," + detail::format_double(values[v]) + "\n";
  }
  return out;
}

}  // namespace pacsyn
