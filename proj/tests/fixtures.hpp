#pragma once

#include <string>

#include "pacsyn/io.hpp"
#include "pacsyn/labeled_mdp.hpp"
#include "pacsyn/rabin.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(PACSYN_DATA_DIR) + "/" + name; }

inline pacsyn::LabeledMdp running_example() { return pacsyn::load_mdp(data_path("running_example.mdp.json")); }

inline pacsyn::RabinAutomaton dra(const std::string& name) {
  return pacsyn::parse_dra(pacsyn::read_file(data_path(name)));
}

/// Table I: optimal values and actions for q0..q7 (0 = alpha, 1 = beta).
inline constexpr double kTableValues[8] = {0.22445, 0.22, 0.0, 1.0, 0.335, 0.335, 0.335, 0.5};
inline constexpr unsigned kTableActions[8] = {1, 0, 0, 0, 0, 1, 0, 0};

}  // namespace fixtures
