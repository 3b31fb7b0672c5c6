#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pacsyn/labeled_mdp.hpp"
#include "pacsyn/product.hpp"
#include "pacsyn/values.hpp"

namespace pacsyn {

/// Reads the JSON MDP format. The result is not validated; see finalize().
LabeledMdp parse_mdp(std::string_view text);

/// Canonical JSON: sorted keys, states and actions in index order,
/// transitions ordered by (from, action, to), labels in proposition order.
std::string serialize_mdp(const LabeledMdp& m);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// parse_mdp + finalize.
LabeledMdp load_mdp(const std::string& path);

/// The MDP itself as a product whose single acceptance pair is
/// (empty, accepting). Product states keep the MDP state names.
ProductMdp mdp_as_product(const LabeledMdp& m, const StateSet& accepting);

/// Names of product states: "q|s", or the MDP name when there is no automaton.
std::vector<std::string> product_state_names(const ProductMdp& p, const LabeledMdp& m);

/// {"<product state>": "<action>"} with sorted keys.
std::string serialize_policy(const MemorylessPolicy& f, const std::vector<std::string>& state_names,
                             const std::vector<std::string>& action_names);
MemorylessPolicy parse_policy(std::string_view text, const std::vector<std::string>& state_names,
                              const std::vector<std::string>& action_names);

/// Columns state, t, value; one row per state and t = 0..horizon.
std::string value_table_csv(const ValueTable& table, const std::vector<std::string>& names);
/// Columns state, t, value with t = "inf".
std::string value_vector_csv(const std::vector<double>& values, const std::vector<std::string>& names);

}  // namespace pacsyn
