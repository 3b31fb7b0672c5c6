#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pacsyn/labeled_mdp.hpp"

namespace pacsyn {

/// Terrain letters in the grid: P pavement, G grass, V gravel, S sand; '#' is a wall.
inline constexpr std::string_view kTerrainLetters = "PGVS";

/// Success probability ranges per terrain, in thousandths.
inline constexpr std::array<std::pair<unsigned, unsigned>, 4> kTerrainRange{
    {{900, 950}, {850, 900}, {800, 850}, {750, 800}}};

using Cell = std::pair<std::size_t, std::size_t>;  // (column, row), row 0 at the top

struct GridworldSpec {
  std::size_t width = 0;
  std::size_t height = 0;
  /// `height` strings of `width` terrain letters.
  std::vector<std::string> grid;
  /// Region name (R1..R4) to cells.
  std::map<std::string, std::vector<Cell>> regions;
  /// Success probability in thousandths, per terrain letter; drawn if absent.
  std::map<char, unsigned> fixed_success;
  Cell initial{0, 0};
  std::vector<Cell> probes;
};

/// JSON: {"grid": [...], "regions": {"R1": [[c, r], ...]}, "initial": [c, r],
/// "probes": [[c, r], ...], "success": {"P": 0.92, ...}}. Throws ParseError.
GridworldSpec parse_gridworld_spec(std::string_view text);

struct Gridworld {
  LabeledMdp mdp;
  /// Success probability per terrain (P, G, V, S) in thousandths.
  std::array<unsigned, 4> success{};
  std::vector<std::string> probe_states;
};

std::string cell_name(Cell c);

/// Actions N, S, E, W. The intended cell gets the terrain's success
/// probability; the two diagonal neighbours on the intended side share the
/// rest equally. Moves into walls or off the grid stay put.
Gridworld build_gridworld(const GridworldSpec& spec, std::uint64_t seed);

}  // namespace pacsyn
