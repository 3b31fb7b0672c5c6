#include "pacsyn/gridworld.hpp"

#include <cmath>
#include <random>

#include "json_support.hpp"

namespace pacsyn {

using nlohmann::json;

namespace {

constexpr std::uint32_t kDenominator = 2000;
const std::array<std::string, 4> kRegionNames{"R1", "R2", "R3", "R4"};

Cell parse_cell(const json& j, const GridworldSpec& spec) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
    throw ParseError("cell must be [column, row]");
  }
  const Cell c{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
  if (c.first >= spec.width || c.second >= spec.height) {
    throw ParseError("cell " + cell_name(c) + " lies outside the grid");
  }
  return c;
}

bool is_wall(const GridworldSpec& spec, long col, long row) {
  if (col < 0 || row < 0 || col >= static_cast<long>(spec.width) ||
      row >= static_cast<long>(spec.height)) {
    return true;
  }
  return spec.grid[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] == '#';
}

}  // namespace

std::string cell_name(Cell c) {
  return "x" + std::to_string(c.first) + "y" + std::to_string(c.second);
}

GridworldSpec parse_gridworld_spec(std::string_view text) {
  const json doc = detail::parse_json(text);
  if (!doc.is_object()) throw ParseError("gridworld spec must be a JSON object");
  GridworldSpec spec;
  if (!doc.contains("grid") || !doc.at("grid").is_array() || doc.at("grid").empty()) {
    throw ParseError("field 'grid' must be a non-empty array of rows");
  }
  for (const json& row : doc.at("grid")) {
    if (!row.is_string()) throw ParseError("grid rows must be strings");
    spec.grid.push_back(row.get<std::string>());
  }
  spec.height = spec.grid.size();
  spec.width = spec.grid.front().size();
  for (const std::string& row : spec.grid) {
    if (row.size() != spec.width || row.empty()) throw ParseError("grid rows must have equal, non-zero length");
    for (char c : row) {
      if (c != '#' && kTerrainLetters.find(c) == std::string_view::npos) {
        throw ParseError(std::string("unknown terrain '") + c + "'");
      }
    }
  }
  if (doc.contains("regions")) {
    for (const auto& [name, cells] : doc.at("regions").items()) {
      if (std::find(kRegionNames.begin(), kRegionNames.end(), name) == kRegionNames.end()) {
        throw ParseError("unknown region '" + name + "'");
      }
      if (!cells.is_array()) throw ParseError("region '" + name + "' must be an array of cells");
      for (const json& c : cells) spec.regions[name].push_back(parse_cell(c, spec));
    }
  }
  if (doc.contains("success")) {
    for (const auto& [name, p] : doc.at("success").items()) {
      if (name.size() != 1 || kTerrainLetters.find(name[0]) == std::string_view::npos) {
        throw ParseError("unknown terrain '" + name + "' in 'success'");
      }
      if (!p.is_number()) throw ParseError("success probability must be a number");
      const double permille = p.get<double>() * 1000.0;
      if (std::abs(permille - std::round(permille)) > 1e-9 || permille < 0 || permille > 1000) {
        throw ParseError("success probability must be a multiple of 0.001 in [0, 1]");
      }
      spec.fixed_success[name[0]] = static_cast<unsigned>(std::lround(permille));
    }
  }
  if (doc.contains("initial")) spec.initial = parse_cell(doc.at("initial"), spec);
  if (doc.contains("probes")) {
    for (const json& c : doc.at("probes")) spec.probes.push_back(parse_cell(c, spec));
  }
  return spec;
}

Gridworld build_gridworld(const GridworldSpec& spec, std::uint64_t seed) {
  auto wall = [&](Cell c) { return is_wall(spec, static_cast<long>(c.first), static_cast<long>(c.second)); };
  for (const auto& [name, cells] : spec.regions) {
    for (Cell c : cells) {
      if (wall(c)) throw DomainError("region " + name + " contains wall cell " + cell_name(c));
    }
  }
  if (wall(spec.initial)) throw DomainError("initial cell is a wall");
  for (Cell c : spec.probes) {
    if (wall(c)) throw DomainError("probe cell " + cell_name(c) + " is a wall");
  }

  Gridworld out;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < kTerrainLetters.size(); ++i) {
    const auto fixed = spec.fixed_success.find(kTerrainLetters[i]);
    if (fixed != spec.fixed_success.end()) {
      out.success[i] = fixed->second;
      continue;
    }
    const auto [lo, hi] = kTerrainRange[i];
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    out.success[i] = lo + static_cast<unsigned>(u * (hi - lo + 1));
  }

  std::vector<std::string> names;
  std::vector<std::vector<std::int64_t>> index(spec.height, std::vector<std::int64_t>(spec.width, -1));
  for (std::size_t r = 0; r < spec.height; ++r) {
    for (std::size_t c = 0; c < spec.width; ++c) {
      if (spec.grid[r][c] == '#') continue;
      index[r][c] = static_cast<std::int64_t>(names.size());
      names.push_back(cell_name({c, r}));
    }
  }

  // Direction offsets (dc, dr) with the two diagonal slips for each action.
  struct Move {
    long dc, dr;
  };
  const std::array<std::array<Move, 3>, 4> moves{{
      {{{0, -1}, {1, -1}, {-1, -1}}},  // N
      {{{0, 1}, {1, 1}, {-1, 1}}},     // S
      {{{1, 0}, {1, -1}, {1, 1}}},     // E
      {{{-1, 0}, {-1, -1}, {-1, 1}}},  // W
  }};

  TransitionSystem::Builder b(names.size(), 4);
  std::vector<Letter> labels(names.size(), 0);
  for (std::size_t r = 0; r < spec.height; ++r) {
    for (std::size_t c = 0; c < spec.width; ++c) {
      if (index[r][c] < 0) continue;
      const auto from = static_cast<StateId>(index[r][c]);
      const std::size_t terrain = kTerrainLetters.find(spec.grid[r][c]);
      const std::uint32_t success = 2 * out.success[terrain];
      const std::uint32_t slip = 1000 - out.success[terrain];
      for (ActionId a = 0; a < 4; ++a) {
        std::map<StateId, std::uint32_t> mass;
        for (std::size_t k = 0; k < 3; ++k) {
          const long nc = static_cast<long>(c) + moves[a][k].dc;
          const long nr = static_cast<long>(r) + moves[a][k].dr;
          const StateId to = is_wall(spec, nc, nr)
                                 ? from
                                 : static_cast<StateId>(index[static_cast<std::size_t>(nr)][static_cast<std::size_t>(nc)]);
          mass[to] += k == 0 ? success : slip;
        }
        for (const auto& [to, n] : mass) {
          if (n != 0) b.add(from, a, to, static_cast<double>(n) / kDenominator);
        }
      }
    }
  }
  for (std::size_t i = 0; i < kRegionNames.size(); ++i) {
    const auto it = spec.regions.find(kRegionNames[i]);
    if (it == spec.regions.end()) continue;
    for (Cell cell : it->second) {
      labels[static_cast<std::size_t>(index[cell.second][cell.first])] |= Letter{1} << i;
    }
  }
  const auto initial = static_cast<StateId>(index[spec.initial.second][spec.initial.first]);
  out.mdp = LabeledMdp(names, {"N", "S", "E", "W"}, initial,
                       std::vector<std::string>(kRegionNames.begin(), kRegionNames.end()), labels,
                       std::move(b).build());
  for (Cell c : spec.probes) out.probe_states.push_back(cell_name(c));
  return out;
}

}  // namespace pacsyn
