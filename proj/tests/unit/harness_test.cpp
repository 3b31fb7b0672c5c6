#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "pacsyn/cli.hpp"
#include "pacsyn/evaluate.hpp"
#include "pacsyn/gridworld.hpp"
#include "pacsyn/io.hpp"

using namespace pacsyn;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pacsyn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pacsyn_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kOpen3x3 = R"({"grid": ["PPP", "PPP", "PPP"], "success": {"P": 0.9},
  "regions": {"R1": [[0, 0]]}, "initial": [1, 1]})";

}  // namespace

TEST_CASE("gridworld rows") {
  const Gridworld g = build_gridworld(parse_gridworld_spec(kOpen3x3), 1);
  const LabeledMdp& m = g.mdp;
  CHECK(m.num_states() == 9);
  CHECK(m.action_names() == std::vector<std::string>{"N", "S", "E", "W"});
  const StateId center = m.state_index("x1y1");
  CHECK(m.kernel().prob(center, 0, m.state_index("x1y0")) == 0.9);
  CHECK(m.kernel().prob(center, 0, m.state_index("x0y0")) == 0.05);
  CHECK(m.kernel().prob(center, 0, m.state_index("x2y0")) == 0.05);
  CHECK(m.kernel().prob(center, 2, m.state_index("x2y1")) == 0.9);
  CHECK(m.kernel().prob(center, 2, m.state_index("x2y0")) == 0.05);
  CHECK(m.kernel().prob(center, 2, m.state_index("x2y2")) == 0.05);
  CHECK(validate(m).ok());
  CHECK(m.label(m.state_index("x0y0")) == 1);
  CHECK(m.initial() == center);

  // North from the top row: the intended cell and both slips are off the grid.
  const StateId corner = m.state_index("x0y0");
  CHECK(m.kernel().prob(corner, 0, corner) == 1.0);
  CHECK(m.kernel().prob(corner, 0, m.state_index("x1y0")) == 0.0);
  // North from the bottom-left: the west slip bounces onto the cell itself.
  const StateId bl = m.state_index("x0y2");
  CHECK(m.kernel().prob(bl, 0, bl) == 0.05);
  CHECK(m.kernel().prob(bl, 0, m.state_index("x0y1")) == 0.9);
}

TEST_CASE("gridworld walls bounce and regions may not overlap them") {
  const Gridworld g = build_gridworld(parse_gridworld_spec(R"({"grid": ["P#P", "PPP"], "success": {"P": 0.92}})"), 3);
  const StateId a = g.mdp.state_index("x0y1");
  CHECK(g.mdp.kernel().prob(a, 0, a) == doctest::Approx(0.08));  // off-grid and wall slips
  CHECK(g.mdp.kernel().prob(a, 0, g.mdp.state_index("x0y0")) == doctest::Approx(0.92));
  CHECK_FALSE(g.mdp.find_state("x1y0").has_value());
  CHECK_THROWS_AS(build_gridworld(parse_gridworld_spec(R"({"grid": ["P#P"], "regions": {"R4": [[1, 0]]}})"), 1),
                  DomainError);
  CHECK_THROWS_AS(parse_gridworld_spec(R"({"grid": ["PX"]})"), ParseError);
  CHECK_THROWS_AS(parse_gridworld_spec(R"({"grid": ["PP"], "regions": {"R1": [[5, 0]]}})"), ParseError);
}

TEST_CASE("gridworld generation is seeded") {
  const GridworldSpec spec = parse_gridworld_spec(read_file(fixtures::data_path("gridworld_desk6.json")));
  const Gridworld a = build_gridworld(spec, 42), b = build_gridworld(spec, 42);
  CHECK(serialize_mdp(a.mdp) == serialize_mdp(b.mdp));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.success[i] >= kTerrainRange[i].first);
    CHECK(a.success[i] <= kTerrainRange[i].second);
  }
  bool differs = false;
  for (std::uint64_t s = 0; s < 10 && !differs; ++s) differs = build_gridworld(spec, s).success != a.success;
  CHECK(differs);
  CHECK(a.probe_states == std::vector<std::string>{"x0y5", "x5y5", "x0y0", "x5y3"});

  std::string grid = R"({"grid": [)";
  for (int r = 0; r < 10; ++r) grid += std::string(r ? "," : "") + "\"PPGGVVSSPG\"";
  grid += "]}";
  const Gridworld big = build_gridworld(parse_gridworld_spec(grid), 7);
  CHECK(big.mdp.num_states() == 100);
  CHECK(big.mdp.num_actions() == 4);
  CHECK(validate(big.mdp).ok());
}

TEST_CASE("gridworld rows are exact before conversion") {
  const GridworldSpec spec = parse_gridworld_spec(read_file(fixtures::data_path("gridworld_desk6.json")));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Gridworld g = build_gridworld(spec, seed);
    for (StateId q = 0; q < g.mdp.num_states(); ++q) {
      for (ActionId a = 0; a < 4; ++a) {
        double sum = 0.0;
        for (double p : g.mdp.kernel().row(q, a).probs) {
          CHECK(std::abs(p * 2000.0 - std::round(p * 2000.0)) < 1e-9);
          sum += p * 2000.0;
        }
        CHECK(std::round(sum) == 2000.0);
      }
    }
  }
}

TEST_CASE("Table I through synthesize") {
  const LabeledMdp m = fixtures::running_example();
  StateSet goal(8, 0);
  goal[3] = 1;
  for (const ProductMdp& p : {mdp_as_product(m, goal), build_product(m, fixtures::dra("always_eventually_q3.dra.json"))}) {
    const Synthesis s = synthesize(p);
    const auto values = values_by_mdp_state(p, s.solution.values);
    for (StateId q = 0; q < 8; ++q) {
      CHECK(values[q] == doctest::Approx(fixtures::kTableValues[q]).epsilon(1e-9));
      CHECK(s.solution.policy(entry_state(p, q)) == fixtures::kTableActions[q]);
    }
    const auto eval = evaluate_policy(p, s.solution.policy);
    for (StateId v = 0; v < p.num_states(); ++v) CHECK(std::abs(eval[v] - s.solution.values[v]) < 1e-9);
  }
  const ProductMdp empty = mdp_as_product(m, StateSet(8, 0));
  for (double v : evaluate_policy(empty, first_enabled_policy(empty.system()))) CHECK(v == 0.0);
  CHECK_THROWS_AS(evaluate_policy(empty, MemorylessPolicy{{0}}), DomainError);
}

TEST_CASE("bounded evaluation agrees with Monte Carlo") {
  oracle::Rng rng(99);
  for (int i = 0; i < 5; ++i) {
    const LabeledMdp m = oracle::random_mdp(rng, 3 + oracle::below(rng, 4), 2, 1);
    const ProductMdp p = build_product(m, oracle::random_dra(rng, 2, 1));
    MemorylessPolicy f = first_enabled_policy(p.system());
    const ValueTable t = evaluate_policy_bounded(p, f, 8);
    const StateSet c = accepting_end_components(p).accepting_states;
    const double mc = oracle::monte_carlo_hit(p.system(), f.choice, c, p.initial(), 8, 100000, rng);
    const double exact = t(p.initial(), 8);
    CHECK(std::abs(mc - exact) <= 3.0 * std::sqrt(std::max(exact * (1 - exact), 1e-12) / 1e5) + 1e-9);
  }
}

TEST_CASE("policy and value files") {
  const LabeledMdp m = fixtures::running_example();
  StateSet goal(8, 0);
  goal[3] = 1;
  const ProductMdp p = mdp_as_product(m, goal);
  const auto names = product_state_names(p, m);
  CHECK(names[0] == "q0");
  const MemorylessPolicy f{{1, 0, 0, 0, 0, 1, 0, 0}};
  const std::string text = serialize_policy(f, names, m.action_names());
  CHECK(parse_policy(text, names, m.action_names()) == f);
  CHECK_THROWS_AS(parse_policy(R"({"q0": "alpha"})", names, m.action_names()), ParseError);
  CHECK(value_vector_csv({0.5, 1.0}, {"a", "b"}) == "state,t,value\na,inf,0.5\nb,inf,1\n");
  ValueTable t(1, 1);
  t.at(1)[0] = 0.25;
  CHECK(value_table_csv(t, {"a"}) == "state,t,value\na,0,0\na,1,0.25\n");

  const ProductMdp pd = build_product(m, fixtures::dra("always_eventually_q3.dra.json"));
  CHECK(product_state_names(pd, m)[pd.index(3, 1)] == "q3|hit");
}

TEST_CASE("cli exit codes") {
  const std::string mdp = fixtures::data_path("running_example.mdp.json");
  const std::string dra = fixtures::data_path("always_eventually_q3.dra.json");
  CHECK(cli({"validate", "--mdp", mdp, "--dra", dra}).code == 0);

  const fs::path dir = scratch("exit");
  const fs::path bad = dir / "bad.mdp.json";
  write_file(bad.string(), R"({"states": ["a"], "actions": ["s"], "initial": "a", "ap": [], "label": {},
    "trans": [{"from": "a", "action": "s", "to": "a", "p": 0.9}]})");
  const CliResult r = cli({"validate", "--mdp", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("row sum") != std::string::npos);
  CHECK(cli({"synthesize", "--mdp", bad.string(), "--accept", "a"}).code == 1);
  CHECK(cli({"validate", "--mdp", (dir / "missing.json").string()}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"learn", "--mdp", mdp, "--dra", dra}).code == 2);  // --seed is required
  CHECK(cli({"synthesize", "--mdp", mdp}).code == 2);
}

TEST_CASE("cli synthesize reproduces Table I") {
  const std::string mdp = fixtures::data_path("running_example.mdp.json");
  const CliResult r = cli({"synthesize", "--mdp", mdp, "--accept", "q3"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "state,value,action");
  const LabeledMdp m = fixtures::running_example();
  for (StateId q = 0; q < 8; ++q) {
    REQUIRE(std::getline(lines, line));
    const auto c1 = line.find(','), c2 = line.rfind(',');
    CHECK(line.substr(0, c1) == m.state_name(q));
    CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == doctest::Approx(fixtures::kTableValues[q]).epsilon(1e-9));
    CHECK(line.substr(c2 + 1) == m.action_name(fixtures::kTableActions[q]));
  }
  const CliResult d = cli({"synthesize", "--mdp", mdp, "--dra", fixtures::data_path("always_eventually_q3.dra.json")});
  CHECK(d.out == r.out);

  const CliResult mec = cli({"mec", "--mdp", mdp, "--accept", "q3"});
  CHECK(mec.code == 0);
  CHECK(mec.out.find("\"accepting\": [\n    \"q3\"\n  ]") != std::string::npos);
}

TEST_CASE("cli outputs honor PACSYN_OUT and are deterministic") {
  const std::string mdp = fixtures::data_path("running_example.mdp.json");
  const std::string dra = fixtures::data_path("always_eventually_q3.dra.json");
  const fs::path a = scratch("out_a"), b = scratch("out_b"), ignored = scratch("ignored");
  ::setenv("PACSYN_OUT", a.string().c_str(), 1);
  const std::vector<std::string> args{"learn", "--mdp", mdp, "--dra", dra, "--seed", "7",
                                      "--m-min", "200", "--probes", "q0,q5", "--out", ignored.string()};
  CHECK(cli(args).code == 0);
  ::setenv("PACSYN_OUT", b.string().c_str(), 1);
  CHECK(cli(args).code == 0);
  ::unsetenv("PACSYN_OUT");
  CHECK(fs::is_empty(ignored));
  for (const char* f : {"run_log.csv", "policy.json", "values.csv", "summary.json"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(read_file((a / f).string()) == read_file((b / f).string()));
  }
  CHECK(read_file((a / "run_log.csv").string()).rfind("step,known_count,recompute_flag,q0,q5\n", 0) == 0);

  const fs::path g = scratch("grid");
  const std::string spec = fixtures::data_path("gridworld_desk6.json");
  CHECK(cli({"gridworld-gen", "--spec", spec, "--seed", "3", "--out", g.string()}).code == 0);
  const CliResult printed = cli({"gridworld-gen", "--spec", spec, "--seed", "3"});
  CHECK(printed.out == read_file((g / "gridworld.mdp.json").string()));

  const CliResult synth = cli({"synthesize", "--mdp", mdp, "--accept", "q3", "--out", g.string(), "--horizon", "5"});
  CHECK(synth.code == 0);
  CHECK(fs::exists(g / "values_bounded.csv"));
  const CliResult eval = cli({"evaluate", "--mdp", mdp, "--accept", "q3", "--policy", (g / "policy.json").string()});
  CHECK(eval.code == 0);
  CHECK(eval.out.find("q0,inf,0.2244") != std::string::npos);

  const CliResult mix = cli({"mixing", "--mdp", mdp, "--accept", "q3", "--epsilon", "0.1", "--cap", "10"});
  CHECK(mix.code == 0);
  CHECK(mix.out.rfind("t_mix,", 0) == 0);
}
