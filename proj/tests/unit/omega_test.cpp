#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "pacsyn/rabin.hpp"

using namespace pacsyn;

namespace {

const char* kSelfLoop = R"({"states": ["s0"], "initial": "s0", "ap": ["x"],
  "trans": [{"from": "s0", "guard": "*", "to": "s0"}],
  "pairs": [{"J": [], "K": ["s0"]}]})";

LassoWord rotate(const LassoWord& w, std::size_t k) {
  // prefix . c0..c_{n-1} (c)^w  ==  prefix . c0..c_{k-1} . (c_k..c_{n-1} c0..c_{k-1})^w
  LassoWord out{w.prefix, {}};
  for (std::size_t i = 0; i < k; ++i) out.prefix.push_back(w.cycle[i]);
  for (std::size_t i = 0; i < w.cycle.size(); ++i) out.cycle.push_back(w.cycle[(i + k) % w.cycle.size()]);
  return out;
}

LassoWord unroll(const LassoWord& w, std::size_t k) {
  LassoWord out{w.prefix, {}};
  for (std::size_t i = 0; i < k; ++i) out.cycle.insert(out.cycle.end(), w.cycle.begin(), w.cycle.end());
  return out;
}

// R1 = 1, R2 = 2, R3 = 4, R4 = 8
constexpr Letter R1 = 1, R2 = 2, R3 = 4, R4 = 8;

}  // namespace

TEST_CASE("self-loop automaton accepts everything") {
  const RabinAutomaton a = parse_dra(kSelfLoop);
  CHECK(a.num_states() == 1);
  CHECK(a.step(0, 0) == 0);
  CHECK(accepts(a, {{}, {0}}));
  CHECK(accepts(a, {{1, 0}, {1}}));
}

TEST_CASE("always-eventually q3") {
  const RabinAutomaton a = fixtures::dra("always_eventually_q3.dra.json");
  CHECK(a.num_states() == 2);
  CHECK(a.pairs().size() == 1);
  const StateId wait = *a.find_state("wait"), hit = *a.find_state("hit");
  CHECK(a.initial() == wait);
  CHECK(a.step(wait, 1) == hit);
  CHECK(a.step(hit, 0) == wait);
  CHECK(run(a, std::vector<Letter>{}) == std::vector<StateId>{wait});
  CHECK(run(a, std::vector<Letter>{1, 0}) == std::vector<StateId>{wait, hit, wait});
  CHECK(run(a, std::vector<Letter>{1, 0, 0}).size() == 4);
  CHECK(accepts(a, {{}, {1}}));
  CHECK_FALSE(accepts(a, {{}, {0}}));
  CHECK_FALSE(accepts(a, {{1, 1, 1}, {0}}));
  CHECK(accepts(a, {{0}, {0, 0, 1}}));
}

TEST_CASE("J visited infinitely often rejects") {
  const RabinAutomaton a = parse_dra(R"({"states": ["ok", "bad"], "initial": "ok", "ap": ["b"],
    "trans": [{"from": "ok", "guard": ["b"], "to": "bad"}, {"from": "ok", "guard": "*", "to": "ok"},
              {"from": "bad", "guard": ["b"], "to": "bad"}, {"from": "bad", "guard": "*", "to": "ok"}],
    "pairs": [{"J": ["bad"], "K": ["ok"]}]})");
  CHECK_FALSE(accepts(a, {{}, {0, 1}}));
  CHECK(accepts(a, {{1, 1}, {0}}));
}

TEST_CASE("parse errors") {
  try {
    parse_dra(R"({"states": ["s0", "s1"], "initial": "s0", "ap": ["x"],
      "trans": [{"from": "s0", "guard": "*", "to": "s0"}, {"from": "s1", "guard": ["x"], "to": "s0"}],
      "pairs": [{"J": [], "K": ["s0"]}]})");
    FAIL("expected a completeness error");
  } catch (const CompletenessError& e) {
    REQUIRE(e.missing().size() == 1);
    CHECK(e.missing()[0].first == "s1");
    CHECK(e.missing()[0].second == 0);
  }
  CHECK_THROWS_AS(parse_dra(R"({"states": ["s0"], "initial": "s0", "ap": ["x"],
      "trans": [{"from": "s0", "guard": ["y"], "to": "s0"}, {"from": "s0", "guard": "*", "to": "s0"}],
      "pairs": [{"J": [], "K": ["s0"]}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_dra(R"({"states": ["s0"], "initial": "s0", "ap": ["x"],
      "trans": [{"from": "s0", "guard": "*", "to": "s0"}], "pairs": [{"J": [], "K": []}]})"),
                  ParseError);
  try {
    parse_dra("{\"states\": [\"s0\"],\n \"initial\": ]");
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 0);
  }
  const RabinAutomaton a = parse_dra(kSelfLoop);
  CHECK_THROWS_AS(a.step(3, 0), DomainError);
}

TEST_CASE("canonical serialization round trip") {
  for (const char* name : {"always_eventually_q3.dra.json", "surveillance.dra.json", "accept_all.dra.json"}) {
    const RabinAutomaton a = fixtures::dra(name);
    const std::string text = serialize_dra(a);
    CHECK(serialize_dra(parse_dra(text)) == text);
  }
}

TEST_CASE("acceptance is invariant under rotation and unrolling") {
  const RabinAutomaton a = fixtures::dra("surveillance.dra.json");
  oracle::Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    LassoWord w;
    for (std::size_t k = oracle::below(rng, 4); k > 0; --k) w.prefix.push_back(oracle::below(rng, 16));
    for (std::size_t k = 1 + oracle::below(rng, 5); k > 0; --k) w.cycle.push_back(oracle::below(rng, 16));
    const bool base = accepts(a, w);
    CHECK(run(a, w.prefix) == run(a, w.prefix));
    for (std::size_t k = 0; k < w.cycle.size(); ++k) CHECK(accepts(a, rotate(w, k)) == base);
    for (std::size_t k = 1; k <= 3; ++k) CHECK(accepts(a, unroll(w, k)) == base);
  }
}

TEST_CASE("surveillance automaton on hand-written lassos") {
  const RabinAutomaton a = fixtures::dra("surveillance.dra.json");
  CHECK(a.num_states() == 5);
  CHECK(a.propositions() == std::vector<std::string>{"R1", "R2", "R3", "R4"});
  const std::vector<LassoWord> words = {
      {{}, {R1, R2, R3}},
      {{}, {R3, R2, R1}},
      {{}, {R1, 0, R2, 0, R3, 0}},
      {{}, {R1 | R2 | R3}},
      {{}, {R1 | R2, R3}},
      {{}, {R1, R2 | R3}},
      {{0, 0}, {R2, R3, R1}},
      {{R4}, {R1, R2, R3}},
      {{}, {R1, R2, R3, R4}},
      {{}, {R1, R2}},
      {{}, {R2, R3}},
      {{}, {R1, R3}},
      {{}, {0}},
      {{R1, R2, R3}, {0}},
      {{R1}, {R2, R3}},
      {{}, {R1 | R4, R2, R3}},
      {{R1, R1, R1}, {R1, R2, R2, R3}},
      {{}, {R3, R3, R1, R1, R2, R2}},
      {{}, {R2, R1, R3}},
      {{R2, R3}, {R1, 0, 0, R2, 0, R3}},
      {{}, {R1 | R3, R2}},
      {{0}, {R1 | R2 | R3 | R4}},
      {{R1, R2, R3, R1, R2}, {R3}},
      {{}, {R2 | R3, R1}},
  };
  std::size_t positives = 0;
  for (const LassoWord& w : words) {
    const bool want = oracle::surveillance_holds(w);
    positives += want;
    CHECK(accepts(a, w) == want);
  }
  CHECK(positives >= 8);
  CHECK(positives <= words.size() - 8);

  oracle::Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    LassoWord w;
    for (std::size_t k = oracle::below(rng, 5); k > 0; --k) w.prefix.push_back(oracle::below(rng, 8) | (oracle::below(rng, 20) == 0 ? R4 : 0));
    for (std::size_t k = 1 + oracle::below(rng, 6); k > 0; --k) w.cycle.push_back(oracle::below(rng, 8) | (oracle::below(rng, 20) == 0 ? R4 : 0));
    CHECK(accepts(a, w) == oracle::surveillance_holds(w));
  }
}

TEST_CASE("make_letter") {
  const RabinAutomaton a = fixtures::dra("surveillance.dra.json");
  const std::vector<std::string> props{"R3", "R1"};
  CHECK(make_letter(a, props) == (R1 | R3));
  const std::vector<std::string> bad{"R9"};
  CHECK_THROWS_AS(make_letter(a, bad), ParseError);
}
