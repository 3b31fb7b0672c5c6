// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.
#include <chrono>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pacsyn/cli.hpp"
#include "pacsyn/end_components.hpp"
#include "pacsyn/estimation.hpp"
#include "pacsyn/evaluate.hpp"
#include "pacsyn/gridworld.hpp"
#include "pacsyn/learner.hpp"
#include "pacsyn/values.hpp"

using namespace pacsyn;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

std::vector<double> copy_final(const ValueTable& t) { return {t.final().begin(), t.final().end()}; }

MemorylessPolicy random_policy(const TransitionSystem& s, oracle::Rng& rng) {
  MemorylessPolicy f{std::vector<ActionId>(s.num_states(), 0)};
  for (StateId v = 0; v < s.num_states(); ++v) {
    const auto en = s.enabled_actions(v);
    f.choice[v] = en[oracle::below(rng, en.size())];
  }
  return f;
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string mdp = fixtures::data_path("running_example.mdp.json");
  const char* argv[] = {"pacsyn", "synthesize", "--mdp", mdp.c_str(), "--accept", "q3"};
  std::ostringstream out, err;
  const int code = run_cli(6, argv, out, err);
  const double elapsed = seconds_since(t0);

  const LabeledMdp m = fixtures::running_example();
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  bool ok = code == 0 && line == "state,value,action";
  double worst = 0.0;
  for (StateId q = 0; q < 8 && ok; ++q) {
    if (!std::getline(lines, line)) {
      ok = false;
      break;
    }
    const auto c1 = line.find(','), c2 = line.rfind(',');
    const double value = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    worst = std::max(worst, std::abs(value - fixtures::kTableValues[q]));
    ok = line.substr(0, c1) == m.state_name(q) && line.substr(c2 + 1) == m.action_name(fixtures::kTableActions[q]);
  }
  ok = ok && worst <= 1e-4 && elapsed < 1.0;
  report(1, ok, "max |U - Table I| = " + fmt(worst) + ", " + fmt(elapsed) + " s");
}

void criterion2() {
  const LabeledMdp m = fixtures::running_example();
  StateSet goal(8, 0);
  goal[3] = 1;
  const AcceptingSummary s = accepting_end_components(mdp_as_product(m, goal));
  const bool ok = s.aecs.size() == 1 && s.aecs[0].states == std::vector<StateId>{3} &&
                  in_component_policy(s.aecs[0]) == std::vector<std::pair<StateId, ActionId>>{{3, 0}} &&
                  s.accepting_states == goal;
  report(2, ok, "AEC ({q3}, alpha), C = {q3}");
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Rng rng(3003);
  int instances = 0, set_mismatch = 0;
  double worst = 0.0;
  for (; instances < 250; ++instances) {
    const std::size_t ns = 1 + oracle::below(rng, 2);
    const std::size_t nq = 1 + oracle::below(rng, 5 / ns);
    const ProductMdp p = build_product(oracle::random_mdp(rng, nq, 1 + oracle::below(rng, 2), 2),
                                       oracle::random_dra(rng, ns, 2));
    const StateSet c = accepting_end_components(p).accepting_states;
    if (c != oracle::brute_force_accepting(p.system(), p.pairs())) ++set_mismatch;
    const std::size_t horizon = 1 + oracle::below(rng, 4);
    const std::vector<double> got = copy_final(optimal_bounded(p.system(), c, horizon).values);
    const auto want = oracle::brute_force_optimal(p.system(), c, horizon);
    for (StateId v = 0; v < p.num_states(); ++v) worst = std::max(worst, std::abs(got[v] - want[v]));
  }
  const double elapsed = seconds_since(t0);
  report(3, set_mismatch == 0 && worst <= 1e-10 && elapsed < 120.0,
         std::to_string(instances) + " products, " + std::to_string(set_mismatch) + " C mismatches, max value gap " +
             fmt(worst) + ", " + fmt(elapsed) + " s");
}

void criterion4() {
  oracle::Rng rng(4004);
  int violations = 0, instances = 0;
  double worst_ratio = 0.0;
  for (; instances < 250; ++instances) {
    const LabeledMdp m = oracle::random_mdp(rng, 2 + oracle::below(rng, 7), 2, 2);
    const RabinAutomaton a = oracle::random_dra(rng, 1 + oracle::below(rng, 3), 2);
    const std::size_t horizon = 1 + oracle::below(rng, 10);
    const double eps = 0.01 + 0.3 * oracle::uniform(rng);
    const double alpha = eps / static_cast<double>(m.num_states() * horizon);
    const LabeledMdp mb(m.state_names(), m.action_names(), m.initial(), m.propositions(), m.labels(),
                        oracle::perturb(m.kernel(), rng, alpha));
    const ProductMdp p = build_product(m, a), pb = build_product(mb, a);
    const StateSet c = accepting_end_components(p).accepting_states;
    const MemorylessPolicy f = random_policy(p.system(), rng);
    const std::vector<double> u = copy_final(policy_bounded_value(p, f, c, horizon));
    const std::vector<double> ub = copy_final(policy_bounded_value(pb, f, c, horizon));
    double gap = 0.0;
    for (StateId v = 0; v < p.num_states(); ++v) gap = std::max(gap, std::abs(u[v] - ub[v]));
    worst_ratio = std::max(worst_ratio, gap / eps);
    if (gap > eps) ++violations;
  }
  report(4, violations == 0,
         std::to_string(instances) + " instances, " + std::to_string(violations) + " violations, max gap/eps " +
             fmt(worst_ratio));
}

void criterion5() {
  oracle::Rng rng(5005);
  int violations = 0, instances = 0, bad_instances = 0, inherited_violations = 0;
  for (; instances < 250; ++instances) {
    const LabeledMdp m = oracle::random_mdp(rng, 2 + oracle::below(rng, 5), 2, 2);
    const ProductMdp p = build_product(m, oracle::random_dra(rng, 1 + oracle::below(rng, 3), 2));
    const KnownProductMdp kp = known_product(p, oracle::random_set(rng, p.num_states(), 0.6));
    const std::size_t horizon = 1 + oracle::below(rng, 10);
    const MemorylessPolicy g = random_policy(p.system(), rng);
    MemorylessPolicy local{std::vector<ActionId>(kp.num_states(), 0)};
    for (StateId j = 0; j < kp.product_state.size(); ++j) local.choice[j] = g(kp.product_state[j]);
    const ValueTable full =
        policy_bounded_value(p.system(), g, accepting_end_components(p).accepting_states, horizon);
    const ValueTable known = policy_bounded_value(
        kp.system, local, accepting_end_components(kp.system, kp.pairs).accepting_states, horizon);
    // The same inequality with the known product scored against the full product's C.
    const StateSet c = accepting_end_components(p).accepting_states;
    StateSet inherited(kp.num_states(), 0);
    inherited[kp.sink] = 1;
    for (StateId j = 0; j < kp.product_state.size(); ++j) inherited[j] = c[kp.product_state[j]];
    const ValueTable known_inherited = policy_bounded_value(kp.system, local, inherited, horizon);
    bool instance_bad = false;
    for (StateId j = 0; j < kp.product_state.size(); ++j) {
      const double f = full(kp.product_state[j], horizon);
      if (known(j, horizon) < f - 1e-12) {
        ++violations;
        instance_bad = true;
      }
      if (known_inherited(j, horizon) < f - 1e-12) ++inherited_violations;
    }
    bad_instances += instance_bad;
  }
  report(5, violations == 0,
         std::to_string(instances) + " triples, " + std::to_string(violations) + " violating known states in " +
             std::to_string(bad_instances) + " triples; against the full product's C: " +
             std::to_string(inherited_violations) + " violations");
}

RunConfig running_config(std::uint64_t seed) {
  RunConfig cfg;
  cfg.epsilon = 0.05;
  cfg.delta = 0.05;
  cfg.horizon = 15;
  cfg.m_min = 200;
  cfg.seed = seed;
  return cfg;
}

constexpr int kRunningSeeds = 50;
constexpr int kGridSeeds = 10;

/// Lemma 3: every recompute of every running-example run.
void criterion6() {
  const LabeledMdp m = fixtures::running_example();
  const RabinAutomaton dra = fixtures::dra("always_eventually_q3.dra.json");
  const ProductMdp truth = build_product(m, dra);
  const StateSet c = accepting_end_components(truth).accepting_states;
  const std::size_t horizon = 15;
  const std::vector<double> optimal = copy_final(optimal_bounded(truth, c, horizon).values);
  const double eps = 0.05;
  const double alpha = eps / static_cast<double>(m.num_states() * horizon);
  const std::size_t ns = dra.num_states();

  std::size_t checks = 0, exploit = 0, explore = 0, neither = 0;
  for (int seed = 0; seed < kRunningSeeds; ++seed) {
    SimulatedEnvironment env(m, 6000 + seed);
    const Learner* self = nullptr;
    RunHooks hooks;
    hooks.on_recompute = [&](const LearnerState& st) {
      const std::vector<double> achieved = copy_final(policy_bounded_value(truth, self->snapshot_policy(), c, horizon));
      StateSet escape(truth.num_states(), 0);
      for (StateId v = 0; v < truth.num_states(); ++v) escape[v] = !st.known.contains(v / ns) && !c[v];
      const MarkovChain chain = induce_chain(truth.system(), self->snapshot_policy());
      const std::vector<double> hit = copy_final(bounded_hit(chain, escape, horizon));
      for (StateId v = 0; v < truth.num_states(); ++v) {
        if (!st.known.contains(v / ns)) continue;
        ++checks;
        if (achieved[v] >= optimal[v] - (2 * eps + alpha)) {
          ++exploit;
        } else if (hit[v] >= alpha) {
          ++explore;
        } else {
          ++neither;
        }
      }
    };
    Learner learner(env, dra, running_config(seed), hooks);
    self = &learner;
    learner.run();
  }
  report(6, neither == 0 && checks > 0,
         std::to_string(kRunningSeeds) + " runs, " + std::to_string(checks) + " known-state checks: " +
             std::to_string(exploit) + " near-optimal, " + std::to_string(explore) + " explore, " +
             std::to_string(neither) + " neither");
}

struct RunRecord {
  std::string csv;
  std::string policy;
};

std::vector<RunRecord> running_runs(double* worst_error, int* within, int* complete) {
  const LabeledMdp m = fixtures::running_example();
  const RabinAutomaton dra = fixtures::dra("always_eventually_q3.dra.json");
  const ProductMdp truth = build_product(m, dra);
  const Synthesis best = synthesize(truth);
  std::vector<RunRecord> records;
  *worst_error = 0.0;
  *within = 0;
  *complete = 0;
  for (int seed = 0; seed < kRunningSeeds; ++seed) {
    SimulatedEnvironment env(m, 7000 + seed);
    RunHooks hooks;
    hooks.probe_names = {"q0"};
    hooks.probe = [&](const ProductMdp&, const MemorylessPolicy& f) {
      return std::vector<double>{evaluate_policy(truth, f)[entry_state(truth, 0)]};
    };
    const LearnResult r = learn_and_synthesize(env, dra, running_config(seed), hooks);
    const std::vector<double> achieved = copy_final(evaluate_policy_bounded(truth, r.product_policy, 15));
    double err = 0.0;
    for (StateId v = 0; v < truth.num_states(); ++v) err = std::max(err, std::abs(achieved[v] - best.solution.values[v]));
    *worst_error = std::max(*worst_error, err);
    if (err <= 0.15) ++*within;
    if (!r.partial && !r.log.rows.empty() && r.log.rows.back().known_count == m.num_states() &&
        r.updates <= m.num_states() + 1) {
      ++*complete;
    }
    std::ostringstream pol;
    for (ActionId a : r.product_policy.choice) pol << a << ' ';
    records.push_back({run_log_csv(r.log), pol.str()});
  }
  return records;
}

std::vector<RunRecord> grid_runs(int* complete, double* worst_gap) {
  const GridworldSpec spec = parse_gridworld_spec(read_file(fixtures::data_path("gridworld_desk6.json")));
  const RabinAutomaton dra = fixtures::dra("surveillance.dra.json");
  std::vector<RunRecord> records;
  *complete = 0;
  *worst_gap = 0.0;
  for (int seed = 0; seed < kGridSeeds; ++seed) {
    const Gridworld g = build_gridworld(spec, seed);
    const ProductMdp truth = build_product(g.mdp, dra);
    const Synthesis best = synthesize(truth);
    std::vector<StateId> probes;
    for (const auto& name : g.probe_states) probes.push_back(entry_state(truth, g.mdp.state_index(name)));
    RunHooks hooks;
    hooks.probe_names = g.probe_states;
    hooks.probe = [&](const ProductMdp&, const MemorylessPolicy& f) {
      std::vector<double> out(probes.size(), std::numeric_limits<double>::quiet_NaN());
      try {
        const auto values = evaluate_policy(truth, f);
        for (std::size_t i = 0; i < probes.size(); ++i) out[i] = values[probes[i]];
      } catch (const ConvergenceError&) {
      }
      return out;
    };
    RunConfig cfg;
    cfg.epsilon = 0.05;
    cfg.delta = 0.05;
    cfg.horizon = 25;
    cfg.m_min = 1000;
    cfg.seed = 100 + seed;
    SimulatedEnvironment env(g.mdp, 8000 + seed);
    const LearnResult r = learn_and_synthesize(env, dra, cfg, hooks);
    std::vector<double> values;
    try {
      values = evaluate_policy(truth, r.product_policy);
    } catch (const ConvergenceError&) {
      std::printf("  grid seed %d: final policy evaluation did not converge\n", seed);
      values.assign(truth.num_states(), -1.0);
    }
    double gap = 0.0;
    for (StateId v : probes) gap = std::max(gap, std::abs(values[v] - best.solution.values[v]));
    *worst_gap = std::max(*worst_gap, gap);
    if (!r.partial && r.log.rows.back().known_count == g.mdp.num_states() && gap <= 0.15) ++*complete;
    std::ostringstream pol;
    for (ActionId a : r.product_policy.choice) pol << a << ' ';
    records.push_back({run_log_csv(r.log), pol.str()});
  }
  return records;
}

void criterion10() {
  TransitionSystem::Builder b(2, 1);
  b.add(0, 0, 0, 0.5);
  b.add(0, 0, 1, 0.5);
  b.add(1, 0, 1, 1.0);
  const TransitionSystem s = std::move(b).build();
  const MixingReport r = mixing_time(s, MemorylessPolicy{{0, 0}}, StateSet{0, 1}, 0.1, 20);
  double worst = 0.0;
  for (std::size_t t = 0; t <= 20; ++t) worst = std::max(worst, std::abs(r.d_curve[t] - std::pow(0.5, t)));
  report(10, r.t_mix == std::size_t{4} && worst <= 1e-12,
         "t_mix = " + (r.t_mix ? std::to_string(*r.t_mix) : std::string("none")) + ", max |d(t) - 0.5^t| = " +
             fmt(worst));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();

  const auto t7 = std::chrono::steady_clock::now();
  double worst_error = 0.0;
  int within = 0, complete = 0;
  const auto first = running_runs(&worst_error, &within, &complete);
  const double elapsed7 = seconds_since(t7);
  report(7, complete == kRunningSeeds && within * 100 >= 95 * kRunningSeeds && elapsed7 < 300.0,
         std::to_string(complete) + "/" + std::to_string(kRunningSeeds) + " complete, " + std::to_string(within) +
             " within 0.15, observed max error " + fmt(worst_error) + ", " + fmt(elapsed7) + " s");

  int grid_ok = 0;
  double grid_gap = 0.0;
  const auto grid_first = grid_runs(&grid_ok, &grid_gap);
  report(8, grid_ok == kGridSeeds,
         std::to_string(grid_ok) + "/" + std::to_string(kGridSeeds) + " seeds, max probe gap " + fmt(grid_gap));

  double w2 = 0.0, g2 = 0.0;
  int a2 = 0, b2 = 0, c2 = 0;
  const auto second = running_runs(&w2, &a2, &b2);
  const auto grid_second = grid_runs(&c2, &g2);
  std::size_t same = 0;
  for (std::size_t i = 0; i < first.size(); ++i) same += first[i].csv == second[i].csv && first[i].policy == second[i].policy;
  for (std::size_t i = 0; i < grid_first.size(); ++i)
    same += grid_first[i].csv == grid_second[i].csv && grid_first[i].policy == grid_second[i].policy;
  const std::size_t total = first.size() + grid_first.size();
  report(9, same == total, std::to_string(same) + "/" + std::to_string(total) + " reruns byte-identical");

  criterion10();
  return failures == 0 ? 0 : 1;
}
