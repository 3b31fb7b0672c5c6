#include "pacsyn/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json_support.hpp"
#include "pacsyn/evaluate.hpp"
#include "pacsyn/gridworld.hpp"
#include "pacsyn/io.hpp"
#include "pacsyn/learner.hpp"

namespace pacsyn {
namespace {

using nlohmann::json;

struct Options {
  std::string mdp;
  std::string dra;
  std::vector<std::string> accept;
  std::string policy;
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  double epsilon = 0.05;
  double delta = 0.05;
  std::size_t horizon = 15;
  bool horizon_given = false;
  double restart_prob = 0.1;
  std::optional<std::uint64_t> m_min;
  std::optional<std::uint64_t> max_steps;
  std::vector<std::string> probes;
  std::uint64_t checkpoint_every = 0;
  bool wall_time = false;
  std::size_t cap = 1000;
};

/// Input that failed validation (exit code 1).
struct InvalidInput : Error {
  using Error::Error;
};

std::string out_dir(const Options& o) {
  if (const char* env = std::getenv("PACSYN_OUT"); env && *env) return env;
  return o.out.empty() ? "." : o.out;
}

std::string in_out_dir(const Options& o, const std::string& file) {
  const std::filesystem::path dir = out_dir(o);
  std::filesystem::create_directories(dir);
  return (dir / file).string();
}

LabeledMdp load_model(const std::string& path) {
  LabeledMdp m = parse_mdp(read_file(path));
  const ValidationReport report = validate(m);
  if (!report.ok()) throw InvalidInput(path + ": invalid model\n" + report.to_string());
  m.renormalize();
  return m;
}

/// Product from --dra, or the MDP itself with --accept states as the goal.
ProductMdp load_product(const Options& o, const LabeledMdp& m) {
  if (!o.dra.empty() && !o.accept.empty()) throw ConfigError("give either --dra or --accept, not both");
  if (!o.dra.empty()) return build_product(m, parse_dra(read_file(o.dra)));
  if (o.accept.empty()) throw ConfigError("an automaton (--dra) or goal states (--accept) are required");
  StateSet goal(m.num_states(), 0);
  for (const std::string& name : o.accept) goal[m.state_index(name)] = 1;
  return mdp_as_product(m, goal);
}

json names_json(const std::vector<StateId>& states, const std::vector<std::string>& names) {
  json arr = json::array();
  for (StateId v : states) arr.push_back(names[v]);
  return arr;
}

json component_json(const EndComponent& ec, const std::vector<std::string>& names,
                    const LabeledMdp& m) {
  json actions = json::object();
  json policy = json::object();
  for (std::size_t i = 0; i < ec.states.size(); ++i) {
    json acts = json::array();
    for (ActionId a : ec.actions[i]) acts.push_back(m.action_name(a));
    actions[names[ec.states[i]]] = std::move(acts);
    policy[names[ec.states[i]]] = m.action_name(ec.policy[i]);
  }
  return {{"states", names_json(ec.states, names)},
          {"actions", std::move(actions)},
          {"policy", std::move(policy)},
          {"policy_strongly_connected", ec.policy_strongly_connected}};
}

int cmd_validate(const Options& o, std::ostream& out) {
  if (o.mdp.empty() && o.dra.empty()) throw ConfigError("nothing to validate: give --mdp and/or --dra");
  bool ok = true;
  if (!o.mdp.empty()) {
    try {
      const LabeledMdp m = parse_mdp(read_file(o.mdp));
      const ValidationReport report = validate(m);
      if (report.ok()) {
        out << o.mdp << ": ok (" << m.num_states() << " states, " << m.num_actions() << " actions)\n";
      } else {
        ok = false;
        out << o.mdp << ": invalid\n" << report.to_string();
      }
    } catch (const ParseError& e) {
      ok = false;
      out << o.mdp << ": " << e.what() << "\n";
    }
  }
  if (!o.dra.empty()) {
    try {
      const RabinAutomaton a = parse_dra(read_file(o.dra));
      out << o.dra << ": ok (" << a.num_states() << " states, " << a.pairs().size() << " pairs)\n";
    } catch (const ParseError& e) {
      ok = false;
      out << o.dra << ": " << e.what() << "\n";
    }
  }
  return ok ? 0 : 1;
}

int cmd_synthesize(const Options& o, std::ostream& out) {
  const LabeledMdp m = load_model(o.mdp);
  const ProductMdp p = load_product(o, m);
  const Synthesis s = synthesize(p);
  const std::vector<std::string> names = product_state_names(p, m);
  out << "state,value,action\n";
  for (StateId q = 0; q < m.num_states(); ++q) {
    const StateId v = entry_state(p, q);
    out << m.state_name(q) << "," << detail::format_double(s.solution.values[v]) << ","
        << m.action_name(s.solution.policy(v)) << "\n";
  }
  if (!o.out.empty() || std::getenv("PACSYN_OUT")) {
    write_file(in_out_dir(o, "policy.json"), serialize_policy(s.solution.policy, names, m.action_names()));
    write_file(in_out_dir(o, "values.csv"), value_vector_csv(s.solution.values, names));
    if (o.horizon_given) {
      const BoundedSolution b = optimal_bounded(p, s.summary.accepting_states, o.horizon);
      write_file(in_out_dir(o, "values_bounded.csv"), value_table_csv(b.values, names));
    }
  }
  return 0;
}

int cmd_mec(const Options& o, std::ostream& out) {
  const LabeledMdp m = load_model(o.mdp);
  const ProductMdp p = load_product(o, m);
  const std::vector<std::string> names = product_state_names(p, m);
  json mecs = json::array();
  for (const EndComponent& ec : max_end_components(p)) mecs.push_back(component_json(ec, names, m));
  const AcceptingSummary summary = accepting_end_components(p);
  json aecs = json::array();
  for (std::size_t i = 0; i < summary.aecs.size(); ++i) {
    json c = component_json(summary.aecs[i], names, m);
    c["pair"] = summary.witness_pair[i];
    aecs.push_back(std::move(c));
  }
  json accepting = json::array();
  for (StateId v = 0; v < p.num_states(); ++v) {
    if (summary.accepting_states[v]) accepting.push_back(names[v]);
  }
  const json doc{{"mecs", std::move(mecs)},
                 {"aecs", std::move(aecs)},
                 {"accepting", std::move(accepting)},
                 {"exhaustive", summary.exhaustive}};
  out << doc.dump(2) << "\n";
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const LabeledMdp m = load_model(o.mdp);
  const ProductMdp p = load_product(o, m);
  const std::vector<std::string> names = product_state_names(p, m);
  const MemorylessPolicy f = parse_policy(read_file(o.policy), names, m.action_names());
  if (o.horizon_given) {
    out << value_table_csv(evaluate_policy_bounded(p, f, o.horizon), names);
  } else {
    out << value_vector_csv(evaluate_policy(p, f), names);
  }
  return 0;
}

int cmd_mixing(const Options& o, std::ostream& out) {
  const LabeledMdp m = load_model(o.mdp);
  const ProductMdp p = load_product(o, m);
  const Synthesis s = synthesize(p);
  const MemorylessPolicy f =
      o.policy.empty() ? s.solution.policy
                       : parse_policy(read_file(o.policy), product_state_names(p, m), m.action_names());
  const MixingReport r = mixing_time(p.system(), f, s.summary.accepting_states, o.epsilon, o.cap);
  out << "t_mix," << (r.t_mix ? std::to_string(*r.t_mix) : "not reached") << "\n";
  out << "t,d\n";
  for (std::size_t t = 0; t < r.d_curve.size(); ++t) {
    out << t << "," << detail::format_double(r.d_curve[t]) << "\n";
  }
  return 0;
}

int cmd_gridworld(const Options& o, std::ostream& out) {
  if (!o.seed) throw ConfigError("--seed is required");
  const Gridworld g = build_gridworld(parse_gridworld_spec(read_file(o.spec)), *o.seed);
  const std::string text = serialize_mdp(g.mdp);
  if (!o.out.empty() || std::getenv("PACSYN_OUT")) {
    const std::string path = in_out_dir(o, "gridworld.mdp.json");
    write_file(path, text);
    out << path << "\n";
  } else {
    out << text;
  }
  return 0;
}

int cmd_learn(const Options& o, std::ostream& out) {
  if (!o.seed) throw ConfigError("--seed is required");
  if (o.dra.empty()) throw ConfigError("--dra is required");
  const LabeledMdp truth = load_model(o.mdp);
  const RabinAutomaton dra = parse_dra(read_file(o.dra));
  const ProductMdp true_product = build_product(truth, dra);

  std::vector<StateId> probes;
  for (const std::string& name : o.probes) probes.push_back(entry_state(true_product, truth.state_index(name)));
  RunHooks hooks;
  hooks.probe_names = o.probes;
  hooks.checkpoint_every = o.checkpoint_every;
  hooks.wall_time = o.wall_time;
  if (!probes.empty()) {
    hooks.probe = [&](const ProductMdp&, const MemorylessPolicy& f) {
      std::vector<double> row(probes.size(), std::numeric_limits<double>::quiet_NaN());
      try {
        const std::vector<double> v = evaluate_policy(true_product, f);
        for (std::size_t i = 0; i < probes.size(); ++i) row[i] = v[probes[i]];
      } catch (const ConvergenceError&) {
        // Intermediate policies may leak too slowly for the sweep cap; logged as nan.
      }
      return row;
    };
  }
  RunConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.delta = o.delta;
  cfg.horizon = o.horizon;
  cfg.restart_prob = o.restart_prob;
  cfg.m_min = o.m_min;
  cfg.max_steps = o.max_steps;
  cfg.seed = *o.seed;
  SimulatedEnvironment env(truth, *o.seed ^ 0x9e3779b97f4a7c15ULL);
  const LearnResult r = learn_and_synthesize(env, dra, cfg, hooks);

  const std::vector<std::string> names = product_state_names(true_product, truth);
  const std::vector<double> achieved = evaluate_policy(true_product, r.product_policy);
  const Synthesis best = synthesize(true_product);
  write_file(in_out_dir(o, "run_log.csv"), run_log_csv(r.log));
  write_file(in_out_dir(o, "policy.json"), serialize_policy(r.product_policy, names, truth.action_names()));
  std::string values = "state,value,optimal\n";
  for (StateId q = 0; q < truth.num_states(); ++q) {
    const StateId v = entry_state(true_product, q);
    values += truth.state_name(q) + "," + detail::format_double(achieved[v]) + "," +
              detail::format_double(best.solution.values[v]) + "\n";
  }
  write_file(in_out_dir(o, "values.csv"), values);
  const json summary{{"steps", r.steps},
                     {"updates", r.updates},
                     {"restarts", r.restarts},
                     {"partial", r.partial},
                     {"known", r.partial ? "incomplete" : "all"}};
  write_file(in_out_dir(o, "summary.json"), summary.dump(2) + "\n");
  out << "steps " << r.steps << ", policy updates " << r.updates
      << (r.partial ? ", stopped at max-steps" : ", all states known") << "\n";
  return r.partial ? 2 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"PAC learning and synthesis for MDPs with Rabin objectives", "pacsyn"};
  app.require_subcommand(1);
  Options o;

  auto model = [&](CLI::App* c, bool need_mdp) {
    auto* opt = c->add_option("--mdp", o.mdp, "MDP JSON file");
    if (need_mdp) opt->required();
    c->add_option("--dra", o.dra, "Rabin automaton JSON file");
    c->add_option("--accept", o.accept, "goal states (instead of --dra)")->delimiter(',');
  };
  auto out_opt = [&](CLI::App* c) { c->add_option("--out", o.out, "output directory (PACSYN_OUT overrides)"); };
  auto horizon = [&](CLI::App* c) {
    c->add_option("--horizon", o.horizon, "step bound T")->check(CLI::PositiveNumber)->each([&](const std::string&) {
      o.horizon_given = true;
    });
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check MDP and automaton files");
  model(validate_cmd, false);

  CLI::App* synth = app.add_subcommand("synthesize", "optimal policy for a known model");
  model(synth, true);
  out_opt(synth);
  horizon(synth);

  CLI::App* mec = app.add_subcommand("mec", "print end components as JSON");
  model(mec, true);

  CLI::App* learn = app.add_subcommand("learn", "learn the model and synthesize (simulated)");
  model(learn, true);
  out_opt(learn);
  horizon(learn);
  learn->add_option("--seed", o.seed, "random seed")->required();
  learn->add_option("--epsilon", o.epsilon, "accuracy");
  learn->add_option("--delta", o.delta, "confidence");
  learn->add_option("--restart-prob", o.restart_prob, "restart probability");
  learn->add_option("--m-min", o.m_min, "visits per state-action before certification");
  learn->add_option("--max-steps", o.max_steps, "step cap");
  learn->add_option("--probes", o.probes, "states evaluated in the log")->delimiter(',');
  learn->add_option("--checkpoint-every", o.checkpoint_every, "log a row every N steps");
  learn->add_flag("--wall-time", o.wall_time, "add a wall_time column to the log");

  CLI::App* eval = app.add_subcommand("evaluate", "value of a policy in a known model");
  model(eval, true);
  horizon(eval);
  eval->add_option("--policy", o.policy, "policy JSON file")->required();

  CLI::App* grid = app.add_subcommand("gridworld-gen", "generate a gridworld MDP");
  grid->add_option("--spec", o.spec, "gridworld spec JSON file")->required();
  grid->add_option("--seed", o.seed, "random seed")->required();
  out_opt(grid);

  CLI::App* mixing = app.add_subcommand("mixing", "epsilon-state value mixing time");
  model(mixing, true);
  mixing->add_option("--policy", o.policy, "policy JSON file (default: optimal)");
  mixing->add_option("--epsilon", o.epsilon, "tolerance");
  mixing->add_option("--cap", o.cap, "largest t examined");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "pacsyn: " << e.what() << "\n";
    return 2;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(o, out);
    if (synth->parsed()) return cmd_synthesize(o, out);
    if (mec->parsed()) return cmd_mec(o, out);
    if (learn->parsed()) return cmd_learn(o, out);
    if (eval->parsed()) return cmd_evaluate(o, out);
    if (grid->parsed()) return cmd_gridworld(o, out);
    if (mixing->parsed()) return cmd_mixing(o, out);
  } catch (const InvalidInput& e) {
    err << "pacsyn: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << "pacsyn: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "pacsyn: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace pacsyn
