#include "pacsyn/learner.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "json_support.hpp"
#include "pacsyn/end_components.hpp"
#include "pacsyn/values.hpp"

namespace pacsyn {
namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string rng_to_string(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void rng_from_string(std::mt19937_64& rng, const std::string& text) {
  std::istringstream is(text);
  is >> rng;
  if (!is) throw ParseError("corrupt random generator state");
}

nlohmann::json bits(const StateSet& set) {
  std::string s(set.size(), '0');
  for (std::size_t i = 0; i < set.size(); ++i) s[i] = set[i] ? '1' : '0';
  return s;
}

StateSet unbits(const nlohmann::json& j, std::size_t n) {
  const std::string s = j.get<std::string>();
  if (s.size() != n) throw ParseError("state set has the wrong length");
  StateSet out(n, 0);
  for (std::size_t i = 0; i < n; ++i) out[i] = s[i] == '1';
  return out;
}

}  // namespace

SimulatedEnvironment::SimulatedEnvironment(LabeledMdp truth, std::uint64_t seed)
    : truth_(std::move(truth)), shape_(shape_of(truth_)), rng_(seed), state_(truth_.initial()) {}

StateId SimulatedEnvironment::step(ActionId action) {
  if (action >= truth_.num_actions() || !truth_.kernel().enabled(state_, action)) {
    throw ContractViolation("action " + std::to_string(action) + " is not enabled at state " +
                            truth_.state_name(state_));
  }
  const RowView r = truth_.kernel().row(state_, action);
  const double u = unit_draw(rng_);
  double acc = 0.0;
  StateId next = r.targets[r.size() - 1];
  for (std::size_t i = 0; i < r.size(); ++i) {
    acc += r.probs[i];
    if (u < acc) {
      next = r.targets[i];
      break;
    }
  }
  state_ = next;
  return next;
}

void SimulatedEnvironment::reset(StateId q) {
  if (q >= truth_.num_states()) throw DomainError("reset to unknown state");
  state_ = q;
}

std::string SimulatedEnvironment::save_state() const {
  nlohmann::json j{{"state", state_}, {"rng", rng_to_string(rng_)}};
  return j.dump();
}

void SimulatedEnvironment::restore_state(std::string_view text) {
  const nlohmann::json j = detail::parse_json(text);
  reset(j.at("state").get<StateId>());
  rng_from_string(rng_, j.at("rng").get<std::string>());
}

std::string run_log_csv(const RunLog& log) {
  std::string out = "step,known_count,recompute_flag";
  for (const std::string& p : log.probe_names) out += "," + p;
  if (log.with_wall_time) out += ",wall_time";
  out += "\n";
  for (const LogRow& r : log.rows) {
    out += std::to_string(r.step) + "," + std::to_string(r.known_count) + "," +
           (r.recompute ? "1" : "0");
    for (double v : r.probes) out += "," + detail::format_double(v);
    if (log.with_wall_time) out += "," + detail::format_double(r.wall_seconds);
    out += "\n";
  }
  return out;
}

Learner::Learner(Environment& env, const RabinAutomaton& dra, RunConfig cfg, RunHooks hooks)
    : env_(env), dra_(dra), cfg_(std::move(cfg)), hooks_(std::move(hooks)), shape_(env.shape()) {
  if (!(cfg_.restart_prob >= 0.0 && cfg_.restart_prob <= 1.0)) {
    throw ConfigError("restart probability must lie in [0, 1]");
  }
  if (cfg_.restart_prob > 0.0 && !env_.supports_reset()) {
    throw ConfigError("restarts requested but the environment cannot be reset");
  }
  conf_ = make_confidence(cfg_.epsilon, cfg_.delta, cfg_.horizon, shape_.num_states(),
                          shape_.num_actions(), cfg_.m_min, cfg_.visit_cap);
  if (cfg_.max_steps) {
    max_steps_ = *cfg_.max_steps;
  } else {
    const double variance_visits = std::ceil(conf_.k / (4.0 * conf_.threshold()));
    const double per_row = std::max(static_cast<double>(conf_.m_min), variance_visits);
    // States entered only through restarts cost about |Q| / p steps per visit.
    const double per_visit = cfg_.restart_prob > 0.0
                                 ? std::ceil(static_cast<double>(shape_.num_states()) / cfg_.restart_prob)
                                 : 1.0;
    const double bound = 10.0 * static_cast<double>(shape_.num_states()) *
                         static_cast<double>(shape_.num_actions()) * per_row * per_visit;
    max_steps_ = bound >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(bound);
  }
  rng_.seed(cfg_.seed);
  st_.belief = BeliefCounts(shape_.num_states(), shape_.num_actions());
  st_.known = KnownSet{StateSet(shape_.num_states(), 0)};
  st_.learned = learned_mdp(st_.belief, shape_);
  try {
    letters_ = automaton_letters(st_.learned, dra_);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  log_.probe_names = hooks_.probe_names;
  log_.with_wall_time = hooks_.wall_time;
  started_ = now_seconds();
  st_.mdp_state = env_.current_state();
  st_.automaton_state = dra_.step(dra_.initial(), letters_[st_.mdp_state]);
}

ActionId Learner::balanced_action(StateId q) const {
  const auto& enabled = shape_.enabled[q];
  ActionId best = enabled.front();
  for (ActionId a : enabled) {
    if (st_.belief.total(q, a) < st_.belief.total(q, best)) best = a;
  }
  return best;
}

MemorylessPolicy Learner::snapshot_policy() const {
  const std::size_t ns = dra_.num_states();
  MemorylessPolicy f{std::vector<ActionId>(shape_.num_states() * ns)};
  for (StateId v = 0; v < f.choice.size(); ++v) {
    f.choice[v] = !st_.defined.empty() && st_.defined[v] ? st_.policy[v]
                                                         : balanced_action(static_cast<StateId>(v / ns));
  }
  return f;
}

void Learner::recompute() {
  snapshot_belief_ = st_.belief;
  st_.learned = learned_mdp(st_.belief, shape_);
  st_.product = build_product(st_.learned, dra_);
  const StateSet known = st_.known.lifted(dra_.num_states());
  const KnownProductMdp kp = known_product(st_.product, known);
  const AcceptingSummary summary = accepting_end_components(kp.system, kp.pairs);
  BoundedSolution sol = optimal_bounded(kp.system, summary.accepting_states, cfg_.horizon);
  apply_component_policies(summary, sol.policy);
  st_.policy.assign(st_.product.num_states(), 0);
  for (std::size_t i = 0; i < kp.product_state.size(); ++i) {
    st_.policy[kp.product_state[i]] = sol.policy.choice[i];
  }
  st_.defined = known;
  st_.accepting = accepting_end_components(st_.product).accepting_states;
  ++st_.update_count;
  st_.recompute = false;
  add_row(true);
  if (hooks_.on_recompute) hooks_.on_recompute(st_);
}

void Learner::add_row(bool recompute) {
  LogRow row{st_.step, st_.known.size(), recompute, {}, 0.0};
  if (hooks_.probe) row.probes = hooks_.probe(st_.product, snapshot_policy());
  if (log_.with_wall_time) row.wall_seconds = now_seconds() - started_;
  log_.rows.push_back(std::move(row));
}

void Learner::maybe_restart(ActionId action) {
  const StateId q = st_.mdp_state;
  const std::uint64_t total = st_.belief.total(q, action);
  const bool stuck = total == 0 || st_.belief.count(q, action, q) == total;
  const bool accepting = !st_.accepting.empty() && st_.accepting[product_state()];
  if (!(stuck || accepting) || cfg_.restart_prob <= 0.0) return;
  if (unit_draw(rng_) >= cfg_.restart_prob) return;
  const StateId target = static_cast<StateId>(unit_draw(rng_) * static_cast<double>(shape_.num_states()));
  env_.reset(target);
  ++st_.restarts;
  st_.mdp_state = target;
  st_.automaton_state = dra_.step(dra_.initial(), letters_[target]);
}

bool Learner::run(std::optional<std::uint64_t> budget) {
  std::uint64_t taken = 0;
  while (!finished_) {
    if (st_.recompute) recompute();
    if (st_.known.size() == shape_.num_states()) {
      finished_ = true;
      break;
    }
    if (st_.step >= max_steps_) {
      finished_ = true;
      partial_ = true;
      break;
    }
    if (budget && taken >= *budget) break;
    const StateId q = st_.mdp_state;
    const StateId v = product_state();
    const ActionId a = st_.defined[v] ? st_.policy[v] : balanced_action(q);
    const StateId next = env_.step(a);
    ++st_.step;
    ++taken;
    st_.belief.update(q, a, next);
    const bool now_known = is_known_state(st_.belief, shape_.enabled[q], q, conf_);
    if (now_known != st_.known.contains(q)) {
      st_.known.states[q] = now_known;
      st_.recompute = true;
    }
    st_.mdp_state = next;
    st_.automaton_state = dra_.step(st_.automaton_state, letters_[next]);
    maybe_restart(a);
    if (hooks_.checkpoint_every != 0 && st_.step % hooks_.checkpoint_every == 0) add_row(false);
  }
  return finished_;
}

LearnResult Learner::result() const {
  MemorylessPolicy f = snapshot_policy();
  return LearnResult{lift_policy(st_.product, f), f, st_.product, log_, partial_,
                     st_.step, st_.update_count, st_.restarts};
}

std::string Learner::save_belief() const { return write_belief(st_.belief, shape_); }

std::string Learner::save_loop_state() const {
  nlohmann::json policy = nlohmann::json::array();
  for (ActionId a : st_.policy) policy.push_back(a);
  nlohmann::json rows = nlohmann::json::array();
  for (const LogRow& r : log_.rows) {
    rows.push_back({{"step", r.step},
                    {"known_count", r.known_count},
                    {"recompute", r.recompute},
                    {"probes", r.probes},
                    {"wall", r.wall_seconds}});
  }
  nlohmann::json j{{"step", st_.step},
                   {"mdp_state", st_.mdp_state},
                   {"automaton_state", st_.automaton_state},
                   {"update_count", st_.update_count},
                   {"recompute", st_.recompute},
                   {"restarts", st_.restarts},
                   {"known", bits(st_.known.states)},
                   {"defined", bits(st_.defined)},
                   {"accepting", bits(st_.accepting)},
                   {"policy", policy},
                   {"rng", rng_to_string(rng_)},
                   {"environment", env_.save_state()},
                   {"finished", finished_},
                   {"partial", partial_},
                   {"log", rows},
                   {"model_belief", write_belief(snapshot_belief_, shape_)}};
  return j.dump(2) + "\n";
}

void Learner::restore(std::string_view belief, std::string_view loop_state) {
  const nlohmann::json j = detail::parse_json(loop_state);
  try {
    st_.belief = read_belief(belief, shape_);
    const std::size_t nq = shape_.num_states();
    const std::size_t nv = nq * dra_.num_states();
    st_.step = j.at("step").get<std::uint64_t>();
    st_.mdp_state = j.at("mdp_state").get<StateId>();
    st_.automaton_state = j.at("automaton_state").get<StateId>();
    st_.update_count = j.at("update_count").get<std::size_t>();
    st_.recompute = j.at("recompute").get<bool>();
    st_.restarts = j.at("restarts").get<std::uint64_t>();
    st_.known.states = unbits(j.at("known"), nq);
    st_.defined = unbits(j.at("defined"), nv);
    st_.accepting = unbits(j.at("accepting"), nv);
    st_.policy = j.at("policy").get<std::vector<ActionId>>();
    if (st_.policy.size() != nv) throw ParseError("policy has the wrong length");
    rng_from_string(rng_, j.at("rng").get<std::string>());
    env_.restore_state(j.at("environment").get<std::string>());
    finished_ = j.at("finished").get<bool>();
    partial_ = j.at("partial").get<bool>();
    snapshot_belief_ = read_belief(j.at("model_belief").get<std::string>(), shape_);
    log_.rows.clear();
    for (const auto& r : j.at("log")) {
      log_.rows.push_back(LogRow{r.at("step").get<std::uint64_t>(),
                                 r.at("known_count").get<std::size_t>(),
                                 r.at("recompute").get<bool>(),
                                 r.at("probes").get<std::vector<double>>(),
                                 r.at("wall").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed loop state: ") + e.what());
  }
  st_.learned = learned_mdp(snapshot_belief_, shape_);
  st_.product = build_product(st_.learned, dra_);
}

LearnResult learn_and_synthesize(Environment& env, const RabinAutomaton& dra, const RunConfig& cfg,
                                 const RunHooks& hooks) {
  Learner learner(env, dra, cfg, hooks);
  learner.run();
  return learner.result();
}

}  // namespace pacsyn
