#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pacsyn/estimation.hpp"
#include "pacsyn/product.hpp"
#include "pacsyn/rabin.hpp"

namespace pacsyn {

/// The system being learned. The learner sees states and its own actions,
/// never transition probabilities.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const ModelShape& shape() const = 0;
  virtual StateId current_state() const = 0;
  /// Samples the successor of the current state under `action`.
  virtual StateId step(ActionId action) = 0;
  virtual void reset(StateId q) = 0;
  virtual bool supports_reset() const = 0;

  /// Opaque sampler state for checkpoints; empty if not supported.
  virtual std::string save_state() const { return {}; }
  virtual void restore_state(std::string_view) {
    throw ConfigError("environment does not support checkpoints");
  }
};

/// Samples from a known model with its own seeded stream.
class SimulatedEnvironment : public Environment {
 public:
  SimulatedEnvironment(LabeledMdp truth, std::uint64_t seed);

  const ModelShape& shape() const override { return shape_; }
  StateId current_state() const override { return state_; }
  StateId step(ActionId action) override;
  void reset(StateId q) override;
  bool supports_reset() const override { return true; }
  std::string save_state() const override;
  void restore_state(std::string_view text) override;

  const LabeledMdp& truth() const { return truth_; }

 private:
  LabeledMdp truth_;
  ModelShape shape_;
  std::mt19937_64 rng_;
  StateId state_;
};

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct RunConfig {
  double epsilon = 0.05;
  double delta = 0.05;
  std::size_t horizon = 15;
  double restart_prob = 0.1;
  std::optional<std::uint64_t> m_min;
  std::uint64_t visit_cap = kDefaultVisitCap;
  /// Default: 10 |Q| |actions| times the visits one row needs to be
  /// certified, times ceil(|Q| / restart_prob) when restarts are on.
  std::optional<std::uint64_t> max_steps;
  std::uint64_t seed = 0;
};

struct LearnerState {
  BeliefCounts belief;
  KnownSet known;
  LabeledMdp learned;
  ProductMdp product;
  /// Policy over the product from the last recompute; meaningful where `defined`.
  std::vector<ActionId> policy;
  /// H x S at the last recompute.
  StateSet defined;
  /// Accepting end states of the learned product at the last recompute.
  StateSet accepting;
  StateId mdp_state = 0;
  StateId automaton_state = 0;
  std::uint64_t step = 0;
  std::size_t update_count = 0;
  bool recompute = true;
  std::uint64_t restarts = 0;
};

struct LogRow {
  std::uint64_t step = 0;
  std::size_t known_count = 0;
  bool recompute = false;
  std::vector<double> probes;
  double wall_seconds = 0.0;
};

struct RunLog {
  std::vector<std::string> probe_names;
  std::vector<LogRow> rows;
  /// Wall time makes logs differ between identical runs, so it is opt-in.
  bool with_wall_time = false;
};

/// CSV with columns step, known_count, recompute_flag, probes..., [wall_time].
std::string run_log_csv(const RunLog& log);

struct RunHooks {
  /// Probe values for a policy over the product (harness evaluator).
  std::function<std::vector<double>(const ProductMdp&, const MemorylessPolicy&)> probe;
  std::vector<std::string> probe_names;
  /// Adds a log row every this many steps (0: only at recomputes).
  std::uint64_t checkpoint_every = 0;
  std::function<void(const LearnerState&)> on_recompute;
  bool wall_time = false;
};

struct LearnResult {
  FiniteMemoryPolicy policy;
  /// The same policy over the final learned product.
  MemorylessPolicy product_policy;
  ProductMdp product;
  RunLog log;
  /// True if max_steps ran out before every state was known.
  bool partial = false;
  std::uint64_t steps = 0;
  std::size_t updates = 0;
  std::uint64_t restarts = 0;
};

/// Algorithm 1, resumable.
class Learner {
 public:
  /// Throws ConfigError on invalid parameters, a shape the automaton cannot
  /// read, or restarts requested from an environment that cannot reset.
  Learner(Environment& env, const RabinAutomaton& dra, RunConfig cfg, RunHooks hooks = {});

  /// Runs until termination, or until `budget` more steps have been taken.
  /// Returns true once finished.
  bool run(std::optional<std::uint64_t> budget = std::nullopt);
  bool finished() const { return finished_; }

  const LearnerState& state() const { return st_; }
  const ConfidenceParams& confidence() const { return conf_; }
  std::uint64_t max_steps() const { return max_steps_; }
  const RunLog& log() const { return log_; }

  /// Current policy over the product; states outside H x S get the
  /// balanced-wandering choice.
  MemorylessPolicy snapshot_policy() const;
  /// Least-tried enabled action at q, lowest index on ties.
  ActionId balanced_action(StateId q) const;

  LearnResult result() const;

  /// Loop state (everything except the belief) as JSON.
  std::string save_loop_state() const;
  std::string save_belief() const;
  void restore(std::string_view belief, std::string_view loop_state);

 private:
  void recompute();
  void add_row(bool recompute);
  void maybe_restart(ActionId action);
  StateId product_state() const {
    return st_.product.index(st_.mdp_state, st_.automaton_state);
  }

  Environment& env_;
  RabinAutomaton dra_;
  RunConfig cfg_;
  RunHooks hooks_;
  ModelShape shape_;
  std::vector<Letter> letters_;
  ConfidenceParams conf_;
  std::uint64_t max_steps_ = 0;
  std::mt19937_64 rng_;
  LearnerState st_;
  /// Belief the learned model was built from.
  BeliefCounts snapshot_belief_;
  RunLog log_;
  bool finished_ = false;
  bool partial_ = false;
  double started_ = 0.0;
};

LearnResult learn_and_synthesize(Environment& env, const RabinAutomaton& dra, const RunConfig& cfg,
                                 const RunHooks& hooks = {});

}  // namespace pacsyn
