#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pacsyn/labeled_mdp.hpp"
#include "pacsyn/product.hpp"

namespace pacsyn {

/// Everything about a model except its transition probabilities: what the
/// learner is given up front.
struct ModelShape {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  StateId initial = 0;
  std::vector<std::string> propositions;
  std::vector<Letter> labels;
  /// Enabled actions per state, ascending.
  std::vector<std::vector<ActionId>> enabled;

  std::size_t num_states() const { return states.size(); }
  std::size_t num_actions() const { return actions.size(); }
};

ModelShape shape_of(const LabeledMdp& m);

/// Observation counts theta_{q,a}(q'), stored densely.
class BeliefCounts {
 public:
  BeliefCounts() = default;
  BeliefCounts(std::size_t num_states, std::size_t num_actions);

  std::size_t num_states() const { return n_; }
  std::size_t num_actions() const { return a_; }

  void update(StateId q, ActionId a, StateId next);
  /// Adds `count` observations at once (checkpoint restore).
  void add(StateId q, ActionId a, StateId next, std::uint32_t count);

  std::uint32_t count(StateId q, ActionId a, StateId next) const {
    return counts_[slot(q, a) * n_ + next];
  }
  std::uint64_t total(StateId q, ActionId a) const { return totals_[slot(q, a)]; }
  /// Dense count vector over all states.
  const std::uint32_t* row(StateId q, ActionId a) const { return counts_.data() + slot(q, a) * n_; }
  /// Observed successors with their counts, ascending.
  std::vector<std::pair<StateId, std::uint32_t>> successors(StateId q, ActionId a) const;

  bool operator==(const BeliefCounts&) const = default;

 private:
  std::size_t slot(StateId q, ActionId a) const { return static_cast<std::size_t>(q) * a_ + a; }
  void check(StateId q, ActionId a, StateId next) const;

  std::size_t n_ = 0;
  std::size_t a_ = 0;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint64_t> totals_;
};

struct Estimate {
  std::vector<double> mean;
  std::vector<double> variance;
};

/// Maximum-likelihood mean and variance of row (q, a). Throws NoDataError
/// when the row has no observations.
Estimate mle(const BeliefCounts& b, StateId q, ActionId a);

/// Inverse standard normal CDF (Wichura, AS 241). Throws DomainError outside (0, 1).
double normal_quantile(double p);

struct ConfidenceParams {
  double epsilon = 0.05;
  double delta = 0.05;
  std::size_t horizon = 1;
  std::size_t n_states = 1;
  /// Two-sided critical value for the 1 - delta interval.
  double k = 0.0;
  /// Visits required per (q, a) before any of its transitions is certified.
  std::uint64_t m_min = 2;

  /// alpha = epsilon / (N T).
  double threshold() const {
    return epsilon / (static_cast<double>(n_states) * static_cast<double>(horizon));
  }
};

inline constexpr std::uint64_t kDefaultVisitCap = 1'000'000;

/// ceil((N T / epsilon)^2 ln(4 N |actions| / delta) / 2), at least 2, at most `cap`.
std::uint64_t default_visit_floor(double epsilon, double delta, std::size_t horizon,
                                  std::size_t n_states, std::size_t n_actions,
                                  std::uint64_t cap = kDefaultVisitCap);

/// Validates the ranges and fills k and, unless given, m_min.
ConfidenceParams make_confidence(double epsilon, double delta, std::size_t horizon,
                                 std::size_t n_states, std::size_t n_actions,
                                 std::optional<std::uint64_t> m_min = std::nullopt,
                                 std::uint64_t cap = kDefaultVisitCap);

/// Var(q') k <= epsilon / (N T) and total(q, a) >= m_min. Throws NoDataError
/// when the row has no observations.
bool is_known_transition(const BeliefCounts& b, StateId q, ActionId a, StateId next,
                         const ConfidenceParams& c);

/// Every enabled action at q has enough visits and every observed successor passes the test.
bool is_known_state(const BeliefCounts& b, const std::vector<ActionId>& enabled, StateId q,
                    const ConfidenceParams& c);

struct KnownSet {
  /// H over Q.
  StateSet states;

  std::size_t size() const { return count(states); }
  bool contains(StateId q) const { return states[q] != 0; }
  /// H x S under the product encoding q * |S| + s.
  StateSet lifted(std::size_t num_automaton_states) const;
  bool operator==(const KnownSet&) const = default;
};

KnownSet known_states(const BeliefCounts& b, const ModelShape& shape, const ConfidenceParams& c);

/// MLE model: observed rows become their means, enabled rows without data
/// become probability-one self-loops, disabled rows stay empty.
LabeledMdp learned_mdp(const BeliefCounts& b, const ModelShape& shape);

/// Product restricted to the known states, with all other mass sent to an
/// absorbing, accepting sink.
struct KnownProductMdp {
  TransitionSystem system;
  /// Restricted pairs with empty K dropped, followed by (empty, {sink}).
  std::vector<RabinPair> pairs;
  StateId initial = 0;
  StateId sink = 0;
  /// Product state of each local state except the sink.
  std::vector<StateId> product_state;
  /// Local index of each product state, -1 outside H x S.
  std::vector<std::int64_t> local;

  std::size_t num_states() const { return system.num_states(); }
};

KnownProductMdp known_product(const ProductMdp& p, const StateSet& known_product_states);

/// Belief checkpoint: {"q|a": [[successor, count], ...]} with names.
std::string write_belief(const BeliefCounts& b, const ModelShape& shape);
BeliefCounts read_belief(std::string_view text, const ModelShape& shape);

}  // namespace pacsyn
