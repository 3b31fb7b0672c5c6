#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pacsyn/product.hpp"
#include "pacsyn/transition_system.hpp"

namespace pacsyn {

/// values(v, t) for t = 0..horizon, stored one horizon slice after another.
class ValueTable {
 public:
  ValueTable() = default;
  ValueTable(std::size_t num_states, std::size_t horizon)
      : n_(num_states), horizon_(horizon), data_(num_states * (horizon + 1), 0.0) {}

  std::size_t num_states() const { return n_; }
  std::size_t horizon() const { return horizon_; }
  double operator()(StateId v, std::size_t t) const { return data_[t * n_ + v]; }
  std::span<const double> at(std::size_t t) const { return {data_.data() + t * n_, n_}; }
  std::span<double> at(std::size_t t) { return {data_.data() + t * n_, n_}; }
  std::span<const double> final() const { return at(horizon_); }

 private:
  std::size_t n_ = 0;
  std::size_t horizon_ = 0;
  std::vector<double> data_;
};

/// Fixpoint stopping rule shared by the unbounded solvers.
inline constexpr double kResidualTolerance = 1e-12;
/// Argmax ties: actions within this much of the best are considered equal.
inline constexpr double kTieTolerance = 1e-12;

/// h^{<=t}(v, target) for t = 0..horizon, target states absorbing.
ValueTable bounded_hit(const MarkovChain& chain, const StateSet& target, std::size_t horizon);

/// h(v, target). States that cannot reach the target get exactly 0, states
/// that reach it almost surely exactly 1; the rest by value iteration.
/// Throws ConvergenceError after 100 * |V| sweeps without convergence.
std::vector<double> unbounded_hit(const MarkovChain& chain, const StateSet& target);

struct BoundedSolution {
  ValueTable values;
  /// Greedy on values(., T - 1). Actions tied there are compared on
  /// values(., t) for t = T - 2 down to 0 until one is ahead; lowest index last.
  MemorylessPolicy policy;
};

/// U*(v, t) by Bellman backups. Throws DomainError if horizon == 0.
BoundedSolution optimal_bounded(const TransitionSystem& system, const StateSet& target,
                                std::size_t horizon);
BoundedSolution optimal_bounded(const ProductMdp& p, const StateSet& target, std::size_t horizon);

ValueTable policy_bounded_value(const TransitionSystem& system, const MemorylessPolicy& f,
                                const StateSet& target, std::size_t horizon);
ValueTable policy_bounded_value(const ProductMdp& p, const MemorylessPolicy& f,
                                const StateSet& target, std::size_t horizon);

struct UnboundedSolution {
  std::vector<double> values;
  /// Optimal and making progress towards the target; lowest index among
  /// equally good progressing actions.
  MemorylessPolicy policy;
};

/// Maximal probability of eventually reaching `target`.
UnboundedSolution optimal_unbounded(const TransitionSystem& system, const StateSet& target);

struct MixingReport {
  /// First t with d(t) <= epsilon; empty if not reached within the cap.
  std::optional<std::size_t> t_mix;
  /// d(t) = max_v |U^f(v, t) - U^f(v)| for t = 0..cap.
  std::vector<double> d_curve;
};

/// Throws DomainError unless 0 < epsilon < 1.
MixingReport mixing_time(const TransitionSystem& system, const MemorylessPolicy& f,
                         const StateSet& target, double epsilon, std::size_t cap);
MixingReport mixing_time(const MarkovChain& chain, const StateSet& target, double epsilon,
                         std::size_t cap);

}  // namespace pacsyn
