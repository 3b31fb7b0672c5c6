#include "pacsyn/estimation.hpp"

#include <cmath>

#include "json_support.hpp"
#include "pacsyn/kernels.hpp"

namespace pacsyn {

ModelShape shape_of(const LabeledMdp& m) {
  ModelShape s{m.state_names(), m.action_names(), m.initial(), m.propositions(), m.labels(), {}};
  for (StateId q = 0; q < m.num_states(); ++q) s.enabled.push_back(m.kernel().enabled_actions(q));
  return s;
}

BeliefCounts::BeliefCounts(std::size_t num_states, std::size_t num_actions)
    : n_(num_states),
      a_(num_actions),
      counts_(num_states * num_actions * num_states, 0),
      totals_(num_states * num_actions, 0) {}

void BeliefCounts::check(StateId q, ActionId a, StateId next) const {
  if (q >= n_ || next >= n_ || a >= a_) throw DomainError("observation index out of range");
}

void BeliefCounts::update(StateId q, ActionId a, StateId next) { add(q, a, next, 1); }

void BeliefCounts::add(StateId q, ActionId a, StateId next, std::uint32_t count) {
  check(q, a, next);
  counts_[slot(q, a) * n_ + next] += count;
  totals_[slot(q, a)] += count;
}

std::vector<std::pair<StateId, std::uint32_t>> BeliefCounts::successors(StateId q,
                                                                        ActionId a) const {
  std::vector<std::pair<StateId, std::uint32_t>> out;
  const std::uint32_t* r = row(q, a);
  for (StateId t = 0; t < n_; ++t) {
    if (r[t] != 0) out.emplace_back(t, r[t]);
  }
  return out;
}

Estimate mle(const BeliefCounts& b, StateId q, ActionId a) {
  const std::uint64_t total = b.total(q, a);
  if (total == 0) {
    throw NoDataError("no observations for state " + std::to_string(q) + ", action " +
                      std::to_string(a));
  }
  Estimate e{std::vector<double>(b.num_states()), std::vector<double>(b.num_states())};
  kernels::active().mle_moments(b.row(q, a), b.num_states(), total, e.mean.data(),
                                e.variance.data());
  return e;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile probability must lie in (0, 1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = std::sqrt(-std::log(q < 0 ? p : 1.0 - p));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0 ? -x : x;
}

std::uint64_t default_visit_floor(double epsilon, double delta, std::size_t horizon,
                                  std::size_t n_states, std::size_t n_actions,
                                  std::uint64_t cap) {
  const double scale = static_cast<double>(n_states) * static_cast<double>(horizon) / epsilon;
  const double m = std::ceil(scale * scale *
                             std::log(4.0 * static_cast<double>(n_states) *
                                      static_cast<double>(n_actions) / delta) /
                             2.0);
  if (!(m < static_cast<double>(cap))) return std::max<std::uint64_t>(cap, 2);
  return std::max<std::uint64_t>(static_cast<std::uint64_t>(m), 2);
}

ConfidenceParams make_confidence(double epsilon, double delta, std::size_t horizon,
                                 std::size_t n_states, std::size_t n_actions,
                                 std::optional<std::uint64_t> m_min, std::uint64_t cap) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (horizon == 0) throw ConfigError("horizon must be at least 1");
  if (n_states == 0 || n_actions == 0) throw ConfigError("model has no states or actions");
  if (m_min && *m_min < 2) throw ConfigError("visit floor must be at least 2");
  ConfidenceParams c;
  c.epsilon = epsilon;
  c.delta = delta;
  c.horizon = horizon;
  c.n_states = n_states;
  c.k = normal_quantile(1.0 - delta / 2.0);
  c.m_min = m_min ? *m_min : default_visit_floor(epsilon, delta, horizon, n_states, n_actions, cap);
  return c;
}

bool is_known_transition(const BeliefCounts& b, StateId q, ActionId a, StateId next,
                         const ConfidenceParams& c) {
  const std::uint64_t total = b.total(q, a);
  if (total == 0) throw NoDataError("no observations for the queried row");
  if (total < c.m_min) return false;
  const double t = static_cast<double>(total);
  const double n = b.count(q, a, next);
  const double var = (n * (t - n)) / ((t * t) * (t + 1.0));
  return var * c.k <= c.threshold();
}

bool is_known_state(const BeliefCounts& b, const std::vector<ActionId>& enabled, StateId q,
                    const ConfidenceParams& c) {
  if (enabled.empty()) return false;
  for (ActionId a : enabled) {
    const std::uint64_t total = b.total(q, a);
    if (total == 0 || total < c.m_min) return false;
    const double var = kernels::active().max_mle_variance(b.row(q, a), b.num_states(), total);
    if (!(var * c.k <= c.threshold())) return false;
  }
  return true;
}

StateSet KnownSet::lifted(std::size_t num_automaton_states) const {
  StateSet out(states.size() * num_automaton_states, 0);
  for (std::size_t q = 0; q < states.size(); ++q) {
    for (std::size_t s = 0; s < num_automaton_states; ++s) {
      out[q * num_automaton_states + s] = states[q];
    }
  }
  return out;
}

KnownSet known_states(const BeliefCounts& b, const ModelShape& shape, const ConfidenceParams& c) {
  KnownSet h{StateSet(shape.num_states(), 0)};
  for (StateId q = 0; q < shape.num_states(); ++q) {
    h.states[q] = is_known_state(b, shape.enabled[q], q, c);
  }
  return h;
}

LabeledMdp learned_mdp(const BeliefCounts& b, const ModelShape& shape) {
  TransitionSystem::Builder builder(shape.num_states(), shape.num_actions());
  for (StateId q = 0; q < shape.num_states(); ++q) {
    for (ActionId a : shape.enabled[q]) {
      const std::uint64_t total = b.total(q, a);
      if (total == 0) {
        builder.add(q, a, q, 1.0);
        continue;
      }
      const double t = static_cast<double>(total);
      for (const auto& [next, n] : b.successors(q, a)) builder.add(q, a, next, n / t);
    }
  }
  return LabeledMdp(shape.states, shape.actions, shape.initial, shape.propositions, shape.labels,
                    std::move(builder).build());
}

KnownProductMdp known_product(const ProductMdp& p, const StateSet& known) {
  const std::size_t n = p.num_states();
  if (known.size() != n) throw DomainError("known set does not match the product");
  KnownProductMdp out;
  out.local.assign(n, -1);
  for (StateId v = 0; v < n; ++v) {
    if (!known[v]) continue;
    out.local[v] = static_cast<std::int64_t>(out.product_state.size());
    out.product_state.push_back(v);
  }
  const std::size_t m = out.product_state.size() + 1;
  out.sink = static_cast<StateId>(m - 1);
  const TransitionSystem& sys = p.system();
  TransitionSystem::Builder builder(m, sys.num_actions());
  for (StateId i = 0; i + 1 < m; ++i) {
    const StateId v = out.product_state[i];
    for (ActionId a = 0; a < sys.num_actions(); ++a) {
      const RowView r = sys.row(v, a);
      double lost = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) {
        const std::int64_t t = out.local[r.targets[j]];
        if (t >= 0) {
          builder.add(i, a, static_cast<StateId>(t), r.probs[j]);
        } else {
          lost += r.probs[j];
        }
      }
      if (lost > 0.0) builder.add(i, a, out.sink, lost);
    }
  }
  for (ActionId a = 0; a < sys.num_actions(); ++a) builder.add(out.sink, a, out.sink, 1.0);
  out.system = std::move(builder).build();
  out.initial = out.local[p.initial()] >= 0 ? static_cast<StateId>(out.local[p.initial()]) : out.sink;
  for (const RabinPair& pair : p.pairs()) {
    RabinPair r{StateSet(m, 0), StateSet(m, 0)};
    for (StateId i = 0; i + 1 < m; ++i) {
      r.finite[i] = pair.finite[out.product_state[i]];
      r.infinite[i] = pair.infinite[out.product_state[i]];
    }
    if (count(r.infinite) != 0) out.pairs.push_back(std::move(r));
  }
  RabinPair sink_pair{StateSet(m, 0), StateSet(m, 0)};
  sink_pair.infinite[out.sink] = 1;
  out.pairs.push_back(std::move(sink_pair));
  return out;
}

std::string write_belief(const BeliefCounts& b, const ModelShape& shape) {
  nlohmann::json doc = nlohmann::json::object();
  for (StateId q = 0; q < shape.num_states(); ++q) {
    for (ActionId a = 0; a < shape.num_actions(); ++a) {
      const auto succ = b.successors(q, a);
      if (succ.empty()) continue;
      nlohmann::json row = nlohmann::json::array();
      for (const auto& [next, n] : succ) row.push_back({shape.states[next], n});
      doc[shape.states[q] + "|" + shape.actions[a]] = std::move(row);
    }
  }
  return doc.dump(2) + "\n";
}

BeliefCounts read_belief(std::string_view text, const ModelShape& shape) {
  const nlohmann::json doc = detail::parse_json(text);
  if (!doc.is_object()) throw ParseError("belief file must be a JSON object");
  auto state = [&](const std::string& name) {
    for (StateId q = 0; q < shape.num_states(); ++q) {
      if (shape.states[q] == name) return q;
    }
    throw ParseError("unknown state '" + name + "' in belief file");
  };
  BeliefCounts b(shape.num_states(), shape.num_actions());
  for (const auto& [key, row] : doc.items()) {
    const auto bar = key.rfind('|');
    if (bar == std::string::npos) throw ParseError("belief key '" + key + "' is not 'state|action'");
    const StateId q = state(key.substr(0, bar));
    const std::string action = key.substr(bar + 1);
    const auto it = std::find(shape.actions.begin(), shape.actions.end(), action);
    if (it == shape.actions.end()) throw ParseError("unknown action '" + action + "' in belief file");
    const auto a = static_cast<ActionId>(it - shape.actions.begin());
    if (!row.is_array()) throw ParseError("belief row '" + key + "' must be an array");
    for (const auto& entry : row) {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
          !entry[1].is_number_unsigned()) {
        throw ParseError("belief entry in '" + key + "' must be [successor, count]");
      }
      b.add(q, a, state(entry[0].get<std::string>()), entry[1].get<std::uint32_t>());
    }
  }
  return b;
}

}  // namespace pacsyn
