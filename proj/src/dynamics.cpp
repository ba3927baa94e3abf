#include "pace/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace pace {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool uses_normalized_values(const Variant& v) {
  return std::holds_alternative<variants::SetAside>(v);
}

double auction_value(const PaceState& s, std::size_t i, double v) {
  if (const auto* sa = std::get_if<variants::SetAside>(&s.variant)) return v / sa->monopolistic[i];
  return v;
}

/// Keys compared in the auction. For the multiplier-based PACE variants this
/// is B_i v_i / tracked_i, i.e. the bid divided by the round count, which
/// keeps the comparison independent of how many rounds have elapsed.
std::vector<ExtReal> auction_keys(const PaceState& s, std::span<const double> values) {
  const std::size_t n = s.agents();
  std::vector<ExtReal> keys(n);
  if (std::holds_alternative<variants::Proportional>(s.variant)) return keys;

  if (std::holds_alternative<variants::OneStepGreedy>(s.variant)) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = values[i];
      if (v <= 0.0)
        keys[i] = ExtReal::of(0.0);
      else if (s.utility[i] == 0.0)
        keys[i] = ExtReal::inf();
      else
        keys[i] = ExtReal::of(s.weights[i] * std::log1p(v / s.utility[i]));
    }
    return keys;
  }

  const bool projected = std::holds_alternative<variants::Constrained>(s.variant);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = auction_value(s, i, values[i]);
    if (s.round == 0 || projected) {
      keys[i] = s.multiplier[i].times(v);
    } else if (v <= 0.0) {
      keys[i] = ExtReal::of(0.0);
    } else if (s.tracked[i] == 0.0) {
      keys[i] = ExtReal::inf();
    } else {
      keys[i] = ExtReal::of(s.weights[i] * v / s.tracked[i]);
    }
  }
  return keys;
}

std::size_t first_argmax(const std::vector<ExtReal>& keys) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < keys.size(); ++i)
    if (keys[i] > keys[best]) best = i;
  return best;
}

void refresh_multipliers(PaceState& s) {
  const double tau = static_cast<double>(s.round);
  const auto* box = std::get_if<variants::Constrained>(&s.variant);
  for (std::size_t i = 0; i < s.agents(); ++i) {
    const double avg = s.tracked[i] / tau;
    if (box) {
      const double beta = avg > 0.0 ? s.weights[i] / avg : box->high[i];
      s.multiplier[i] = PacingMultiplier::of(std::clamp(beta, box->low[i], box->high[i]));
    } else if (avg > 0.0) {
      s.multiplier[i] = PacingMultiplier::of(s.weights[i] / avg);
    } else {
      s.multiplier[i] = PacingMultiplier::unserved();
    }
  }
}

}  // namespace

variants::Constrained variants::Constrained::around_weights(const AgentWeights& weights,
                                                            double delta0) {
  Constrained c;
  for (double b : weights.values()) {
    c.low.push_back(b / (1.0 + delta0));
    c.high.push_back(b * (1.0 + delta0));
  }
  return c;
}

std::string variant_name(const Variant& variant) {
  return std::visit(overloaded{
                        [](const variants::Unconstrained&) { return std::string("pace"); },
                        [](const variants::Constrained&) { return std::string("constrained"); },
                        [](const variants::Seeded&) { return std::string("seeded"); },
                        [](const variants::SetAside&) { return std::string("set-aside"); },
                        [](const variants::OneStepGreedy&) { return std::string("greedy"); },
                        [](const variants::Proportional&) { return std::string("proportional"); },
                    },
                    variant);
}

bool is_integral(const Variant& variant) {
  return !std::holds_alternative<variants::SetAside>(variant) &&
         !std::holds_alternative<variants::Proportional>(variant);
}

bool has_winner(const Variant& variant) {
  return !std::holds_alternative<variants::Proportional>(variant);
}

void validate_variant(const Variant& variant, std::size_t agents) {
  std::visit(overloaded{
                 [](const variants::Unconstrained&) {},
                 [](const variants::OneStepGreedy&) {},
                 [](const variants::Proportional&) {},
                 [&](const variants::Constrained& c) {
                   if (c.low.size() != agents || c.high.size() != agents)
                     throw InvalidArgument("constrained: one interval per agent required");
                   for (std::size_t i = 0; i < agents; ++i)
                     if (!(c.low[i] >= 0.0 && c.low[i] < c.high[i] && std::isfinite(c.high[i])))
                       throw InvalidArgument("constrained: need 0 <= low < high < inf at agent " +
                                             std::to_string(i + 1));
                 },
                 [](const variants::Seeded& s) {
                   if (!(s.xi > 0.0) || !std::isfinite(s.xi))
                     throw InvalidArgument("seeded: xi must be positive");
                 },
                 [&](const variants::SetAside& s) {
                   if (s.monopolistic.size() != agents)
                     throw InvalidArgument("set-aside: one monopolistic utility per agent required");
                   for (double w : s.monopolistic)
                     if (!(w > 0.0) || !std::isfinite(w))
                       throw InvalidArgument("set-aside: monopolistic utilities must be positive");
                 },
             },
             variant);
}

PaceState PaceState::initial(const AgentWeights& weights, const Variant& variant) {
  const std::size_t n = weights.size();
  if (n == 0) throw InvalidArgument("at least one agent required");
  validate_variant(variant, n);
  PaceState s;
  s.utility.assign(n, 0.0);
  s.tracked.assign(n, 0.0);
  if (const auto* seeded = std::get_if<variants::Seeded>(&variant))
    s.tracked.assign(n, seeded->xi);
  else if (std::holds_alternative<variants::SetAside>(variant))
    s.tracked.assign(n, 1.0 / (2.0 * static_cast<double>(n)));
  s.multiplier.assign(n, PacingMultiplier::of(1.0));
  s.variant = variant;
  s.weights = weights;
  return s;
}

std::vector<double> PaceState::tracked_average() const {
  std::vector<double> avg(tracked.size(), 0.0);
  if (round == 0) return avg;
  for (std::size_t i = 0; i < tracked.size(); ++i) avg[i] = tracked[i] / static_cast<double>(round);
  return avg;
}

std::vector<ExtReal> pace_bid(const PaceState& state, std::span<const double> values) {
  if (values.size() != state.agents()) throw InvalidArgument("value row has the wrong length");
  const std::size_t n = state.agents();
  if (std::holds_alternative<variants::OneStepGreedy>(state.variant))
    return auction_keys(state, values);
  std::vector<ExtReal> bids(n, ExtReal::of(0.0));
  if (std::holds_alternative<variants::Proportional>(state.variant)) return bids;
  for (std::size_t i = 0; i < n; ++i)
    bids[i] = state.multiplier[i].times(auction_value(state, i, values[i]));
  return bids;
}

StepOutcome advance(PaceState& s, std::span<const double> values) {
  const std::size_t n = s.agents();
  if (values.size() != n) throw InvalidArgument("value row has the wrong length");

  StepOutcome out;
  out.bids = pace_bid(s, values);
  out.allocation.assign(n, 0.0);
  out.expenditure.assign(n, ExtReal::of(0.0));
  out.utility.assign(n, 0.0);

  if (std::holds_alternative<variants::Proportional>(s.variant)) {
    const double total = s.weights.total();
    for (std::size_t i = 0; i < n; ++i) out.allocation[i] = s.weights[i] / total;
  } else {
    const std::size_t w = first_argmax(auction_keys(s, values));
    out.winner = w;
    out.expenditure[w] = s.multiplier[w].times(auction_value(s, w, values[w]));
    if (const auto* sa = std::get_if<variants::SetAside>(&s.variant)) {
      const double floor_share = 1.0 / (2.0 * static_cast<double>(n));
      for (std::size_t i = 0; i < n; ++i) out.allocation[i] = floor_share;
      out.allocation[w] += 0.5;
      s.tracked[w] += 0.5 * values[w] / sa->monopolistic[w];
    } else {
      out.allocation[w] = 1.0;
      if (std::holds_alternative<variants::Seeded>(s.variant)) s.tracked[w] += values[w];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    out.utility[i] = out.allocation[i] * values[i];
    s.utility[i] += out.utility[i];
  }
  if (!uses_normalized_values(s.variant) && !std::holds_alternative<variants::Seeded>(s.variant))
    s.tracked = s.utility;

  ++s.round;
  refresh_multipliers(s);
  return out;
}

std::pair<PaceState, StepOutcome> pace_step(const PaceState& state, std::span<const double> values) {
  PaceState next = state;
  StepOutcome outcome = advance(next, values);
  return {std::move(next), std::move(outcome)};
}

std::vector<double> RunTrace::allocation_row(std::size_t tau) const {
  std::vector<double> row(agents, 0.0);
  if (std::holds_alternative<variants::Proportional>(variant)) {
    const double total = weights.total();
    for (std::size_t i = 0; i < agents; ++i) row[i] = weights[i] / total;
    return row;
  }
  const std::uint32_t w = winners.at(tau);
  if (std::holds_alternative<variants::SetAside>(variant)) {
    for (double& x : row) x = 1.0 / (2.0 * static_cast<double>(agents));
    row[w] += 0.5;
  } else {
    row[w] = 1.0;
  }
  return row;
}

Allocation RunTrace::allocation() const {
  Allocation x(items, agents);
  for (std::size_t tau = 0; tau < items; ++tau) {
    const auto row = allocation_row(tau);
    for (std::size_t i = 0; i < agents; ++i) x(tau, i) = row[i];
  }
  return x;
}

RunTrace run(const ValueSequence& v, const AgentWeights& weights, const Variant& variant,
             const RunOptions& options) {
  require_valid(v, weights);
  const std::size_t n = v.agents();
  PaceState state = PaceState::initial(weights, variant);
  for (std::size_t k = 0; k < options.checkpoints.size(); ++k) {
    const std::size_t c = options.checkpoints[k];
    if (c == 0 || c > v.items() || (k > 0 && c <= options.checkpoints[k - 1]))
      throw InvalidArgument("checkpoints must be increasing rounds in [1, " + std::to_string(v.items()) + "]");
  }

  RunTrace trace;
  trace.variant = variant;
  trace.weights = weights;
  trace.items = v.items();
  trace.agents = n;
  trace.winners.reserve(v.items());
  trace.winner_spend.reserve(v.items());
  trace.cross.assign(n, std::vector<double>(n, 0.0));
  if (options.keep_rounds) trace.rounds.reserve(v.items());

  std::vector<ExtReal> spend(n, ExtReal::of(0.0));
  auto next_checkpoint = options.checkpoints.begin();

  for (std::size_t tau = 0; tau < v.items(); ++tau) {
    const auto row = v.row(tau);
    StepOutcome out = advance(state, row);

    if (out.winner) {
      const std::size_t w = *out.winner;
      trace.winners.push_back(static_cast<std::uint32_t>(w));
      trace.winner_spend.push_back(out.expenditure[w]);
      if (out.expenditure[w].infinite)
        spend[w] = ExtReal::inf();
      else if (!spend[w].infinite)
        spend[w].value += out.expenditure[w].value;
    } else {
      trace.winners.push_back(kNoWinner);
      trace.winner_spend.push_back(ExtReal::of(0.0));
    }

    if (out.winner && out.allocation[*out.winner] == 1.0) {
      for (std::size_t i = 0; i < n; ++i) trace.cross[i][*out.winner] += row[i];
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        const double share = out.allocation[k];
        for (std::size_t i = 0; i < n; ++i) trace.cross[i][k] += row[i] * share;
      }
    }

    while (next_checkpoint != options.checkpoints.end() && *next_checkpoint < tau + 1)
      ++next_checkpoint;
    if (next_checkpoint != options.checkpoints.end() && *next_checkpoint == tau + 1) {
      Checkpoint cp;
      cp.round = tau + 1;
      cp.average_utility.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        cp.average_utility[i] = state.utility[i] / static_cast<double>(tau + 1);
      for (const auto& m : state.multiplier) cp.multiplier.push_back(m.as_ext());
      cp.cumulative_expenditure = spend;
      cp.cross = trace.cross;
      trace.checkpoints.push_back(std::move(cp));
      ++next_checkpoint;
    }

    if (options.keep_rounds) trace.rounds.push_back(std::move(out));
  }

  trace.utility = state.utility;
  trace.average_utility.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    trace.average_utility[i] = state.utility[i] / static_cast<double>(v.items());
  for (const auto& m : state.multiplier) trace.multiplier.push_back(m.as_ext());
  return trace;
}

ValueSequence restrict_instance(const ValueSequence& v, const RunTrace& trace,
                                std::span<const std::size_t> agents) {
  if (agents.empty()) throw InvalidArgument("agent subset J is empty");
  if (trace.items != v.items() || trace.agents != v.agents())
    throw InvalidArgument("trace does not belong to this instance");
  if (!std::holds_alternative<variants::Unconstrained>(trace.variant))
    throw InvalidArgument("restrict_instance needs an unconstrained PACE trace");
  std::vector<std::size_t> keep(agents.begin(), agents.end());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.back() >= v.agents()) throw InvalidArgument("agent index out of range");

  std::vector<bool> in_subset(v.agents(), false);
  for (std::size_t i : keep) in_subset[i] = true;

  std::vector<double> data;
  std::size_t items = 0;
  for (std::size_t tau = 0; tau < v.items(); ++tau) {
    if (!in_subset[trace.winners[tau]]) continue;
    for (std::size_t i : keep) data.push_back(v(tau, i));
    ++items;
  }
  return ValueSequence(items, keep.size(), std::move(data));
}

variants::SetAside set_aside_exact(const ValueSequence& v) { return {v.column_sums()}; }

}  // namespace pace
