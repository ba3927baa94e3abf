#include "pace/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

namespace pace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_agents(std::size_t got, std::size_t want, const char* what) {
  if (got != want) throw InvalidArgument(std::string(what) + ": dimension mismatch");
}

}  // namespace

std::vector<double> regret(std::span<const double> average_utility,
                           std::span<const double> hindsight_average) {
  require_agents(average_utility.size(), hindsight_average.size(), "regret");
  std::vector<double> out(average_utility.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::max(hindsight_average[i] - average_utility[i], 0.0);
  return out;
}

std::vector<double> additive_envy(const CrossUtility& cross, std::size_t items,
                                  const AgentWeights& weights) {
  const std::size_t n = cross.size();
  require_agents(weights.size(), n, "additive_envy");
  if (items == 0) throw InvalidArgument("additive_envy: empty horizon");
  const double t = static_cast<double>(items);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = 0.0;
    for (std::size_t k = 0; k < n; ++k) best = std::max(best, cross[i][k] / t / weights[k]);
    out[i] = std::max(0.0, best - cross[i][i] / t / weights[i]);
  }
  return out;
}

std::vector<double> additive_envy(const ValueSequence& v, const Allocation& x,
                                  const AgentWeights& weights) {
  return additive_envy(cross_utility(v, x), v.items(), weights);
}

std::vector<double> multiplicative_envy(const CrossUtility& cross, const AgentWeights& weights) {
  const std::size_t n = cross.size();
  require_agents(weights.size(), n, "multiplicative_envy");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cross[i][i] > 0.0)) {
      out[i] = kInf;
      continue;
    }
    for (std::size_t k = 0; k < n; ++k)
      if (k != i)
        out[i] = std::max(out[i], weights[i] / weights[k] * (cross[i][k] / cross[i][i]));
  }
  return out;
}

std::vector<double> multiplicative_envy(const ValueSequence& v, const Allocation& x,
                                        const AgentWeights& weights) {
  return multiplicative_envy(cross_utility(v, x), weights);
}

double nash_welfare(std::span<const double> utility, const AgentWeights& weights) {
  require_agents(utility.size(), weights.size(), "nash_welfare");
  const double total = weights.total();
  double log_sum = 0.0;
  for (std::size_t i = 0; i < utility.size(); ++i) {
    if (!(utility[i] > 0.0)) return 0.0;
    log_sum += weights[i] / total * std::log(utility[i]);
  }
  return std::exp(log_sum);
}

double competitive_ratio(std::span<const double> utility, std::span<const double> hindsight,
                         const AgentWeights& weights) {
  require_agents(utility.size(), weights.size(), "competitive_ratio");
  require_agents(hindsight.size(), weights.size(), "competitive_ratio");
  const double total = weights.total();
  double log_sum = 0.0;
  for (std::size_t i = 0; i < utility.size(); ++i) {
    if (!(utility[i] > 0.0)) return kInf;
    log_sum += weights[i] / total * (std::log(hindsight[i]) - std::log(utility[i]));
  }
  return std::exp(log_sum);
}

double utility_ratio(const ValueSequence& v, std::span<const double> utility,
                     const AgentWeights& weights) {
  require_agents(utility.size(), v.agents(), "utility_ratio");
  require_agents(weights.size(), v.agents(), "utility_ratio");
  for (std::size_t i = 0; i < utility.size(); ++i)
    if (!(utility[i] > 0.0))
      throw InvalidArgument("utility_ratio: agent " + std::to_string(i + 1) + " has zero utility");
  const double total = weights.total();
  std::vector<double> scale(v.agents());
  for (std::size_t i = 0; i < scale.size(); ++i) scale[i] = weights[i] / (total * utility[i]);
  double sum = 0.0;
  for (std::size_t tau = 0; tau < v.items(); ++tau) {
    double best = 0.0;
    for (std::size_t i = 0; i < v.agents(); ++i) best = std::max(best, scale[i] * v(tau, i));
    sum += best;
  }
  return sum;
}

double utility_ratio_seeded(const ValueSequence& v, std::span<const double> utility,
                            const AgentWeights& weights, double xi) {
  require_agents(utility.size(), v.agents(), "utility_ratio_seeded");
  require_agents(weights.size(), v.agents(), "utility_ratio_seeded");
  if (!(xi > 0.0)) throw InvalidArgument("utility_ratio_seeded: xi must be positive");
  std::vector<double> scale(v.agents());
  double sum = 0.0;
  for (std::size_t i = 0; i < scale.size(); ++i) {
    scale[i] = weights[i] / (utility[i] + xi);
    sum += scale[i] * xi;
  }
  for (std::size_t tau = 0; tau < v.items(); ++tau) {
    double best = 0.0;
    for (std::size_t i = 0; i < v.agents(); ++i) best = std::max(best, scale[i] * v(tau, i));
    sum += best;
  }
  return sum;
}

ExpenditureDeviation expenditure_deviation(const RunTrace& trace, std::size_t warmup) {
  if (!has_winner(trace.variant))
    throw InvalidArgument("expenditure_deviation: the variant has no auction");
  if (warmup >= trace.items) throw InvalidArgument("expenditure_deviation: warm-up must be < t");
  std::vector<double> spend(trace.agents, 0.0);
  ExpenditureDeviation out;
  for (std::size_t tau = warmup; tau < trace.items; ++tau) {
    const ExtReal& b = trace.winner_spend[tau];
    if (b.infinite) {
      out.flagged = true;
      out.value = kInf;
      return out;
    }
    spend[trace.winners[tau]] += b.value;
  }
  const double t = static_cast<double>(trace.items);
  for (std::size_t i = 0; i < trace.agents; ++i) {
    const double d = spend[i] / t - trace.weights[i];
    out.value += d * d;
  }
  return out;
}

std::vector<TrajectoryRow> relative_regret_trajectory(const RunTrace& trace,
                                                      std::span<const PrefixSolution> prefixes) {
  if (prefixes.size() != trace.checkpoints.size())
    throw InvalidArgument("relative_regret_trajectory: one prefix solution per checkpoint required");
  std::vector<TrajectoryRow> rows;
  for (std::size_t c = 0; c < prefixes.size(); ++c) {
    const Checkpoint& cp = trace.checkpoints[c];
    const PrefixSolution& ps = prefixes[c];
    if (cp.round != ps.round)
      throw InvalidArgument("relative_regret_trajectory: checkpoint rounds differ");
    TrajectoryRow row;
    row.round = cp.round;
    row.per_agent.assign(trace.agents, 0.0);
    row.excluded.assign(trace.agents, false);
    double sum = 0.0;
    for (std::size_t i = 0; i < trace.agents; ++i) {
      const double best = ps.average_utility[i];
      if (ps.flagged[i] || best < 1e-12) {
        row.excluded[i] = true;
        ++row.excluded_count;
        continue;
      }
      row.per_agent[i] = std::max(best - cp.average_utility[i], 0.0) / best;
      row.max = std::max(row.max, row.per_agent[i]);
      sum += row.per_agent[i];
    }
    const std::size_t counted = trace.agents - row.excluded_count;
    row.mean = counted ? sum / static_cast<double>(counted) : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

MetricsReport evaluate_run(const ValueSequence& v, const RunTrace& trace,
                           const EvaluationInputs& inputs) {
  if (trace.items != v.items() || trace.agents != v.agents())
    throw InvalidArgument("evaluate_run: trace does not belong to this instance");
  const std::size_t n = v.agents();
  const double t = static_cast<double>(v.items());
  require_agents(inputs.hindsight_average.size(), n, "evaluate_run");

  MetricsReport r;
  r.variant = variant_name(trace.variant);
  r.items = v.items();
  r.utility = trace.utility;
  r.hindsight_utility.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.hindsight_utility[i] = inputs.hindsight_average[i] * t;

  r.regret = regret(trace.average_utility, inputs.hindsight_average);
  r.additive_envy = additive_envy(trace.cross, trace.items, trace.weights);
  r.multiplicative_envy = multiplicative_envy(trace.cross, trace.weights);
  r.nash_welfare = nash_welfare(trace.utility, trace.weights);
  r.competitive_ratio = competitive_ratio(trace.utility, r.hindsight_utility, trace.weights);

  bool starved = false;
  for (std::size_t i = 0; i < n; ++i)
    if (!(trace.utility[i] > 0.0)) {
      starved = true;
      r.flags.push_back("agent " + std::to_string(i + 1) +
                        " has zero utility: multiplicative envy, CR and R are infinite");
    }
  r.utility_ratio = starved ? kInf : utility_ratio(v, trace.utility, trace.weights);

  std::optional<double> xi = inputs.seed;
  if (!xi)
    if (const auto* s = std::get_if<variants::Seeded>(&trace.variant)) xi = s->xi;
  if (xi) r.utility_ratio_seeded = utility_ratio_seeded(v, trace.utility, trace.weights, *xi);

  if (inputs.warmup && has_winner(trace.variant)) {
    r.expenditure_deviation = expenditure_deviation(trace, *inputs.warmup);
    if (r.expenditure_deviation->flagged)
      r.flags.push_back("infinite expenditure after the warm-up window");
  }

  if (!inputs.prefixes.empty()) {
    r.trajectory = relative_regret_trajectory(trace, inputs.prefixes);
    for (const auto& row : r.trajectory)
      if (row.excluded_count)
        r.flags.push_back("round " + std::to_string(row.round) + ": " +
                          std::to_string(row.excluded_count) +
                          " agent(s) with zero hindsight utility excluded");
  }
  return r;
}

}  // namespace pace
