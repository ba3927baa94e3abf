#include "pace/inputs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "pace/rng.hpp"

namespace pace {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_row(const std::vector<double>& row, std::size_t n, const char* what) {
  if (row.size() != n) throw InvalidArgument(std::string(what) + ": value vectors differ in length");
  for (double x : row)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw InvalidArgument(std::string(what) + ": values must be finite and nonnegative");
}

void check_probs(const std::vector<double>& probs, const char* what) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument(std::string(what) + ": bad probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidArgument(std::string(what) + ": probabilities must sum to 1");
}

using Histogram = std::map<std::vector<double>, double>;

void accumulate(Histogram& h, const FiniteDistribution& d, double weight) {
  for (std::size_t j = 0; j < d.support.size(); ++j)
    if (d.probs[j] > 0.0) h[d.support[j]] += weight * d.probs[j];
}

double tv(const Histogram& p, const Histogram& q) {
  double total = 0.0;
  auto a = p.begin();
  auto b = q.begin();
  while (a != p.end() || b != q.end()) {
    if (b == q.end() || (a != p.end() && a->first < b->first)) {
      total += a->second;
      ++a;
    } else if (a == p.end() || b->first < a->first) {
      total += b->second;
      ++b;
    } else {
      total += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return 0.5 * total;
}

FiniteDistribution uniform_over(const std::vector<std::vector<double>>& pool) {
  FiniteDistribution d;
  d.support = pool;
  d.probs.assign(pool.size(), 1.0 / static_cast<double>(pool.size()));
  return d;
}

bool corrupted_round(double fraction, std::size_t tau1) {
  const double t = static_cast<double>(tau1);
  return std::floor(t * fraction) > std::floor((t - 1.0) * fraction);
}

/// Per-round distributions grouped as (count, distribution).
std::vector<std::pair<double, FiniteDistribution>> round_groups(const InputModelSpec& spec) {
  std::vector<std::pair<double, FiniteDistribution>> groups;
  std::visit(overloaded{
                 [&](const models::Iid& m) {
                   groups.push_back({static_cast<double>(spec.t), m.dist});
                 },
                 [&](const models::Periodic& m) {
                   const std::size_t q = m.pools.size();
                   for (std::size_t k = 0; k < q; ++k) {
                     const std::size_t count = spec.t / q + (k < spec.t % q ? 1 : 0);
                     if (count) groups.push_back({static_cast<double>(count), uniform_over(m.pools[k])});
                   }
                 },
                 [&](const models::Block& m) {
                   for (std::size_t k = 0; k < m.lengths.size(); ++k)
                     groups.push_back({static_cast<double>(m.lengths[k]), m.dists[k]});
                 },
                 [&](const models::Corrupted& m) {
                   std::size_t bad = 0;
                   for (std::size_t tau = 1; tau <= spec.t; ++tau) bad += corrupted_round(m.fraction, tau);
                   if (spec.t > bad) groups.push_back({static_cast<double>(spec.t - bad), m.base});
                   if (bad) groups.push_back({static_cast<double>(bad), m.corruption});
                 },
                 [&](const models::Ergodic&) {
                   throw InvalidArgument(
                       "empirical_tv_delta: undefined for the Markov model (use ergodic_deviation)");
                 },
             },
             spec.model);
  return groups;
}

std::vector<std::size_t> largest_remainder(const std::vector<double>& probs, std::size_t total) {
  std::vector<std::size_t> counts(probs.size());
  std::vector<std::pair<double, std::size_t>> rest;
  std::size_t used = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const double exact = probs[j] * static_cast<double>(total);
    counts[j] = static_cast<std::size_t>(std::floor(exact));
    used += counts[j];
    rest.push_back({exact - std::floor(exact), j});
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; used < total; ++r, ++used) counts[rest[r % rest.size()].second]++;
  while (used > total) {
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --used;
  }
  return counts;
}

void require_reach(const std::vector<double>& reach, const char* what) {
  for (std::size_t i = 0; i < reach.size(); ++i)
    if (!(reach[i] > 0.0))
      throw InvalidArgument(std::string(what) + ": agent " + std::to_string(i + 1) + " never has positive value");
}

}  // namespace

std::vector<double> FiniteDistribution::mean() const {
  std::vector<double> m(agents(), 0.0);
  for (std::size_t j = 0; j < support.size(); ++j)
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += probs[j] * support[j][i];
  return m;
}

void FiniteDistribution::validate(bool require_positive_mean) const {
  if (support.empty() || support.size() != probs.size())
    throw InvalidArgument("distribution: support and probs must be nonempty and equal length");
  const std::size_t n = agents();
  if (n == 0) throw InvalidArgument("distribution: value vectors are empty");
  std::vector<double> mean(n, 0.0);
  for (std::size_t j = 0; j < support.size(); ++j) {
    check_row(support[j], n, "distribution");
    for (std::size_t i = 0; i < n; ++i) mean[i] += probs[j] * support[j][i];
  }
  check_probs(probs, "distribution");
  if (!require_positive_mean) return;
  for (std::size_t i = 0; i < n; ++i)
    if (!(mean[i] > 0.0))
      throw InvalidArgument("distribution: agent " + std::to_string(i + 1) +
                            " has zero expected value");
}

std::string model_name(const InputModel& model) {
  return std::visit(overloaded{
                        [](const models::Iid&) { return std::string("iid"); },
                        [](const models::Periodic&) { return std::string("periodic"); },
                        [](const models::Block&) { return std::string("block"); },
                        [](const models::Ergodic&) { return std::string("ergodic"); },
                        [](const models::Corrupted&) { return std::string("corrupted"); },
                    },
                    model);
}

void validate_spec(const InputModelSpec& spec) {
  if (spec.t == 0) throw InvalidArgument("input model: t must be positive");
  std::visit(overloaded{
                 [](const models::Iid& m) { m.dist.validate(); },
                 [](const models::Periodic& m) {
                   if (m.pools.empty()) throw InvalidArgument("periodic: at least one pool required");
                   const std::size_t n = m.pools.front().empty() ? 0 : m.pools.front().front().size();
                   if (n == 0) throw InvalidArgument("periodic: pools must be nonempty");
                   std::vector<double> best(n, 0.0);
                   for (const auto& pool : m.pools) {
                     if (pool.empty()) throw InvalidArgument("periodic: pools must be nonempty");
                     for (const auto& row : pool) {
                       check_row(row, n, "periodic");
                       for (std::size_t i = 0; i < n; ++i) best[i] = std::max(best[i], row[i]);
                     }
                   }
                   for (std::size_t i = 0; i < n; ++i)
                     if (!(best[i] > 0.0))
                       throw InvalidArgument("periodic: agent " + std::to_string(i + 1) +
                                             " has no positive value in any pool");
                 },
                 [&](const models::Block& m) {
                   if (m.lengths.empty() || m.lengths.size() != m.dists.size())
                     throw InvalidArgument("block: one distribution per block required");
                   std::size_t total = 0;
                   std::vector<double> reach(m.dists.front().agents(), 0.0);
                   for (std::size_t k = 0; k < m.lengths.size(); ++k) {
                     if (m.lengths[k] == 0) throw InvalidArgument("block: empty block");
                     total += m.lengths[k];
                     m.dists[k].validate(false);
                     if (m.dists[k].agents() != reach.size())
                       throw InvalidArgument("block: distributions differ in agent count");
                     const auto mean = m.dists[k].mean();
                     for (std::size_t i = 0; i < reach.size(); ++i) reach[i] += mean[i];
                   }
                   if (total != spec.t) throw InvalidArgument("block: lengths must sum to t");
                   require_reach(reach, "block");
                 },
                 [](const models::Ergodic& m) {
                   const std::size_t s = m.states.size();
                   if (s == 0 || m.transition.size() != s)
                     throw InvalidArgument("ergodic: one transition row per state required");
                   if (m.initial >= s) throw InvalidArgument("ergodic: initial state out of range");
                   const std::size_t n = m.states.front().size();
                   if (n == 0) throw InvalidArgument("ergodic: value vectors are empty");
                   for (std::size_t k = 0; k < s; ++k) {
                     check_row(m.states[k], n, "ergodic");
                     if (m.transition[k].size() != s)
                       throw InvalidArgument("ergodic: transition matrix must be square");
                     check_probs(m.transition[k], "ergodic transition row");
                   }
                 },
                 [](const models::Corrupted& m) {
                   m.base.validate(false);
                   m.corruption.validate(false);
                   if (m.base.agents() != m.corruption.agents())
                     throw InvalidArgument("corrupted: distributions differ in agent count");
                   if (!(m.fraction >= 0.0 && m.fraction <= 1.0))
                     throw InvalidArgument("corrupted: fraction must lie in [0, 1]");
                   auto reach = m.base.mean();
                   const auto bad = m.corruption.mean();
                   for (std::size_t i = 0; i < reach.size(); ++i)
                     reach[i] = (m.fraction < 1.0 ? reach[i] : 0.0) + (m.fraction > 0.0 ? bad[i] : 0.0);
                   require_reach(reach, "corrupted");
                 },
             },
             spec.model);
}

ValueSequence gen(const InputModelSpec& spec) {
  validate_spec(spec);
  const std::size_t t = spec.t;
  std::vector<double> data;
  std::size_t n = 0;

  auto emit = [&](const std::vector<double>& row) { data.insert(data.end(), row.begin(), row.end()); };
  auto draw = [&](const FiniteDistribution& d, std::size_t tau) {
    Substream s(spec.seed, spec.repetition, tau);
    return sample_index(d.probs, s.uniform());
  };

  std::visit(overloaded{
                 [&](const models::Iid& m) {
                   n = m.dist.agents();
                   for (std::size_t tau = 0; tau < t; ++tau) emit(m.dist.support[draw(m.dist, tau)]);
                 },
                 [&](const models::Periodic& m) {
                   n = m.pools.front().front().size();
                   for (std::size_t tau = 0; tau < t; ++tau) {
                     const auto& pool = m.pools[tau % m.pools.size()];
                     Substream s(spec.seed, spec.repetition, tau);
                     emit(pool[s.below(pool.size())]);
                   }
                 },
                 [&](const models::Block& m) {
                   n = m.dists.front().agents();
                   std::size_t first = 0;
                   for (std::size_t k = 0; k < m.lengths.size(); ++k) {
                     const auto counts = largest_remainder(m.dists[k].probs, m.lengths[k]);
                     std::vector<std::size_t> bag;
                     for (std::size_t j = 0; j < counts.size(); ++j) bag.insert(bag.end(), counts[j], j);
                     Substream s(spec.seed, spec.repetition, first);
                     for (std::size_t r = bag.size(); r > 1; --r) std::swap(bag[r - 1], bag[s.below(r)]);
                     for (std::size_t j : bag) emit(m.dists[k].support[j]);
                     first += m.lengths[k];
                   }
                 },
                 [&](const models::Ergodic& m) {
                   n = m.states.front().size();
                   std::size_t state = m.initial;
                   for (std::size_t tau = 0; tau < t; ++tau) {
                     if (tau > 0) {
                       Substream s(spec.seed, spec.repetition, tau);
                       state = sample_index(m.transition[state], s.uniform());
                     }
                     emit(m.states[state]);
                   }
                 },
                 [&](const models::Corrupted& m) {
                   n = m.base.agents();
                   for (std::size_t tau = 0; tau < t; ++tau) {
                     const auto& d = corrupted_round(m.fraction, tau + 1) ? m.corruption : m.base;
                     emit(d.support[draw(d, tau)]);
                   }
                 },
             },
             spec.model);

  ValueSequence v(t, n, std::move(data));
  const auto report = validate_instance(v, AgentWeights::equal(n));
  if (!report)
    throw Error("generated instance is invalid (" + report.message + "); try a longer horizon");
  return v;
}

double tv_distance(const FiniteDistribution& p, const FiniteDistribution& q) {
  Histogram a, b;
  accumulate(a, p, 1.0);
  accumulate(b, q, 1.0);
  return tv(a, b);
}

double empirical_tv_delta(const InputModelSpec& spec) {
  validate_spec(spec);
  const auto groups = round_groups(spec);
  const double t = static_cast<double>(spec.t);
  Histogram average;
  for (const auto& [count, dist] : groups) accumulate(average, dist, count / t);
  double delta = 0.0;
  for (const auto& [count, dist] : groups) {
    Histogram h;
    accumulate(h, dist, 1.0);
    delta += count / t * tv(h, average);
  }
  return delta;
}

double ergodic_deviation(const models::Ergodic& chain, std::size_t t, std::size_t iota) {
  validate_spec({chain, t, 0, 0});
  if (iota == 0 || iota >= t) throw InvalidArgument("ergodic_deviation: need 1 <= iota < t");
  const std::size_t s = chain.states.size();
  auto step = [&](const std::vector<double>& mu) {
    std::vector<double> next(s, 0.0);
    for (std::size_t a = 0; a < s; ++a)
      if (mu[a] != 0.0)
        for (std::size_t b = 0; b < s; ++b) next[b] += mu[a] * chain.transition[a][b];
    return next;
  };
  auto to_values = [&](const std::vector<double>& mu) {
    Histogram h;
    for (std::size_t a = 0; a < s; ++a)
      if (mu[a] > 0.0) h[chain.states[a]] += mu[a];
    return h;
  };

  std::vector<double> mu(s, 0.0), average(s, 0.0);
  std::vector<bool> reachable(s, false);
  mu[chain.initial] = 1.0;
  for (std::size_t tau = 1; tau <= t; ++tau) {
    for (std::size_t a = 0; a < s; ++a) {
      average[a] += mu[a] / static_cast<double>(t);
      if (tau <= t - iota && mu[a] > 0.0) reachable[a] = true;
    }
    mu = step(mu);
  }
  const Histogram target = to_values(average);

  double worst = 0.0;
  for (std::size_t a = 0; a < s; ++a) {
    if (!reachable[a]) continue;
    std::vector<double> from(s, 0.0);
    from[a] = 1.0;
    for (std::size_t k = 0; k < iota; ++k) from = step(from);
    worst = std::max(worst, tv(to_values(from), target));
  }
  return worst;
}

namespace {

constexpr std::uint32_t kSupportStream = 0xFFFFFFFFu;

std::vector<double> random_vector(Substream& s, std::size_t agents) {
  std::vector<double> row(agents);
  for (double& x : row) x = 1.0 - s.uniform();
  return row;
}

}  // namespace

FiniteDistribution random_distribution(std::size_t agents, std::size_t points, std::uint64_t seed) {
  if (agents == 0 || points == 0) throw InvalidArgument("random distribution: need agents and points");
  Substream s(seed, kSupportStream, 0);
  FiniteDistribution d;
  for (std::size_t j = 0; j < points; ++j) d.support.push_back(random_vector(s, agents));
  d.probs.assign(points, 1.0 / static_cast<double>(points));
  return d;
}

models::Periodic random_periodic(std::size_t agents, std::size_t period, std::size_t pool_size,
                                 std::uint64_t seed) {
  if (agents == 0 || period == 0 || pool_size == 0)
    throw InvalidArgument("random periodic: need agents, period and pool size");
  Substream s(seed, kSupportStream, 1);
  models::Periodic m;
  for (std::size_t k = 0; k < period; ++k) {
    std::vector<std::vector<double>> pool;
    for (std::size_t j = 0; j < pool_size; ++j) pool.push_back(random_vector(s, agents));
    m.pools.push_back(std::move(pool));
  }
  return m;
}

EnvyBase adjust_envy_base(double epsilon, double a) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("envy base: epsilon must lie in (0, 1)");
  if (!(a > 1.0)) throw InvalidArgument("envy base: a must exceed 1");
  const double exact = std::log(1.0 / epsilon) / std::log(a);
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(exact)));
  return {std::pow(1.0 / epsilon, 1.0 / static_cast<double>(k)), k};
}

EnvyInstance adv_envy_worstcase(double epsilon, double a, std::size_t repeats,
                                PhaseRounding rounding) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidArgument("envy: epsilon must lie in (0, 1]");
  if (!(a > 1.0)) throw InvalidArgument("envy: a must exceed 1");
  if (repeats == 0) throw InvalidArgument("envy: R must be a positive integer");
  const double exact_k = std::log(1.0 / epsilon) / std::log(a);
  const double k_rounded = std::round(exact_k);
  if (std::abs(exact_k - k_rounded) > 1e-9 * std::max(1.0, exact_k))
    throw InvalidArgument("envy: log_a(1/epsilon) must be an integer (adjust a)");
  const std::size_t k = static_cast<std::size_t>(k_rounded);

  const double r = static_cast<double>(repeats);
  auto length = [&](double x) {
    const double snapped = std::round(x);
    if (std::abs(x - snapped) <= 1e-9 * std::max(1.0, x)) return static_cast<std::size_t>(snapped);
    return static_cast<std::size_t>(rounding == PhaseRounding::Ceil ? std::ceil(x) : std::floor(x));
  };
  const std::size_t lb = length((1.0 - 1.0 / a) * r);
  const std::size_t lc = length((1.0 - 1.0 / a) * r / epsilon);

  EnvyInstance out;
  std::vector<double> data;
  auto phase = [&](std::size_t len, double v1, double v2) {
    out.phase_lengths.push_back(len);
    for (std::size_t s = 0; s < len; ++s) {
      data.push_back(v1);
      data.push_back(v2);
    }
  };
  auto level = [&](std::size_t j) { return j == k ? 1.0 : epsilon * std::pow(a, static_cast<double>(j)); };

  phase(repeats, 0.0, 1.0);
  phase(repeats, epsilon, 1.0);
  for (std::size_t j = 1; j <= k; ++j) phase(lb, level(j), 1.0);
  for (std::size_t j = 1; j <= k; ++j) phase(lc, level(j), epsilon);

  const std::size_t t = data.size() / 2;
  out.values = ValueSequence(t, 2, std::move(data));
  const double others = r + static_cast<double>(k) * (static_cast<double>(lb) + epsilon * static_cast<double>(lc));
  out.predicted_envy = others / r;
  out.limit_envy = 1.0 + 2.0 * (1.0 - 1.0 / a) * static_cast<double>(k);
  return out;
}

KillerInstance adv_cr_killer(std::size_t agents, const std::vector<std::size_t>& phase_ends,
                             const Variant& variant) {
  if (agents == 0) throw InvalidArgument("cr-killer: at least one agent required");
  if (phase_ends.size() < agents)
    throw InvalidArgument("cr-killer: n exceeds the number of phases");
  if (phase_ends.size() > agents) throw InvalidArgument("cr-killer: exactly n phases required");
  for (std::size_t k = 0; k < phase_ends.size(); ++k)
    if (phase_ends[k] == 0 || (k > 0 && phase_ends[k] <= phase_ends[k - 1]))
      throw InvalidArgument("cr-killer: phase ends must be increasing positive rounds");
  if (std::holds_alternative<variants::SetAside>(variant))
    throw InvalidArgument("cr-killer: set-aside needs the whole instance in advance");

  const AgentWeights weights = AgentWeights::equal(agents);
  PaceState state = PaceState::initial(weights, variant);
  std::vector<bool> alive(agents, true);
  std::vector<double> row(agents, 1.0);
  std::vector<double> data;
  data.reserve(phase_ends.back() * agents);

  KillerInstance out;
  out.witness_utility.assign(agents, 0.0);
  std::size_t start = 0;
  for (std::size_t k = 0; k < agents; ++k) {
    for (std::size_t tau = start; tau < phase_ends[k]; ++tau) {
      pace::advance(state, row);
      data.insert(data.end(), row.begin(), row.end());
    }
    std::size_t pick = agents;
    for (std::size_t i = 0; i < agents; ++i)
      if (alive[i] && (pick == agents || state.utility[i] < state.utility[pick])) pick = i;
    out.killed.push_back(pick);
    out.witness_utility[pick] = static_cast<double>(phase_ends[k] - start);
    alive[pick] = false;
    row[pick] = 0.0;
    start = phase_ends[k];
  }

  out.values = ValueSequence(phase_ends.back(), agents, std::move(data));
  out.policy_utility = state.utility;
  double log_bound = std::lgamma(static_cast<double>(agents) + 1.0);
  std::size_t prev = 0;
  for (std::size_t end : phase_ends) {
    log_bound += std::log(static_cast<double>(end - prev) / static_cast<double>(end));
    prev = end;
  }
  out.lower_bound = std::exp(log_bound / static_cast<double>(agents));
  return out;
}

ValueSequence adv_constrained_failure(double r2, double cap, std::size_t t) {
  if (!(r2 > 0.0) || !std::isfinite(r2)) throw InvalidArgument("constrained failure: r2 must be positive");
  if (!(cap > 0.0) || !std::isfinite(cap)) throw InvalidArgument("constrained failure: cap must be positive");
  if (t == 0) throw InvalidArgument("constrained failure: t must be positive");
  const double c = std::min(1.0 / r2, cap);
  return ValueSequence(t, 2, std::vector<double>(2 * t, c));
}

}  // namespace pace
