#include "pace/eg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>

#include "maxflow.hpp"

namespace pace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Goods with positive supply; only positive values are stored, as edges
/// grouped by good.
struct Market {
  std::size_t agents = 0;
  std::vector<double> budget;
  std::vector<double> supply;
  std::vector<std::size_t> start{0};  // edges of good j: [start[j], start[j+1])
  std::vector<std::size_t> agent;
  std::vector<double> value;

  std::size_t goods() const { return supply.size(); }

  void add_good(double s, std::span<const double> row, std::span<const std::size_t> agent_map) {
    for (std::size_t k = 0; k < agent_map.size(); ++k) {
      const double x = row[agent_map[k]];
      if (x > 0.0) {
        agent.push_back(k);
        value.push_back(x);
      }
    }
    supply.push_back(s);
    start.push_back(agent.size());
  }
};

struct MarketPoint {
  std::vector<double> amount;  // per edge, units of the good
  std::vector<double> utility;
  double gap = kInf;
};

std::vector<double> utilities(const Market& m, const std::vector<double>& amount) {
  std::vector<double> u(m.agents, 0.0);
  for (std::size_t e = 0; e < amount.size(); ++e) u[m.agent[e]] += m.value[e] * amount[e];
  return u;
}

/// dual(beta(x)) - primal(x) = sum_j s_j max_i B_i v_ij / u_i - ||B||_1.
double certificate(const Market& m, const std::vector<double>& u) {
  for (double x : u)
    if (!(x > 0.0)) return kInf;
  double total = 0.0;
  for (std::size_t j = 0; j < m.goods(); ++j) {
    double best = 0.0;
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e)
      best = std::max(best, m.budget[m.agent[e]] * m.value[e] / u[m.agent[e]]);
    total += m.supply[j] * best;
  }
  const double spent = std::accumulate(m.budget.begin(), m.budget.end(), 0.0);
  return std::max(0.0, total - spent);
}

MarketPoint evaluate(const Market& m, std::vector<double> amount) {
  MarketPoint p;
  p.utility = utilities(m, amount);
  p.gap = certificate(m, p.utility);
  p.amount = std::move(amount);
  return p;
}

std::vector<double> cold_bids(const Market& m) {
  std::vector<double> worth(m.agents, 0.0);
  for (std::size_t j = 0; j < m.goods(); ++j)
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e)
      worth[m.agent[e]] += m.supply[j] * m.value[e];
  std::vector<double> bids(m.value.size());
  for (std::size_t j = 0; j < m.goods(); ++j)
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e) {
      const std::size_t i = m.agent[e];
      bids[e] = m.budget[i] * m.supply[j] * m.value[e] / worth[i];
    }
  return bids;
}

/// Bids concentrated on the goods where `beta` says each agent is nearly tight,
/// mixed with the cold start so that every edge stays alive.
std::vector<double> warm_bids(const Market& m, const std::vector<double>& beta) {
  constexpr double kSharpness = 16.0;
  constexpr double kMix = 0.9;
  std::vector<double> amount(m.value.size(), 0.0);
  for (std::size_t j = 0; j < m.goods(); ++j) {
    double top = 0.0;
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e)
      top = std::max(top, beta[m.agent[e]] * m.value[e]);
    double mass = 0.0;
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e) {
      amount[e] = std::pow(beta[m.agent[e]] * m.value[e] / top, kSharpness);
      mass += amount[e];
    }
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e) amount[e] *= m.supply[j] / mass;
  }
  const auto u = utilities(m, amount);
  auto bids = cold_bids(m);
  for (std::size_t e = 0; e < bids.size(); ++e) {
    const std::size_t i = m.agent[e];
    if (u[i] > 0.0)
      bids[e] = kMix * m.budget[i] * m.value[e] * amount[e] / u[i] + (1.0 - kMix) * bids[e];
  }
  return bids;
}

void bids_to_amounts(const Market& m, const std::vector<double>& bids, std::vector<double>& amount) {
  for (std::size_t j = 0; j < m.goods(); ++j) {
    double price = 0.0;
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e) price += bids[e];
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e)
      amount[e] = price > 0.0 ? m.supply[j] * bids[e] / price : 0.0;
  }
}

/// Exact equilibrium guessed from approximate multipliers: every good hangs off
/// its top bidder, agents are joined through the goods with the smallest
/// relative slack (up to `eta`) into a spanning forest that fixes multipliers
/// and prices up to a scale per component, each component is priced to spend
/// its budgets, and money is routed by max-flow over the edges that are tight
/// under the resulting prices.
std::optional<MarketPoint> polish(const Market& m, const std::vector<double>& beta, double eta) {
  const std::size_t n = m.agents;
  const std::size_t g = m.goods();

  std::vector<std::size_t> top_edge(g);
  std::vector<std::pair<double, std::size_t>> candidates;  // (slack, edge)
  std::vector<std::size_t> good_of_edge(m.value.size());
  for (std::size_t j = 0; j < g; ++j) {
    std::size_t best = m.start[j];
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e) {
      good_of_edge[e] = j;
      if (beta[m.agent[e]] * m.value[e] > beta[m.agent[best]] * m.value[best]) best = e;
    }
    top_edge[j] = best;
    const double top = beta[m.agent[best]] * m.value[best];
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e) {
      const double slack = 1.0 - beta[m.agent[e]] * m.value[e] / top;
      if (e != best && slack <= eta) candidates.push_back({slack, e});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };

  // (node, edge); agents are nodes [0, n), goods [n, n + g)
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n + g);
  auto link = [&](std::size_t e) {
    const std::size_t good = n + good_of_edge[e];
    adj[m.agent[e]].push_back({good, e});
    adj[good].push_back({m.agent[e], e});
  };
  for (std::size_t j = 0; j < g; ++j) link(top_edge[j]);
  for (const auto& [slack, e] : candidates) {
    const std::size_t a = find(m.agent[e]);
    const std::size_t b = find(m.agent[top_edge[good_of_edge[e]]]);
    if (a == b) continue;
    parent[a] = b;
    link(e);
  }

  // log beta for agents, log price for goods
  std::vector<double> level(n + g, 0.0);
  std::vector<char> seen(n + g, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::vector<std::size_t> members;
    std::queue<std::size_t> q;
    seen[root] = 1;
    q.push(root);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      members.push_back(u);
      for (auto [w, e] : adj[u]) {
        if (seen[w]) continue;
        const double step = std::log(m.value[e]);
        level[w] = u < n ? level[u] + step : level[u] - step;
        seen[w] = 1;
        q.push(w);
      }
    }
    double budget = 0.0, spend = 0.0;
    for (std::size_t u : members) {
      if (u < n)
        budget += m.budget[u];
      else
        spend += m.supply[u - n] * std::exp(level[u]);
    }
    if (!(spend > 0.0)) return std::nullopt;
    const double shift = std::log(budget) - std::log(spend);
    for (std::size_t u : members) level[u] += shift;
  }

  const std::size_t source = n + g;
  const std::size_t sink = n + g + 1;
  detail::MaxFlow flow(n + g + 2);
  double total_budget = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    flow.add_edge(source, i, m.budget[i]);
    total_budget += m.budget[i];
  }
  std::vector<double> price(g);
  for (std::size_t j = 0; j < g; ++j) {
    price[j] = std::exp(level[n + j]);
    flow.add_edge(n + j, sink, m.supply[j] * price[j]);
  }
  std::vector<std::size_t> arc(m.value.size(), SIZE_MAX);
  for (std::size_t e = 0; e < m.value.size(); ++e) {
    const std::size_t j = good_of_edge[e];
    const double expected = level[m.agent[e]] + std::log(m.value[e]);
    if (std::abs(expected - level[n + j]) <= 1e-11 * (1.0 + std::abs(expected)))
      arc[e] = flow.add_edge(m.agent[e], n + j, kInf);
  }
  flow.run(source, sink, 1e-15 * total_budget);

  std::vector<double> amount(m.value.size(), 0.0);
  for (std::size_t j = 0; j < g; ++j) {
    double sold = 0.0;
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e)
      if (arc[e] != SIZE_MAX) {
        amount[e] = std::max(0.0, flow.flow(arc[e])) / price[j];
        sold += amount[e];
      }
    if (sold > m.supply[j])
      for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e) amount[e] *= m.supply[j] / sold;
  }
  return evaluate(m, std::move(amount));
}

bool is_power_of_two(std::size_t k) { return k != 0 && (k & (k - 1)) == 0; }

MarketPoint solve_market(const Market& m, double tol, std::size_t max_iterations,
                         const std::vector<double>* warm_beta, std::size_t* iterations_used) {
  const double spent = std::accumulate(m.budget.begin(), m.budget.end(), 0.0);
  const double target = tol * spent;
  std::vector<double> bids = warm_beta ? warm_bids(m, *warm_beta) : cold_bids(m);
  std::vector<double> amount(bids.size());
  std::vector<double> u(m.agents);
  MarketPoint best;

  auto try_polish = [&](const std::vector<double>& util) {
    std::vector<double> beta(m.agents);
    for (std::size_t i = 0; i < m.agents; ++i) beta[i] = m.budget[i] / util[i];
    for (double eta : {1e-9, 1e-7, 1e-5, 1e-3, 1e-2}) {
      auto p = polish(m, beta, eta);
      if (p && p->gap < best.gap) best = std::move(*p);
      if (best.gap <= target) return true;
    }
    return false;
  };

  for (std::size_t it = 0; it <= max_iterations; ++it) {
    bids_to_amounts(m, bids, amount);
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t e = 0; e < amount.size(); ++e) u[m.agent[e]] += m.value[e] * amount[e];

    if (it % 8 == 0 || it == max_iterations) {
      const double gap = certificate(m, u);
      if (gap < best.gap) {
        best.amount = amount;
        best.utility = u;
        best.gap = gap;
      }
      if (best.gap <= target) {
        *iterations_used = it;
        return best;
      }
    }
    if ((is_power_of_two(it) && it >= 8) || it == max_iterations) {
      if (try_polish(u)) {
        *iterations_used = it;
        return best;
      }
    }

    for (std::size_t e = 0; e < bids.size(); ++e) {
      const std::size_t i = m.agent[e];
      const double b = m.budget[i] * m.value[e] * amount[e] / u[i];
      bids[e] = b < 1e-300 ? 0.0 : b;
    }
  }
  throw NonConvergence(best.gap, max_iterations);
}

std::string row_key(std::span<const double> row) {
  std::string key(row.size() * sizeof(double), '\0');
  for (std::size_t i = 0; i < row.size(); ++i) {
    const double x = row[i] == 0.0 ? 0.0 : row[i];
    std::memcpy(key.data() + i * sizeof(double), &x, sizeof(double));
  }
  return key;
}

/// Merges identical rows. good_of[tau] is the good index or SIZE_MAX for an
/// all-zero row.
struct Aggregation {
  std::vector<std::size_t> representative;  // first row of each good
  std::vector<double> count;
  std::vector<std::size_t> good_of;
  std::unordered_map<std::string, std::size_t> index;

  void add(const ValueSequence& v, std::size_t tau) {
    const auto row = v.row(tau);
    if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) {
      good_of.push_back(SIZE_MAX);
      return;
    }
    auto [pos, fresh] = index.try_emplace(row_key(row), representative.size());
    if (fresh) {
      representative.push_back(tau);
      count.push_back(0.0);
    }
    count[pos->second] += 1.0;
    good_of.push_back(pos->second);
  }
};

}  // namespace

NonConvergence::NonConvergence(double gap, std::size_t iterations)
    : Error("EG solver did not converge in " + std::to_string(iterations) +
            " iterations (last gap " + format_double(gap) + ")"),
      gap_(gap) {}

MarketEquilibrium solve_eg(const ValueSequence& v, const AgentWeights& weights,
                           const EgOptions& options) {
  require_valid(v, weights);
  if (!(options.tol > 0.0)) throw InvalidArgument("tol must be positive");
  const std::size_t n = v.agents();

  Aggregation agg;
  for (std::size_t tau = 0; tau < v.items(); ++tau) agg.add(v, tau);
  std::vector<std::size_t> everyone(n);
  std::iota(everyone.begin(), everyone.end(), 0);
  Market m;
  m.agents = n;
  m.budget.assign(weights.values().begin(), weights.values().end());
  for (std::size_t j = 0; j < agg.count.size(); ++j)
    m.add_good(agg.count[j], v.row(agg.representative[j]), everyone);

  MarketEquilibrium eq;
  const MarketPoint point = solve_market(m, options.tol, options.max_iterations, nullptr, &eq.iterations);

  eq.utility = point.utility;
  eq.gap = point.gap;
  eq.multiplier.resize(n);
  for (std::size_t i = 0; i < n; ++i) eq.multiplier[i] = weights[i] / eq.utility[i];

  std::vector<double> share(point.amount.size());
  for (std::size_t j = 0; j < m.goods(); ++j)
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e)
      share[e] = point.amount[e] / m.supply[j];

  eq.allocation = Allocation(v.items(), n);
  eq.price.assign(v.items(), 0.0);
  for (std::size_t tau = 0; tau < v.items(); ++tau) {
    const std::size_t j = agg.good_of[tau];
    if (j == SIZE_MAX) continue;
    for (std::size_t e = m.start[j]; e < m.start[j + 1]; ++e)
      eq.allocation(tau, m.agent[e]) = share[e];
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i) p = std::max(p, eq.multiplier[i] * v(tau, i));
    eq.price[tau] = p;
  }
  return eq;
}

MarketEquilibrium solve_eg(const ValueSequence& v, const AgentWeights& weights, double tol) {
  EgOptions options;
  options.tol = tol;
  return solve_eg(v, weights, options);
}

double dual_objective(std::span<const double> beta, const ValueSequence& v,
                      const AgentWeights& weights) {
  if (beta.size() != v.agents() || weights.size() != v.agents())
    throw InvalidArgument("dual_objective: dimension mismatch");
  for (double b : beta)
    if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("dual_objective: beta must be positive");
  double total = 0.0;
  for (std::size_t tau = 0; tau < v.items(); ++tau) {
    double p = 0.0;
    for (std::size_t i = 0; i < v.agents(); ++i) p = std::max(p, beta[i] * v(tau, i));
    total += p;
  }
  for (std::size_t i = 0; i < v.agents(); ++i) {
    const double b = weights[i];
    total += -b * std::log(beta[i]) + b * std::log(b) - b;
  }
  return total;
}

double primal_objective(std::span<const double> utility, const AgentWeights& weights) {
  if (utility.size() != weights.size()) throw InvalidArgument("primal_objective: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < utility.size(); ++i) total += weights[i] * std::log(utility[i]);
  return total;
}

double primal_objective(const Allocation& x, const ValueSequence& v, const AgentWeights& weights) {
  const auto cross = cross_utility(v, x);
  std::vector<double> u(v.agents());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = cross[i][i];
  return primal_objective(u, weights);
}

UnderlyingMarket solve_underlying(const std::vector<std::vector<double>>& support,
                                  std::span<const double> probs, const AgentWeights& weights,
                                  double tol) {
  if (support.empty() || support.size() != probs.size())
    throw InvalidArgument("solve_underlying: support and probs must be nonempty and equal length");
  const std::size_t n = weights.size();
  double mass = 0.0;
  for (std::size_t j = 0; j < support.size(); ++j) {
    if (support[j].size() != n) throw InvalidArgument("solve_underlying: support point has wrong length");
    if (!(probs[j] >= 0.0)) throw InvalidArgument("solve_underlying: negative probability");
    mass += probs[j];
  }
  if (std::abs(mass - 1.0) > 1e-12) throw InvalidArgument("solve_underlying: probs must sum to 1");

  std::vector<double> rows;
  std::vector<double> keep_probs;
  for (std::size_t j = 0; j < support.size(); ++j) {
    if (probs[j] == 0.0) continue;
    rows.insert(rows.end(), support[j].begin(), support[j].end());
    keep_probs.push_back(probs[j]);
  }
  const ValueSequence grid(keep_probs.size(), n, std::move(rows));
  {
    const auto report = validate_instance(grid, weights);
    if (!report) throw InvalidArgument("solve_underlying: " + report.message);
    std::vector<double> ev(n, 0.0);
    for (std::size_t j = 0; j < grid.items(); ++j)
      for (std::size_t i = 0; i < n; ++i) ev[i] += keep_probs[j] * grid(j, i);
    for (std::size_t i = 0; i < n; ++i)
      if (!(ev[i] > 0.0))
        throw InvalidArgument("solve_underlying: agent " + std::to_string(i + 1) +
                              " has zero expected value");
  }

  Aggregation agg;
  for (std::size_t j = 0; j < grid.items(); ++j) agg.add(grid, j);
  std::vector<double> supply(agg.count.size(), 0.0);
  for (std::size_t j = 0; j < grid.items(); ++j)
    if (agg.good_of[j] != SIZE_MAX) supply[agg.good_of[j]] += keep_probs[j];

  std::vector<std::size_t> everyone(n);
  std::iota(everyone.begin(), everyone.end(), 0);
  Market m;
  m.agents = n;
  m.budget.assign(weights.values().begin(), weights.values().end());
  for (std::size_t j = 0; j < supply.size(); ++j)
    m.add_good(supply[j], grid.row(agg.representative[j]), everyone);

  std::size_t used = 0;
  const MarketPoint point = solve_market(m, tol, EgOptions{}.max_iterations, nullptr, &used);

  UnderlyingMarket out;
  out.support = support;
  out.probs.assign(probs.begin(), probs.end());
  out.utility = point.utility;
  out.gap = point.gap;
  out.multiplier.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.multiplier[i] = weights[i] / out.utility[i];
  return out;
}

std::string EquilibriumCheck::summary() const {
  std::ostringstream os;
  auto item = [&](const char* name, bool ok, double worst) {
    os << name << '=' << (ok ? "ok" : "FAIL") << " (" << format_double(worst) << ") ";
  };
  item("envy-free", envy_free, envy_violation);
  item("proportional", proportional, proportionality_violation);
  item("clearing", clears, clearing_violation);
  item("budget", budgets_spent, budget_violation);
  item("complementarity", complementary, complementarity_violation);
  std::string s = os.str();
  s.pop_back();
  return s;
}

EquilibriumCheck check_equilibrium(const MarketEquilibrium& eq, const ValueSequence& v,
                                   const AgentWeights& weights, double tol) {
  const std::size_t n = v.agents();
  const std::size_t t = v.items();
  if (eq.allocation.items() != t || eq.allocation.agents() != n || eq.price.size() != t ||
      eq.multiplier.size() != n || weights.size() != n)
    throw InvalidArgument("check_equilibrium: dimension mismatch");

  EquilibriumCheck r;
  const auto cross = cross_utility(v, eq.allocation);
  const auto worth = v.column_sums();
  const double total = weights.total();

  for (std::size_t i = 0; i < n; ++i) {
    const double own = cross[i][i] / weights[i];
    for (std::size_t k = 0; k < n; ++k)
      r.envy_violation = std::max(r.envy_violation, cross[i][k] / weights[k] - own);
    r.proportionality_violation =
        std::max(r.proportionality_violation, weights[i] / total * worth[i] - cross[i][i]);
    r.complementarity_violation =
        std::max(r.complementarity_violation, std::abs(eq.multiplier[i] * cross[i][i] - weights[i]));
  }

  std::vector<double> spend(n, 0.0);
  for (std::size_t tau = 0; tau < t; ++tau) {
    double supplied = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      supplied += eq.allocation(tau, i);
      spend[i] += eq.price[tau] * eq.allocation(tau, i);
    }
    if (eq.price[tau] > tol)
      r.clearing_violation = std::max(r.clearing_violation, std::abs(supplied - 1.0));
    else
      r.clearing_violation = std::max(r.clearing_violation, supplied - 1.0);
  }
  for (std::size_t i = 0; i < n; ++i)
    r.budget_violation = std::max(r.budget_violation, std::abs(spend[i] - weights[i]));

  r.envy_free = r.envy_violation <= tol;
  r.proportional = r.proportionality_violation <= tol;
  r.clears = r.clearing_violation <= tol;
  r.budgets_spent = r.budget_violation <= tol;
  r.complementary = r.complementarity_violation <= tol;
  return r;
}

std::vector<PrefixSolution> hindsight_prefix(const ValueSequence& v, const AgentWeights& weights,
                                             std::span<const std::size_t> checkpoints,
                                             double tol) {
  if (weights.size() != v.agents()) throw InvalidArgument("hindsight_prefix: dimension mismatch");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] < 1 || checkpoints[k] > v.items())
      throw InvalidArgument("hindsight_prefix: checkpoint out of range");
    if (k > 0 && checkpoints[k] <= checkpoints[k - 1])
      throw InvalidArgument("hindsight_prefix: checkpoints must be strictly increasing");
  }
  const std::size_t n = v.agents();
  Aggregation agg;
  std::vector<double> worth(n, 0.0);
  std::vector<double> previous_beta(n, 0.0);
  std::vector<PrefixSolution> out;
  std::size_t seen = 0;

  for (std::size_t round : checkpoints) {
    for (; seen < round; ++seen) {
      agg.add(v, seen);
      for (std::size_t i = 0; i < n; ++i) worth[i] += v(seen, i);
    }
    PrefixSolution sol;
    sol.round = round;
    sol.average_utility.assign(n, 0.0);
    sol.flagged.assign(n, false);

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i) {
      if (worth[i] > 0.0)
        active.push_back(i);
      else
        sol.flagged[i] = true;
    }
    if (active.empty()) {
      out.push_back(std::move(sol));
      continue;
    }

    Market m;
    m.agents = active.size();
    for (std::size_t i : active) m.budget.push_back(weights[i]);
    for (std::size_t j = 0; j < agg.count.size(); ++j)
      m.add_good(agg.count[j], v.row(agg.representative[j]), active);

    std::vector<double> guess(active.size());
    bool warm = false;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const std::size_t i = active[k];
      if (previous_beta[i] > 0.0) {
        guess[k] = previous_beta[i];
        warm = true;
      } else {
        guess[k] = weights[i] * static_cast<double>(round) / worth[i];
      }
    }

    std::size_t used = 0;
    const MarketPoint point =
        solve_market(m, tol, EgOptions{}.max_iterations, warm ? &guess : nullptr, &used);
    sol.gap = point.gap;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const std::size_t i = active[k];
      sol.average_utility[i] = point.utility[k] / static_cast<double>(round);
      previous_beta[i] = weights[i] * static_cast<double>(round) / point.utility[k];
    }
    out.push_back(std::move(sol));
  }
  return out;
}

std::vector<std::size_t> geometric_checkpoints(std::size_t t) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k < t; k *= 2) out.push_back(k);
  if (t >= 1) out.push_back(t);
  return out;
}

}  // namespace pace
