#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "pace/eg.hpp"
#include "pace/metrics.hpp"

using namespace pace;

namespace {

const auto kOnes3 = ValueSequence(3, 2, std::vector<double>(6, 1.0));

RunTrace ones_trace(std::vector<std::size_t> checkpoints = {}) {
  RunOptions options;
  options.checkpoints = std::move(checkpoints);
  return run(kOnes3, AgentWeights::equal(2), variants::Unconstrained{}, options);
}

}  // namespace

TEST_CASE("regret") {
  const std::vector<double> u{1.5, 1.5};
  const std::vector<double> got{2, 1};
  CHECK(regret(got, u) == std::vector<double>{0, 0.5});
  CHECK(regret(u, u) == std::vector<double>{0, 0});
  const std::vector<double> none{0, 0};
  CHECK(regret(none, u) == u);
}

TEST_CASE("envy on the three-round trace") {
  const auto trace = ones_trace();
  const auto x = trace.allocation();
  const auto add = additive_envy(kOnes3, x, AgentWeights::equal(2));
  CHECK(add[0] == doctest::Approx(0.0));
  CHECK(add[1] == doctest::Approx(1.0 / 3.0));
  CHECK(additive_envy(trace.cross, 3, AgentWeights::equal(2)) == add);

  const auto mult = multiplicative_envy(kOnes3, x, AgentWeights::equal(2));
  CHECK(mult[1] == doctest::Approx(2.0));
  CHECK(mult[0] == doctest::Approx(0.5));

  const auto identity = ValueSequence::from_rows({{1, 0}, {0, 1}});
  Allocation id(2, 2);
  id(0, 0) = id(1, 1) = 1.0;
  CHECK(multiplicative_envy(identity, id, AgentWeights::equal(2)) == std::vector<double>{0, 0});

  Allocation half(3, 2);
  for (std::size_t tau = 0; tau < 3; ++tau) half(tau, 0) = half(tau, 1) = 0.5;
  const auto zero = additive_envy(kOnes3, half, AgentWeights::equal(2));
  CHECK(zero[0] == doctest::Approx(0.0));
  CHECK(zero[1] == doctest::Approx(0.0));

  Allocation starve(2, 2);
  starve(0, 0) = starve(1, 0) = 1.0;
  CHECK(std::isinf(multiplicative_envy(identity, starve, AgentWeights::equal(2))[1]));
}

TEST_CASE("welfare ratios") {
  const std::vector<double> four_one{4, 1};
  CHECK(nash_welfare(four_one, AgentWeights::equal(2)) == doctest::Approx(2.0));
  const std::vector<double> alg{2, 1}, hind{1.5, 1.5};
  CHECK(competitive_ratio(alg, hind, AgentWeights::equal(2)) == doctest::Approx(std::sqrt(1.125)));
  CHECK(competitive_ratio(hind, hind, AgentWeights::equal(2)) == doctest::Approx(1.0));
  const std::vector<double> starved{2, 0};
  CHECK(std::isinf(competitive_ratio(starved, hind, AgentWeights::equal(2))));

  CHECK(utility_ratio(kOnes3, alg, AgentWeights::equal(2)) == doctest::Approx(1.5));
  CHECK(utility_ratio(kOnes3, alg, AgentWeights::equal(2)) ==
        doctest::Approx(oracle::utility_ratio_brute(kOnes3, alg, AgentWeights::equal(2))));
  CHECK_THROWS_AS(utility_ratio(kOnes3, starved, AgentWeights::equal(2)), InvalidArgument);

  const auto single = ValueSequence::from_rows({{1}, {2}, {0.5}});
  const std::vector<double> part{1.5};
  CHECK(utility_ratio(single, part, AgentWeights::equal(1)) == doctest::Approx(3.5 / 1.5));

  const auto item = ValueSequence::from_rows({{1, 1}});
  const std::vector<double> one_zero{1, 0};
  CHECK(utility_ratio_seeded(item, one_zero, AgentWeights::equal(2), 1.0) == doctest::Approx(2.5));
  const auto w = AgentWeights({0.3, 0.7});
  CHECK(utility_ratio_seeded(item, one_zero, w, 1e12) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("expenditure deviation") {
  for (std::size_t t : {10u, 100u}) {
    const auto v = ValueSequence(t, 1, std::vector<double>(t, 1.0));
    const auto trace = run(v, AgentWeights::equal(1), variants::Unconstrained{});
    for (std::size_t s : {0u, 1u, 5u}) {
      const auto dev = expenditure_deviation(trace, s);
      CHECK_FALSE(dev.flagged);
      const double ratio = static_cast<double>(s) / static_cast<double>(t);
      CHECK(dev.value == doctest::Approx(ratio * ratio));
    }
  }
  const auto late = ValueSequence::from_rows({{1, 0}, {0, 1}, {1, 1}, {1, 1}});
  const auto trace = run(late, AgentWeights::equal(2), variants::Unconstrained{});
  const auto early = expenditure_deviation(trace, 0);
  CHECK(early.flagged);
  CHECK(std::isinf(early.value));
  CHECK_FALSE(expenditure_deviation(trace, 2).flagged);
  const auto prop = run(late, AgentWeights::equal(2), variants::Proportional{});
  CHECK_THROWS_AS(expenditure_deviation(prop, 0), InvalidArgument);
}

TEST_CASE("relative regret trajectory") {
  const std::vector<std::size_t> cps{1, 2, 3};
  const auto trace = ones_trace(cps);
  const auto prefixes = hindsight_prefix(kOnes3, AgentWeights::equal(2), cps, 1e-9);
  const auto rows = relative_regret_trajectory(trace, prefixes);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].per_agent[1] == doctest::Approx(1.0));
  CHECK(rows[2].per_agent[0] == doctest::Approx(0.0));
  CHECK(rows[2].per_agent[1] == doctest::Approx(1.0 / 3.0));
  CHECK(rows[2].max == doctest::Approx(1.0 / 3.0));
  CHECK(rows[2].mean == doctest::Approx(1.0 / 6.0));

  const auto identity = ValueSequence::from_rows({{1, 0}, {0, 1}});
  const std::vector<std::size_t> two{1, 2};
  RunOptions options;
  options.checkpoints = two;
  const auto prop = run(identity, AgentWeights::equal(2), variants::Proportional{}, options);
  const auto prop_rows = relative_regret_trajectory(prop, hindsight_prefix(identity, AgentWeights::equal(2), two));
  CHECK(prop_rows[0].excluded[1]);
  CHECK(prop_rows[0].excluded_count == 1);
  CHECK(prop_rows[1].per_agent[0] == doctest::Approx(0.5));
  CHECK(prop_rows[1].per_agent[1] == doctest::Approx(0.5));

  const std::vector<std::size_t> other{1, 3};
  CHECK_THROWS_AS(relative_regret_trajectory(trace, hindsight_prefix(kOnes3, AgentWeights::equal(2), other)),
                  InvalidArgument);
}

TEST_CASE("utility ratio matches enumeration") {
  oracle::Gen g(43);
  std::size_t checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = g.between(1, 4);
    std::size_t t = 1, limit = n;
    while (limit * n <= 4096 && g.unit() < 0.8) limit *= n, ++t;
    const auto v = g.values(t, n, 0.3);
    const auto w = g.weights(n);
    const auto trace = run(v, w, variants::Unconstrained{});
    bool all_served = true;
    for (double u : trace.utility) all_served = all_served && u > 0.0;
    std::vector<double> utility = trace.utility;
    if (!all_served)
      for (auto& u : utility) u = 0.1 + g.unit();
    const double closed = utility_ratio(v, utility, w);
    const double brute = oracle::utility_ratio_brute(v, utility, w);
    CHECK(std::abs(closed - brute) <= 1e-12 * std::max(1.0, brute));
    ++checked;
  }
  CHECK(checked == 400);
}

TEST_CASE("utility ratio dominates the competitive ratio") {
  oracle::Gen g(47);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = g.values(g.between(2, 80), g.between(2, 4), 0.3);
    const auto w = g.weights(v.agents());
    const auto trace = run(v, w, variants::Unconstrained{});
    const auto eq = solve_eg(v, w, 1e-10);
    bool served = true;
    for (double u : trace.utility) served = served && u > 0.0;
    if (!served) continue;
    CHECK(utility_ratio(v, trace.utility, w) >= competitive_ratio(trace.utility, eq.utility, w) - 1e-9);
  }
}

TEST_CASE("equilibrium allocation is envy free against itself") {
  oracle::Gen g(53);
  for (int trial = 0; trial < 60; ++trial) {
    const auto v = g.values(g.between(1, 6), g.between(2, 4), 0.2);
    const auto w = g.weights(v.agents());
    const auto eq = solve_eg(v, w, 1e-10);
    for (double e : additive_envy(v, eq.allocation, w)) CHECK(e <= 1e-6);
    CHECK(competitive_ratio(eq.utility, eq.utility, w) <= 1 + 1e-12);
    const auto c = cross_utility(v, eq.allocation);
    std::vector<double> u(v.agents());
    for (std::size_t i = 0; i < v.agents(); ++i) u[i] = c[i][i];
    CHECK(utility_ratio(v, u, w) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("scale behavior") {
  oracle::Gen g(59);
  for (int trial = 0; trial < 40; ++trial) {
    const auto v = g.values(g.between(2, 60), g.between(2, 4), 0.2);
    const std::size_t n = v.agents();
    const auto w = g.weights(n);
    const double c = 0.25 + 4 * g.unit();
    const auto sv = v.scaled(c);
    const auto trace = run(v, w, variants::Unconstrained{});
    const auto strace = run(sv, w, variants::Unconstrained{});
    const auto hind = solve_eg(v, w, 1e-10).utility;
    const auto shind = solve_eg(sv, w, 1e-10).utility;
    bool served = true;
    for (double u : trace.utility) served = served && u > 0.0;
    if (!served) continue;
    CHECK(competitive_ratio(strace.utility, shind, w) ==
          doctest::Approx(competitive_ratio(trace.utility, hind, w)).epsilon(1e-6));
    CHECK(utility_ratio(sv, strace.utility, w) == doctest::Approx(utility_ratio(v, trace.utility, w)).epsilon(1e-12));
    const auto m = multiplicative_envy(trace.cross, w);
    const auto sm = multiplicative_envy(strace.cross, w);
    const auto a = additive_envy(trace.cross, v.items(), w);
    const auto sa = additive_envy(strace.cross, v.items(), w);
    std::vector<double> avg(n), savg(n), hav(n), shav(n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(sm[i] == doctest::Approx(m[i]).epsilon(1e-12));
      CHECK(sa[i] == doctest::Approx(c * a[i]).epsilon(1e-9));
      avg[i] = trace.average_utility[i], savg[i] = strace.average_utility[i];
      hav[i] = hind[i] / static_cast<double>(v.items()), shav[i] = shind[i] / static_cast<double>(v.items());
    }
    const auto r = regret(avg, hav);
    const auto sr = regret(savg, shav);
    for (std::size_t i = 0; i < n; ++i) CHECK(sr[i] == doctest::Approx(c * r[i]).epsilon(1e-5).scale(1e-6));
  }
}

TEST_CASE("evaluate_run flags starved agents") {
  const auto v = ValueSequence::from_rows({{1, 1}, {1, 1}, {1, 1}});
  const variants::Constrained box{{0.1, 0.1}, {0.5, 0.5}};
  const auto trace = run(v, AgentWeights::equal(2), box);
  EvaluationInputs inputs;
  inputs.hindsight_average = {0.5, 0.5};
  const auto report = evaluate_run(v, trace, inputs);
  CHECK(report.utility[1] == 0.0);
  CHECK(std::isinf(report.competitive_ratio));
  CHECK(std::isinf(report.utility_ratio));
  CHECK(std::isinf(report.multiplicative_envy[1]));
  CHECK_FALSE(report.flags.empty());

  const auto seeded = run(v, AgentWeights::equal(2), variants::Seeded{1.0});
  const auto sreport = evaluate_run(v, seeded, inputs);
  REQUIRE(sreport.utility_ratio_seeded.has_value());
  CHECK(*sreport.utility_ratio_seeded ==
        doctest::Approx(utility_ratio_seeded(v, seeded.utility, AgentWeights::equal(2), 1.0)));
}
