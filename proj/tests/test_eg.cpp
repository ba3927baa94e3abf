#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pace/eg.hpp"

using namespace pace;

namespace {

void check_utilities(const MarketEquilibrium& eq, const std::vector<double>& expected, double tol) {
  REQUIRE(eq.utility.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(eq.utility[i] == doctest::Approx(expected[i]).epsilon(tol));
}

}  // namespace

TEST_CASE("small markets") {
  const auto identity = ValueSequence::from_rows({{1, 0}, {0, 1}});
  const auto eq = solve_eg(identity, AgentWeights::equal(2));
  check_utilities(eq, {1, 1}, 1e-9);
  CHECK(eq.allocation(0, 0) == doctest::Approx(1.0));
  CHECK(eq.allocation(1, 1) == doctest::Approx(1.0));
  CHECK(eq.multiplier[0] == doctest::Approx(1.0));
  CHECK(eq.price[1] == doctest::Approx(1.0));
  CHECK(eq.gap >= 0.0);
  CHECK(eq.gap <= 2e-9);

  const auto same = ValueSequence::from_rows({{1, 1}, {1, 1}, {1, 1}});
  check_utilities(solve_eg(same, AgentWeights({1, 2})), {1, 2}, 1e-9);

  const auto crossed = ValueSequence::from_rows({{2, 1}, {1, 2}});
  const auto ceq = solve_eg(crossed, AgentWeights::equal(2));
  check_utilities(ceq, {2, 2}, 1e-9);
  CHECK(ceq.allocation(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("dual objective") {
  const auto identity = ValueSequence::from_rows({{1, 0}, {0, 1}});
  const std::vector<double> ones{1, 1};
  CHECK(dual_objective(ones, identity, AgentWeights::equal(2)) == doctest::Approx(0.0));
  const std::vector<double> u{1, 1};
  CHECK(primal_objective(u, AgentWeights::equal(2)) == doctest::Approx(0.0));

  const auto single = ValueSequence::from_rows({{1, 1}});
  CHECK(dual_objective(ones, single, AgentWeights::equal(2)) == doctest::Approx(-1.0));
  const std::vector<double> halves{0.5, 0.5};
  CHECK(dual_objective(ones, single, AgentWeights::equal(2)) - primal_objective(halves, AgentWeights::equal(2)) ==
        doctest::Approx(2 * std::log(2.0) - 1));

  // one-dimensional scaling: D(c beta) - D(beta) = (c - 1) sum p - ||B|| log c
  oracle::Gen g(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = g.values(g.between(1, 6), g.between(1, 4));
    const auto w = g.weights(v.agents());
    std::vector<double> beta(v.agents());
    for (auto& b : beta) b = 0.1 + 2 * g.unit();
    double sum_p = 0.0;
    for (std::size_t tau = 0; tau < v.items(); ++tau) {
      double p = 0.0;
      for (std::size_t i = 0; i < v.agents(); ++i) p = std::max(p, beta[i] * v(tau, i));
      sum_p += p;
    }
    const double c = 0.2 + 3 * g.unit();
    std::vector<double> scaled = beta;
    for (auto& b : scaled) b *= c;
    CHECK(dual_objective(scaled, v, w) - dual_objective(beta, v, w) ==
          doctest::Approx((c - 1) * sum_p - w.total() * std::log(c)).epsilon(1e-10));
    const double best_c = w.total() / sum_p;
    std::vector<double> at_best = beta;
    for (auto& b : at_best) b *= best_c;
    CHECK(dual_objective(at_best, v, w) <= dual_objective(scaled, v, w) + 1e-12);
  }
}

TEST_CASE("weak duality on random pairs") {
  oracle::Gen g(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto v = g.values(g.between(1, 6), g.between(1, 4), 0.3);
    const std::size_t n = v.agents();
    const auto w = g.weights(n);
    std::vector<double> beta(n);
    for (auto& b : beta) b = 0.05 + 3 * g.unit();
    Allocation x(v.items(), n);
    for (std::size_t tau = 0; tau < v.items(); ++tau) {
      double total = 0.0;
      std::vector<double> r(n);
      for (auto& e : r) total += e = g.unit();
      for (std::size_t i = 0; i < n; ++i) x(tau, i) = r[i] / total;
    }
    CHECK(dual_objective(beta, v, w) >= primal_objective(x, v, w) - 1e-12);
  }
}

TEST_CASE("certified equilibria on random markets") {
  oracle::Gen g(11);
  for (int trial = 0; trial < 150; ++trial) {
    const auto v = g.values(g.between(1, 6), g.between(1, 4), trial % 3 == 0 ? 0.4 : 0.0);
    const auto w = g.weights(v.agents());
    const auto eq = solve_eg(v, w, 1e-9);
    CHECK(eq.gap >= 0.0);
    CHECK(eq.gap <= 1e-9 * w.total());
    const auto report = check_equilibrium(eq, v, w, 1e-6);
    INFO(report.summary());
    CHECK(report.passed());
    CHECK(eq.allocation.feasible(1e-12));
  }
}

TEST_CASE("identical rows are aggregated without changing the answer") {
  oracle::Gen g(13);
  for (int trial = 0; trial < 40; ++trial) {
    const auto base = g.values(g.between(1, 4), g.between(2, 4));
    std::vector<std::vector<double>> rows;
    for (std::size_t tau = 0; tau < base.items(); ++tau)
      for (std::size_t r = 0; r <= trial % 5; ++r) rows.emplace_back(base.row(tau).begin(), base.row(tau).end());
    const auto v = ValueSequence::from_rows(rows);
    const auto w = g.weights(v.agents());
    const auto eq = solve_eg(v, w, 1e-10);
    CHECK(check_equilibrium(eq, v, w, 1e-6).passed());
    const auto supply = static_cast<double>(trial % 5 + 1);
    std::vector<double> probs(base.items(), 1.0 / static_cast<double>(base.items()));
    std::vector<std::vector<double>> support;
    for (std::size_t tau = 0; tau < base.items(); ++tau) support.emplace_back(base.row(tau).begin(), base.row(tau).end());
    const auto under = solve_underlying(support, probs, w, 1e-10);
    for (std::size_t i = 0; i < v.agents(); ++i)
      CHECK(under.utility[i] * static_cast<double>(base.items()) * supply ==
            doctest::Approx(eq.utility[i]).epsilon(1e-6));
  }
}

TEST_CASE("scale invariance of the optimizer") {
  oracle::Gen g(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto v = g.values(g.between(1, 6), g.between(2, 4), 0.2);
    const std::size_t n = v.agents();
    const auto w = g.weights(n);
    const auto eq = solve_eg(v, w, 1e-10);
    std::vector<double> alpha(n);
    for (auto& a : alpha) a = 0.1 + 10 * g.unit();
    const auto scaled = v.scaled_columns(alpha);
    MarketEquilibrium moved = eq;
    for (std::size_t i = 0; i < n; ++i) {
      moved.utility[i] = eq.utility[i] * alpha[i];
      moved.multiplier[i] = eq.multiplier[i] / alpha[i];
    }
    for (std::size_t tau = 0; tau < v.items(); ++tau) {
      double p = 0.0;
      for (std::size_t i = 0; i < n; ++i) p = std::max(p, moved.multiplier[i] * scaled(tau, i));
      moved.price[tau] = p;
    }
    const auto report = check_equilibrium(moved, scaled, w, 1e-6);
    INFO(report.summary());
    CHECK(report.passed());
  }
}

TEST_CASE("two-agent markets agree with grid search") {
  const double grid[] = {0.0, 0.5, 1.0};
  std::size_t checked = 0;
  for (std::size_t t = 1; t <= 3; ++t) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < 2 * t; ++k) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<double> data(2 * t);
      std::size_t c = code;
      for (auto& x : data) x = grid[c % 3], c /= 3;
      const ValueSequence v(t, 2, data);
      for (const auto& w : {AgentWeights::equal(2), AgentWeights({1, 2})}) {
        if (!validate_instance(v, w)) continue;
        const auto eq = solve_eg(v, w, 1e-9);
        const auto ref = oracle::eg_grid(v, w);
        CHECK(std::abs(eq.utility[0] - ref[0]) <= 1e-3);
        CHECK(std::abs(eq.utility[1] - ref[1]) <= 1e-3);
        ++checked;
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("underlying market") {
  const auto w = AgentWeights::equal(2);
  auto one = solve_underlying({{1, 1}}, std::vector<double>{1.0}, w);
  CHECK(one.utility[0] == doctest::Approx(0.5));
  CHECK(one.utility[1] == doctest::Approx(0.5));

  auto disjoint = solve_underlying({{1, 0}, {0, 1}}, std::vector<double>{0.5, 0.5}, w);
  CHECK(disjoint.utility[0] == doctest::Approx(0.5));
  CHECK(disjoint.multiplier[1] == doctest::Approx(2.0));

  auto crossed = solve_underlying({{2, 1}, {1, 2}}, std::vector<double>{0.5, 0.5}, w);
  CHECK(crossed.utility[0] == doctest::Approx(1.0));
  CHECK(crossed.utility[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(solve_underlying({{1, 1}}, std::vector<double>{0.5}, w), InvalidArgument);
}

TEST_CASE("equilibrium checks catch violations") {
  const auto identity = ValueSequence::from_rows({{1, 0}, {0, 1}});
  const auto eq = solve_eg(identity, AgentWeights::equal(2));
  CHECK(check_equilibrium(eq, identity, AgentWeights::equal(2), 1e-9).passed());

  const auto same = ValueSequence::from_rows({{1, 1}, {1, 1}});
  auto split = solve_eg(same, AgentWeights::equal(2));
  const auto fair = check_equilibrium(split, same, AgentWeights::equal(2), 1e-9);
  CHECK(fair.proportional);
  CHECK(fair.proportionality_violation <= 1e-9);
  for (std::size_t tau = 0; tau < 2; ++tau) {
    split.allocation(tau, 0) = 0.6;
    split.allocation(tau, 1) = 0.4;
  }
  split.utility = {1.2, 0.8};
  CHECK_FALSE(check_equilibrium(split, same, AgentWeights::equal(2), 1e-6).envy_free);
}

TEST_CASE("prefix benchmarks") {
  const auto identity = ValueSequence::from_rows({{1, 0}, {0, 1}});
  const std::vector<std::size_t> both{1, 2};
  const auto prefixes = hindsight_prefix(identity, AgentWeights::equal(2), both);
  REQUIRE(prefixes.size() == 2);
  CHECK(prefixes[0].flagged[1]);
  CHECK(prefixes[0].average_utility[1] == 0.0);
  CHECK(prefixes[0].average_utility[0] == doctest::Approx(1.0));
  CHECK(prefixes[1].average_utility[0] == doctest::Approx(0.5));
  CHECK(prefixes[1].average_utility[1] == doctest::Approx(0.5));

  const auto same = ValueSequence::from_rows({{1, 1}, {1, 1}, {1, 1}});
  const std::vector<std::size_t> all{1, 2, 3};
  for (const auto& p : hindsight_prefix(same, AgentWeights({1, 3}), all, 1e-9)) {
    CHECK(p.average_utility[0] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(p.average_utility[1] == doctest::Approx(0.75).epsilon(1e-6));
  }

  oracle::Gen g(19);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = g.values(g.between(20, 200), g.between(2, 4), 0.3);
    const auto w = g.weights(v.agents());
    const auto cps = geometric_checkpoints(v.items());
    const auto warm = hindsight_prefix(v, w, cps, 1e-9);
    for (std::size_t k = 0; k < cps.size(); ++k) {
      bool any_flag = false;
      for (bool f : warm[k].flagged) any_flag = any_flag || f;
      if (any_flag) continue;
      const auto cold = solve_eg(v.prefix(cps[k]), w, 1e-10);
      for (std::size_t i = 0; i < v.agents(); ++i)
        CHECK(warm[k].average_utility[i] * static_cast<double>(cps[k]) ==
              doctest::Approx(cold.utility[i]).epsilon(1e-5));
    }
  }
  CHECK(geometric_checkpoints(10) == std::vector<std::size_t>{1, 2, 4, 8, 10});
  CHECK(geometric_checkpoints(8) == std::vector<std::size_t>{1, 2, 4, 8});
}
