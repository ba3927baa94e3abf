#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "pace/inputs.hpp"
#include "pace/metrics.hpp"
#include "pace/rng.hpp"

using namespace pace;

namespace {

FiniteDistribution point(std::vector<double> v) { return {{std::move(v)}, {1.0}}; }

}  // namespace

TEST_CASE("counter-based substreams are reproducible") {
  Substream a(7, 0, 3), b(7, 0, 3), c(7, 1, 3), d(8, 0, 3);
  for (int k = 0; k < 20; ++k) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    const auto y = c.next_u64();
    const auto z = d.next_u64();
    CHECK((x != y || x != z));
  }
  Substream u(1, 2, 3);
  for (int k = 0; k < 1000; ++k) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(u.below(7) < 7u);
  }
}

TEST_CASE("simple generators") {
  const auto constant = gen({models::Iid{point({0.3, 0.7})}, 5, 1, 0});
  CHECK(constant == ValueSequence(5, 2, {0.3, 0.7, 0.3, 0.7, 0.3, 0.7, 0.3, 0.7, 0.3, 0.7}));

  const models::Periodic alternating{{{{1, 0}}, {{0, 1}}}};
  CHECK(gen({alternating, 4, 1, 0}) == ValueSequence::from_rows({{1, 0}, {0, 1}, {1, 0}, {0, 1}}));

  const FiniteDistribution coin{{{1, 0}, {0, 1}}, {0.5, 0.5}};
  const std::size_t t = 10000;
  const auto v = gen({models::Iid{coin}, t, 42, 0});
  const auto sums = v.column_sums();
  const double sigma = std::sqrt(0.25 / static_cast<double>(t));
  for (double s : sums) CHECK(std::abs(s / static_cast<double>(t) - 0.5) <= 3 * sigma);
}

TEST_CASE("determinism and validity of every model") {
  const FiniteDistribution base = random_distribution(3, 5, 9);
  const FiniteDistribution other = random_distribution(3, 4, 10);
  const std::vector<InputModel> all{
      models::Iid{base},
      random_periodic(3, 4, 6, 11),
      models::Block{{30, 50, 20}, {base, other, base}},
      models::Ergodic{{{1, 0.2, 0.3}, {0.1, 1, 0.5}, {0.4, 0.4, 1}},
                      {{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}},
                      1},
      models::Corrupted{base, other, 0.1}};
  for (const auto& model : all) {
    for (std::uint32_t rep = 0; rep < 3; ++rep) {
      const InputModelSpec spec{model, 100, 5, rep};
      const auto v = gen(spec);
      CHECK(v == gen(spec));
      CHECK(validate_instance(v, AgentWeights::equal(3)).ok);
      CHECK(v.items() == 100);
      const InputModelSpec next{model, 100, 5, rep + 1};
      if (model_name(model) != "periodic" || rep == 0) CHECK_FALSE(v == gen(next));
    }
  }
  // prefix stability: a row depends only on the spec and its round
  const auto longer = gen({models::Iid{base}, 200, 5, 0});
  CHECK(longer.prefix(100) == gen({models::Iid{base}, 100, 5, 0}));
  CHECK(random_distribution(3, 5, 9).support == base.support);
}

TEST_CASE("block multisets follow the declared distributions") {
  const FiniteDistribution split{{{1, 0}, {0, 1}}, {0.3, 0.7}};
  const auto v = gen({models::Block{{10, 10}, {split, point({1, 1})}}, 20, 3, 0});
  std::size_t first = 0;
  for (std::size_t tau = 0; tau < 10; ++tau) first += v(tau, 0) == 1.0 ? 1 : 0;
  CHECK(first == 3);
  for (std::size_t tau = 10; tau < 20; ++tau) CHECK(v(tau, 0) == 1.0);
  CHECK_THROWS_AS(gen({models::Block{{10, 5}, {split, split}}, 20, 3, 0}), InvalidArgument);
}

TEST_CASE("total variation deltas") {
  const auto a = point({1, 0});
  const auto b = point({0, 1});
  CHECK(tv_distance(a, b) == 1.0);
  CHECK(tv_distance(a, a) == 0.0);
  const FiniteDistribution dup{{{1, 0}, {1, 0}, {0, 1}}, {0.25, 0.25, 0.5}};
  CHECK(tv_distance(dup, FiniteDistribution{{{0, 1}, {1, 0}}, {0.5, 0.5}}) == doctest::Approx(0.0));

  CHECK(empirical_tv_delta({models::Block{{50, 50}, {point({1, 2}), point({1, 2})}}, 100, 0, 0}) == 0.0);
  CHECK_THROWS_AS(empirical_tv_delta({models::Block{{50, 50}, {a, a}}, 100, 0, 0}), InvalidArgument);
  CHECK(empirical_tv_delta({models::Block{{50, 50}, {a, b}}, 100, 0, 0}) == doctest::Approx(0.5));
  CHECK(empirical_tv_delta({models::Iid{point({1, 1})}, 100, 0, 0}) == 0.0);
  CHECK(empirical_tv_delta({models::Periodic{{{{1, 0}}, {{0, 1}}}}, 100, 0, 0}) == doctest::Approx(0.5));

  const double f = 0.1;
  const InputModelSpec corrupted{models::Corrupted{a, b, f}, 1000, 0, 0};
  CHECK(empirical_tv_delta(corrupted) == doctest::Approx(2 * f * (1 - f)));
  const auto v = gen(corrupted);
  CHECK(v.column_sums()[1] == doctest::Approx(100.0));

  const models::Ergodic chain{{{1, 0}, {0, 1}}, {{0.5, 0.5}, {0.5, 0.5}}, 0};
  CHECK(ergodic_deviation(chain, 1000, 1) == doctest::Approx(0.0005).epsilon(1e-6));
  CHECK_THROWS_AS(empirical_tv_delta({chain, 10, 0, 0}), InvalidArgument);
  const models::Ergodic sticky{{{1, 0}, {0, 1}}, {{1, 0}, {0, 1}}, 0};
  CHECK(ergodic_deviation(sticky, 100, 5) == doctest::Approx(0.0));
}

TEST_CASE("malformed specs") {
  CHECK_THROWS_AS(validate_spec({models::Iid{{{{1, 0}}, {0.5}}}, 10, 0, 0}), InvalidArgument);
  CHECK_THROWS_AS(validate_spec({models::Iid{point({1, 0})}, 0, 0, 0}), InvalidArgument);
  CHECK_THROWS_AS(validate_spec({models::Corrupted{point({1, 1}), point({1, 1}), 1.5}, 10, 0, 0}),
                  InvalidArgument);
  CHECK_THROWS_AS(validate_spec({models::Ergodic{{{1, 1}}, {{0.5}}, 0}, 10, 0, 0}), InvalidArgument);
  CHECK_THROWS_AS(gen({models::Iid{point({1, 0})}, 10, 0, 0}), Error);
}

TEST_CASE("envy construction") {
  const auto trivial = adv_envy_worstcase(1.0, 2.0, 10);
  CHECK(trivial.predicted_envy == doctest::Approx(1.0));

  const auto base = adjust_envy_base(0.1, 1.001);
  CHECK(base.k == 2304);
  CHECK(std::pow(base.a, static_cast<double>(base.k)) == doctest::Approx(10.0));
  CHECK_THROWS_AS(adv_envy_worstcase(0.1, 1.001, 100), InvalidArgument);

  const auto small = adjust_envy_base(0.25, 1.1);
  for (auto rounding : {PhaseRounding::Ceil, PhaseRounding::Floor}) {
    const auto e = adv_envy_worstcase(0.25, small.a, 2000, rounding);
    CHECK(extremity(e.values).epsilon == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(e.phase_lengths.size() == 2 + 2 * small.k);
    CHECK(std::accumulate(e.phase_lengths.begin(), e.phase_lengths.end(), std::size_t{0}) == e.values.items());
    CHECK(e.limit_envy == doctest::Approx(1 + 2 * (1 - 1 / small.a) * static_cast<double>(small.k)));
  }

  const auto floor = adv_envy_worstcase(0.25, small.a, 2000, PhaseRounding::Floor);
  const auto trace = run(floor.values, AgentWeights::equal(2), variants::Unconstrained{});
  for (std::size_t tau = floor.phase_lengths[0]; tau < floor.values.items(); ++tau) CHECK(trace.winners[tau] == 0u);
  const auto envy = multiplicative_envy(trace.cross, AgentWeights::equal(2));
  CHECK(envy[1] == doctest::Approx(floor.predicted_envy).epsilon(0.02));
}

TEST_CASE("competitive ratio killer") {
  const std::vector<std::size_t> lone{50};
  const auto one = adv_cr_killer(1, lone, variants::Unconstrained{});
  CHECK(one.lower_bound == doctest::Approx(1.0));

  const std::vector<std::size_t> two{100, 10000};
  const auto k = adv_cr_killer(2, two, variants::Unconstrained{});
  CHECK(k.lower_bound == doctest::Approx(std::sqrt(1.98)));
  std::vector<double> sorted = k.witness_utility;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<double>{100, 9900});
  CHECK(k.values.items() == 10000);
  CHECK(k.killed.size() == 2);

  oracle::Gen g(61);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = g.between(2, 4);
    std::vector<std::size_t> ends;
    std::size_t end = 0;
    for (std::size_t i = 0; i < n; ++i) ends.push_back(end += g.between(1, 300));
    for (const Variant& variant : std::vector<Variant>{variants::Unconstrained{}, variants::Proportional{},
                                                       variants::Seeded{1.0}, variants::OneStepGreedy{}}) {
      const auto kill = adv_cr_killer(n, ends, variant);
      // the witness gives phase k wholly to the agent killed at its end
      std::vector<double> phase(n);
      for (std::size_t p = 0; p < n; ++p) phase[p] = static_cast<double>(ends[p] - (p ? ends[p - 1] : 0));
      for (std::size_t p = 0; p < n; ++p) CHECK(kill.witness_utility[kill.killed[p]] == phase[p]);
      std::vector<std::size_t> order = kill.killed;
      std::sort(order.begin(), order.end());
      CHECK(order == [&] {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
      }());
      const auto trace = run(kill.values, AgentWeights::equal(n), variant);
      CHECK(trace.utility == kill.policy_utility);
      bool served = true;
      for (double u : trace.utility) served = served && u > 0.0;
      if (served)
        CHECK(competitive_ratio(trace.utility, kill.witness_utility, AgentWeights::equal(n)) >=
              kill.lower_bound * (1 - 1e-12));
    }
  }
  CHECK_THROWS_AS(adv_cr_killer(2, lone, variants::Unconstrained{}), InvalidArgument);
  const std::vector<std::size_t> flat{10, 10};
  CHECK_THROWS_AS(adv_cr_killer(2, flat, variants::Unconstrained{}), InvalidArgument);
}

TEST_CASE("constrained failure instance") {
  CHECK(adv_constrained_failure(1, 1, 3) == ValueSequence(3, 2, std::vector<double>(6, 1.0)));
  CHECK(adv_constrained_failure(4, 1, 2) == ValueSequence(2, 2, std::vector<double>(4, 0.25)));
  CHECK(adv_constrained_failure(0.5, 1, 2) == ValueSequence(2, 2, std::vector<double>(4, 1.0)));
  CHECK_THROWS_AS(adv_constrained_failure(0, 1, 2), InvalidArgument);
}
