#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "oracles.hpp"
#include "pace/model.hpp"

using namespace pace;

TEST_CASE("validation reports the first violation") {
  const auto identity = ValueSequence::from_rows({{1, 0}, {0, 1}});
  CHECK(validate_instance(identity, AgentWeights::equal(2)).ok);

  const auto negative = ValueSequence::from_rows({{1, 0}, {0, -1}});
  const auto bad = validate_instance(negative, AgentWeights::equal(2));
  CHECK_FALSE(bad.ok);
  CHECK(bad.item == 1);
  CHECK(bad.agent == 1);

  const auto zero_weight = validate_instance(identity, AgentWeights({1, 0}));
  CHECK_FALSE(zero_weight.ok);
  CHECK(zero_weight.message.find("nonpositive weight at agent 2") != std::string::npos);
  CHECK_THROWS_AS(require_valid(identity, AgentWeights({1, 0})), InvalidArgument);

  const auto no_value = ValueSequence::from_rows({{1, 0}, {1, 0}});
  CHECK_FALSE(validate_instance(no_value, AgentWeights::equal(2)).ok);

  const auto nan = ValueSequence::from_rows({{1, std::nan("")}});
  CHECK_FALSE(validate_instance(nan, AgentWeights::equal(2)).ok);
  CHECK_FALSE(validate_instance(identity, AgentWeights::equal(3)).ok);
}

TEST_CASE("csv parsing") {
  const auto parsed = parse_csv("a,b\n1,0\n0,1\n");
  CHECK(parsed.values.items() == 2);
  CHECK(parsed.values.agents() == 2);
  CHECK(parsed.values == ValueSequence::from_rows({{1, 0}, {0, 1}}));
  CHECK(parsed.agent_names == std::vector<std::string>{"a", "b"});

  try {
    parse_csv("a,b\n1,0\n1,x\n");
    FAIL("expected a CsvError");
  } catch (const CsvError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3: malformed number") != std::string::npos);
  }
  try {
    parse_csv("a,b\n");
    FAIL("expected a CsvError");
  } catch (const CsvError& e) {
    CHECK(std::string(e.what()).find("no items") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv("a,b\n1,0\n1\n"), CsvError);
}

TEST_CASE("csv round trip is bit exact") {
  oracle::Gen g(11);
  const auto dir = std::filesystem::temp_directory_path() / "pace_model_roundtrip";
  std::filesystem::create_directories(dir);
  for (int trial = 0; trial < 50; ++trial) {
    auto v = g.values(g.between(1, 30), g.between(1, 5), 0.3);
    if (trial % 5 == 0) v = v.scaled(1e-300 * (1 + trial));
    if (trial % 7 == 0) v = v.scaled(3.0e200);
    CHECK(parse_csv(format_csv(v)).values == v);
    const auto path = dir / "v.csv";
    save_csv(path, v);
    CHECK(load_csv(path).values == v);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("normalization") {
  CHECK(normalize_values(ValueSequence::from_rows({{2}, {0}})) == ValueSequence::from_rows({{2}, {0}}));
  CHECK(normalize_values(ValueSequence::from_rows({{4}, {0}})) == ValueSequence::from_rows({{2}, {0}}));
  CHECK(normalize_values(ValueSequence::from_rows({{1, 3}, {1, 1}})) ==
        ValueSequence::from_rows({{1, 1.5}, {1, 0.5}}));

  oracle::Gen g(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = g.values(g.between(1, 40), g.between(1, 5), 0.4).scaled(0.1 + 10 * g.unit());
    const auto once = normalize_values(v);
    const auto twice = normalize_values(once);
    for (std::size_t k = 0; k < once.data().size(); ++k)
      CHECK(twice.data()[k] == doctest::Approx(once.data()[k]).epsilon(1e-12));
    const auto sums = once.column_sums();
    for (double s : sums) CHECK(s / static_cast<double>(v.items()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(extremity(once).epsilon == doctest::Approx(extremity(v).epsilon).epsilon(1e-12));
  }
}

TEST_CASE("extremity") {
  CHECK(extremity(ValueSequence::from_rows({{1}, {1}, {0}})).epsilon == 1.0);
  CHECK(extremity(ValueSequence::from_rows({{0.1}, {1}})).epsilon == doctest::Approx(0.1));
  CHECK(extremity(ValueSequence::from_rows({{0.5, 0.2}, {1, 0}, {1, 1}})).epsilon == doctest::Approx(0.2));
}

TEST_CASE("cross utility and feasibility") {
  const auto v = ValueSequence::from_rows({{1, 2}, {3, 4}});
  Allocation x(2, 2);
  x(0, 0) = 1.0;
  x(1, 0) = 0.5;
  x(1, 1) = 0.5;
  CHECK(x.feasible());
  const auto c = cross_utility(v, x);
  CHECK(c[0][0] == 2.5);
  CHECK(c[0][1] == 1.5);
  CHECK(c[1][0] == 4.0);
  CHECK(c[1][1] == 2.0);
  x(1, 1) = 0.6;
  CHECK_FALSE(x.feasible());
}

TEST_CASE("value sequence helpers") {
  const auto v = ValueSequence::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(v.prefix(1) == ValueSequence::from_rows({{1, 2, 3}}));
  const std::vector<std::size_t> keep{0, 2};
  CHECK(v.select_agents(keep) == ValueSequence::from_rows({{1, 3}, {4, 6}}));
  CHECK(v.max_value() == 6.0);
  CHECK(v.column_sums() == std::vector<double>{5, 7, 9});
  CHECK_THROWS_AS(ValueSequence::from_rows({{1, 2}, {3}}), InvalidArgument);
  CHECK(AgentWeights({1, 3}).normalized()[1] == 0.75);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
