#include "pace/serialize.hpp"

#include <cmath>
#include <sstream>

namespace pace {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Json ext_json(const ExtReal& x) { return x.infinite ? Json("inf") : Json(x.value); }

ExtReal ext_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return ExtReal::inf();
  return ExtReal::of(j.get<double>());
}

Json ext_vector(const std::vector<ExtReal>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(ext_json(x));
  return out;
}

std::vector<ExtReal> ext_vector_from(const Json& j) {
  std::vector<ExtReal> out;
  for (const auto& x : j) out.push_back(ext_from_json(x));
  return out;
}

Json numbers(std::span<const double> xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(number_json(x));
  return out;
}

std::vector<double> numbers_from(const Json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from_json(x));
  return out;
}

CrossUtility cross_from(const Json& j) {
  CrossUtility out;
  for (const auto& row : j) out.push_back(numbers_from(row));
  return out;
}

Json cross_json(const CrossUtility& c) {
  Json out = Json::array();
  for (const auto& row : c) out.push_back(numbers(row));
  return out;
}

}  // namespace

Json number_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    throw InvalidArgument("expected a number, got \"" + s + "\"");
  }
  return j.get<double>();
}

Json variant_json(const Variant& variant) {
  Json j;
  j["name"] = variant_name(variant);
  std::visit(overloaded{
                 [](const variants::Unconstrained&) {},
                 [](const variants::OneStepGreedy&) {},
                 [](const variants::Proportional&) {},
                 [&](const variants::Constrained& c) {
                   j["low"] = numbers(c.low);
                   j["high"] = numbers(c.high);
                 },
                 [&](const variants::Seeded& s) { j["xi"] = s.xi; },
                 [&](const variants::SetAside& s) { j["monopolistic"] = numbers(s.monopolistic); },
             },
             variant);
  return j;
}

Variant variant_from_json(const Json& j) {
  const auto name = j.at("name").get<std::string>();
  if (name == "pace") return variants::Unconstrained{};
  if (name == "greedy") return variants::OneStepGreedy{};
  if (name == "proportional") return variants::Proportional{};
  if (name == "seeded") return variants::Seeded{j.at("xi").get<double>()};
  if (name == "constrained")
    return variants::Constrained{numbers_from(j.at("low")), numbers_from(j.at("high"))};
  if (name == "set-aside") return variants::SetAside{numbers_from(j.at("monopolistic"))};
  throw InvalidArgument("unknown variant \"" + name + "\"");
}

std::string trace_csv(const RunTrace& trace) {
  std::ostringstream os;
  os << "tau";
  for (const char* col : {"ubar", "beta", "spend"})
    for (std::size_t i = 0; i < trace.agents; ++i) os << ',' << col << '_' << (i + 1);
  os << '\n';
  for (const auto& cp : trace.checkpoints) {
    os << cp.round;
    for (double x : cp.average_utility) os << ',' << format_double(x);
    for (const auto& x : cp.multiplier) os << ',' << format_double(x.to_double());
    for (const auto& x : cp.cumulative_expenditure) os << ',' << format_double(x.to_double());
    os << '\n';
  }
  return os.str();
}

Json trace_json(const RunTrace& trace) {
  Json j;
  j["variant"] = variant_json(trace.variant);
  j["weights"] = numbers(trace.weights.values());
  j["items"] = trace.items;
  j["agents"] = trace.agents;
  Json winners = Json::array();
  for (auto w : trace.winners) winners.push_back(w == kNoWinner ? Json(nullptr) : Json(w + 1));
  j["winners"] = std::move(winners);
  j["winner_spend"] = ext_vector(trace.winner_spend);
  j["utility"] = numbers(trace.utility);
  j["average_utility"] = numbers(trace.average_utility);
  j["multiplier"] = ext_vector(trace.multiplier);
  j["cross"] = cross_json(trace.cross);
  Json cps = Json::array();
  for (const auto& cp : trace.checkpoints) {
    Json c;
    c["round"] = cp.round;
    c["average_utility"] = numbers(cp.average_utility);
    c["multiplier"] = ext_vector(cp.multiplier);
    c["cumulative_expenditure"] = ext_vector(cp.cumulative_expenditure);
    c["cross"] = cross_json(cp.cross);
    cps.push_back(std::move(c));
  }
  j["checkpoints"] = std::move(cps);
  return j;
}

RunTrace trace_from_json(const Json& j) {
  RunTrace t;
  t.variant = variant_from_json(j.at("variant"));
  t.weights = AgentWeights(numbers_from(j.at("weights")));
  t.items = j.at("items").get<std::size_t>();
  t.agents = j.at("agents").get<std::size_t>();
  for (const auto& w : j.at("winners"))
    t.winners.push_back(w.is_null() ? kNoWinner : w.get<std::uint32_t>() - 1);
  t.winner_spend = ext_vector_from(j.at("winner_spend"));
  t.utility = numbers_from(j.at("utility"));
  t.average_utility = numbers_from(j.at("average_utility"));
  t.multiplier = ext_vector_from(j.at("multiplier"));
  t.cross = cross_from(j.at("cross"));
  for (const auto& c : j.at("checkpoints")) {
    Checkpoint cp;
    cp.round = c.at("round").get<std::size_t>();
    cp.average_utility = numbers_from(c.at("average_utility"));
    cp.multiplier = ext_vector_from(c.at("multiplier"));
    cp.cumulative_expenditure = ext_vector_from(c.at("cumulative_expenditure"));
    cp.cross = cross_from(c.at("cross"));
    t.checkpoints.push_back(std::move(cp));
  }
  if (t.winners.size() != t.items || t.winner_spend.size() != t.items ||
      t.utility.size() != t.agents || t.weights.size() != t.agents)
    throw InvalidArgument("trace JSON is inconsistent");
  return t;
}

Json equilibrium_json(const MarketEquilibrium& eq, bool include_allocation) {
  Json j;
  j["utility"] = numbers(eq.utility);
  j["multiplier"] = numbers(eq.multiplier);
  j["price"] = numbers(eq.price);
  j["gap"] = number_json(eq.gap);
  j["iterations"] = eq.iterations;
  if (include_allocation) {
    Json x = Json::array();
    for (std::size_t tau = 0; tau < eq.allocation.items(); ++tau) x.push_back(numbers(eq.allocation.row(tau)));
    j["allocation"] = std::move(x);
  }
  return j;
}

Json metrics_json(const MetricsReport& r) {
  Json j;
  j["variant"] = r.variant;
  j["items"] = r.items;
  j["utility"] = numbers(r.utility);
  j["hindsight_utility"] = numbers(r.hindsight_utility);
  j["regret"] = numbers(r.regret);
  j["additive_envy"] = numbers(r.additive_envy);
  j["multiplicative_envy"] = numbers(r.multiplicative_envy);
  j["nash_welfare"] = number_json(r.nash_welfare);
  j["competitive_ratio"] = number_json(r.competitive_ratio);
  j["utility_ratio"] = number_json(r.utility_ratio);
  if (r.utility_ratio_seeded) j["utility_ratio_seeded"] = number_json(*r.utility_ratio_seeded);
  if (r.expenditure_deviation) {
    j["expenditure_deviation"] = number_json(r.expenditure_deviation->value);
    j["expenditure_flagged"] = r.expenditure_deviation->flagged;
  }
  Json rows = Json::array();
  for (const auto& row : r.trajectory) {
    Json x;
    x["round"] = row.round;
    x["per_agent"] = numbers(row.per_agent);
    x["max"] = row.max;
    x["mean"] = row.mean;
    x["excluded"] = row.excluded_count;
    rows.push_back(std::move(x));
  }
  j["trajectory"] = std::move(rows);
  j["flags"] = r.flags;
  return j;
}

Json distribution_json(const FiniteDistribution& d) {
  Json support = Json::array();
  for (const auto& row : d.support) support.push_back(numbers(row));
  return Json{{"support", support}, {"probs", numbers(d.probs)}};
}

FiniteDistribution distribution_from_json(const Json& j) {
  FiniteDistribution d;
  for (const auto& row : j.at("support")) d.support.push_back(numbers_from(row));
  d.probs = numbers_from(j.at("probs"));
  return d;
}

Json model_json(const InputModel& model) {
  Json j;
  j["type"] = model_name(model);
  std::visit(overloaded{
                 [&](const models::Iid& m) { j["dist"] = distribution_json(m.dist); },
                 [&](const models::Periodic& m) {
                   Json pools = Json::array();
                   for (const auto& pool : m.pools) {
                     Json p = Json::array();
                     for (const auto& row : pool) p.push_back(numbers(row));
                     pools.push_back(std::move(p));
                   }
                   j["pools"] = std::move(pools);
                 },
                 [&](const models::Block& m) {
                   j["lengths"] = m.lengths;
                   Json ds = Json::array();
                   for (const auto& d : m.dists) ds.push_back(distribution_json(d));
                   j["dists"] = std::move(ds);
                 },
                 [&](const models::Ergodic& m) {
                   Json states = Json::array();
                   for (const auto& row : m.states) states.push_back(numbers(row));
                   j["states"] = std::move(states);
                   j["transition"] = m.transition;
                   j["initial"] = m.initial;
                 },
                 [&](const models::Corrupted& m) {
                   j["base"] = distribution_json(m.base);
                   j["corruption"] = distribution_json(m.corruption);
                   j["fraction"] = m.fraction;
                 },
             },
             model);
  return j;
}

InputModel model_from_json(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "iid") return models::Iid{distribution_from_json(j.at("dist"))};
  if (type == "periodic") {
    models::Periodic m;
    for (const auto& pool : j.at("pools")) {
      std::vector<std::vector<double>> rows;
      for (const auto& row : pool) rows.push_back(numbers_from(row));
      m.pools.push_back(std::move(rows));
    }
    return m;
  }
  if (type == "block") {
    models::Block m;
    m.lengths = j.at("lengths").get<std::vector<std::size_t>>();
    for (const auto& d : j.at("dists")) m.dists.push_back(distribution_from_json(d));
    return m;
  }
  if (type == "ergodic") {
    models::Ergodic m;
    for (const auto& row : j.at("states")) m.states.push_back(numbers_from(row));
    m.transition = j.at("transition").get<std::vector<std::vector<double>>>();
    m.initial = j.value("initial", std::size_t{0});
    return m;
  }
  if (type == "corrupted") {
    models::Corrupted m;
    m.base = distribution_from_json(j.at("base"));
    m.corruption = distribution_from_json(j.at("corruption"));
    m.fraction = j.at("fraction").get<double>();
    return m;
  }
  throw InvalidArgument("unknown input model type \"" + type + "\"");
}

}  // namespace pace
