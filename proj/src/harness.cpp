#include "pace/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "pace/eg.hpp"
#include "pace/metrics.hpp"
#include "pace/svg.hpp"

namespace fs = std::filesystem;

namespace pace {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> to_number(const std::string& s) {
  double x = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return x;
}

std::size_t to_round(const std::string& s, const std::string& schedule) {
  const auto x = to_number(trim(s));
  if (!x || !(*x >= 1.0) || std::floor(*x) != *x || *x > 1e18)
    throw UsageError("malformed checkpoint schedule \"" + schedule + "\"");
  return static_cast<std::size_t>(*x);
}

const std::set<std::string> kVariantNames = {"pace", "greedy", "proportional", "seeded",
                                             "set-aside", "constrained"};

struct VariantText {
  std::string name;
  std::map<std::string, double> params;
};

VariantText split_variant(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.empty()) throw UsageError("empty variant");
  VariantText vt;
  vt.name = trim(parts[0]);
  if (!kVariantNames.count(vt.name)) throw UsageError("unknown variant \"" + vt.name + "\"");
  for (std::size_t k = 1; k < parts.size(); ++k) {
    const auto eq = parts[k].find('=');
    if (eq == std::string::npos) throw UsageError("variant parameter without '=' in \"" + text + "\"");
    const auto key = trim(parts[k].substr(0, eq));
    const auto value = to_number(trim(parts[k].substr(eq + 1)));
    if (!value) throw UsageError("variant parameter \"" + key + "\" is not a number");
    vt.params[key] = *value;
  }
  std::set<std::string> allowed;
  if (vt.name == "seeded") allowed = {"xi"};
  if (vt.name == "constrained") allowed = {"delta", "low", "high"};
  for (const auto& [key, value] : vt.params)
    if (!allowed.count(key))
      throw UsageError("variant \"" + vt.name + "\" takes no parameter \"" + key + "\"");
  if (vt.name == "constrained") {
    const bool box = vt.params.count("low") || vt.params.count("high");
    if (box == static_cast<bool>(vt.params.count("delta")) ||
        (box && !(vt.params.count("low") && vt.params.count("high"))))
      throw UsageError("constrained needs either delta=D or both low=L and high=H");
  }
  return vt;
}

Variant build_variant(const VariantText& vt, std::size_t agents, const AgentWeights& weights,
                      const ValueSequence* v) {
  if (vt.name == "pace") return variants::Unconstrained{};
  if (vt.name == "greedy") return variants::OneStepGreedy{};
  if (vt.name == "proportional") return variants::Proportional{};
  if (vt.name == "seeded") {
    const auto it = vt.params.find("xi");
    return variants::Seeded{it == vt.params.end() ? 1.0 : it->second};
  }
  if (vt.name == "set-aside") {
    if (!v) throw UsageError("set-aside needs the instance to compute monopolistic utilities");
    return set_aside_exact(*v);
  }
  if (vt.params.count("delta")) return variants::Constrained::around_weights(weights, vt.params.at("delta"));
  return variants::Constrained{std::vector<double>(agents, vt.params.at("low")),
                               std::vector<double>(agents, vt.params.at("high"))};
}

std::string label_of(const std::string& text) {
  const auto parts = split(text, ',');
  std::string out = trim(parts[0]);
  if (parts.size() > 1) {
    out += '(';
    for (std::size_t k = 1; k < parts.size(); ++k) out += (k > 1 ? ";" : "") + trim(parts[k]);
    out += ')';
  }
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

struct VariantOutcome {
  MetricsReport report;
  std::vector<std::vector<double>> envy;  // per checkpoint, per agent
};

struct RepetitionOutcome {
  std::vector<std::size_t> checkpoints;
  std::vector<VariantOutcome> variants;
  std::size_t agents = 0;
};

RepetitionOutcome run_repetition(const ExperimentConfig& config, std::uint32_t rep,
                                 const ValueSequence* loaded) {
  const std::string where = "repetition " + std::to_string(rep + 1);
  ValueSequence v;
  AgentWeights weights;
  std::vector<PrefixSolution> prefixes;
  RepetitionOutcome out;
  try {
    if (loaded)
      v = *loaded;
    else
      v = gen(InputModelSpec{*config.model, config.t, config.seed, rep});
    if (config.normalize) v = normalize_values(v);
    weights = config.weights.empty()
                  ? AgentWeights::equal(v.agents(), 1.0 / static_cast<double>(v.agents()))
                  : AgentWeights(config.weights);
    require_valid(v, weights);
    out.checkpoints = parse_checkpoints(config.checkpoints, v.items());
    if (out.checkpoints.back() != v.items()) out.checkpoints.push_back(v.items());
    prefixes = hindsight_prefix(v, weights, out.checkpoints, config.tol);
  } catch (const std::exception& e) {
    throw Error(where + ": " + e.what());
  }
  out.agents = v.agents();

  for (const auto& text : config.variants) {
    try {
      const Variant variant = parse_variant(text, v, weights);
      RunOptions options;
      options.checkpoints = out.checkpoints;
      const RunTrace trace = run(v, weights, variant, options);
      EvaluationInputs inputs;
      inputs.hindsight_average = prefixes.back().average_utility;
      inputs.prefixes = prefixes;
      VariantOutcome vo;
      vo.report = evaluate_run(v, trace, inputs);
      vo.report.variant = label_of(text);
      for (const auto& cp : trace.checkpoints) vo.envy.push_back(additive_envy(cp.cross, cp.round, weights));
      out.variants.push_back(std::move(vo));
    } catch (const std::exception& e) {
      throw Error(where + ", variant " + text + ": " + e.what());
    }
  }
  return out;
}

void add_rows(std::vector<AggregateRow>& rows, std::size_t round, const std::string& variant,
              const std::vector<double>& per_agent, double max, double mean) {
  for (std::size_t i = 0; i < per_agent.size(); ++i)
    rows.push_back({round, variant, std::to_string(i + 1), per_agent[i]});
  rows.push_back({round, variant, "max", max});
  rows.push_back({round, variant, "mean", mean});
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double max_of(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, x);
  return m;
}

}  // namespace

std::vector<std::size_t> parse_checkpoints(const std::string& schedule, std::size_t t) {
  if (t == 0) throw UsageError("checkpoint schedule needs t >= 1");
  const std::string s = trim(schedule);
  std::vector<std::size_t> out;
  if (s == "geometric" || s.empty()) {
    out = geometric_checkpoints(t);
  } else if (s == "all") {
    for (std::size_t k = 1; k <= t; ++k) out.push_back(k);
  } else if (s.rfind("linear:", 0) == 0) {
    const std::size_t count = to_round(s.substr(7), schedule);
    for (std::size_t k = 1; k <= count; ++k) {
      const std::size_t round = (t * k + count - 1) / count;
      if (round >= 1) out.push_back(round);
    }
  } else {
    for (const auto& part : split(s, ',')) {
      const std::size_t round = to_round(part, schedule);
      if (round > t)
        throw UsageError("checkpoint " + std::to_string(round) + " exceeds the horizon " +
                         std::to_string(t));
      out.push_back(round);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw UsageError("malformed checkpoint schedule \"" + schedule + "\"");
  return out;
}

void check_variant_syntax(const std::string& text) { split_variant(text); }

Variant parse_variant(const std::string& text, const ValueSequence& v, const AgentWeights& weights) {
  return build_variant(split_variant(text), v.agents(), weights, &v);
}

Variant parse_variant(const std::string& text, std::size_t agents, const AgentWeights& weights) {
  return build_variant(split_variant(text), agents, weights, nullptr);
}

InputModel model_from_config(const Json& j, std::uint64_t default_seed) {
  const auto type = j.at("type").get<std::string>();
  const std::uint64_t seed = j.value("support_seed", default_seed);
  if (type == "random-iid")
    return models::Iid{random_distribution(j.at("agents").get<std::size_t>(),
                                           j.at("support").get<std::size_t>(), seed)};
  if (type == "random-periodic")
    return random_periodic(j.at("agents").get<std::size_t>(), j.at("period").get<std::size_t>(),
                           j.value("pool_size", std::size_t{8}), seed);
  return model_from_json(j);
}

ExperimentConfig parse_config(const Json& j, const fs::path& base_dir) {
  static const std::set<std::string> known = {"instance", "model",       "t",    "normalize",
                                              "weights",  "variants",    "repetitions",
                                              "seed",     "checkpoints", "tol",  "out",
                                              "threads"};
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw UsageError("unknown config key \"" + key + "\"");

  ExperimentConfig c;
  try {
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("instance")) {
      fs::path p = j.at("instance").get<std::string>();
      c.instance = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (j.contains("model")) c.model = model_from_config(j.at("model"), c.seed);
    c.t = j.value("t", std::size_t{0});
    c.normalize = j.value("normalize", false);
    if (j.contains("weights")) c.weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("variants")) c.variants = j.at("variants").get<std::vector<std::string>>();
    c.repetitions = j.value("repetitions", std::size_t{1});
    c.checkpoints = j.value("checkpoints", std::string("geometric"));
    c.tol = j.value("tol", 1e-6);
    if (j.contains("out")) {
      fs::path p = j.at("out").get<std::string>();
      c.out = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    c.threads = j.value("threads", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const UsageError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

void validate_config(const ExperimentConfig& c) {
  if (c.instance.has_value() == c.model.has_value())
    throw UsageError("config needs exactly one of \"instance\" and \"model\"");
  if (c.model && c.t == 0) throw UsageError("a generated instance needs \"t\" >= 1");
  if (c.repetitions == 0) throw UsageError("repetitions must be >= 1");
  if (c.variants.empty()) throw UsageError("at least one variant required");
  for (const auto& v : c.variants) check_variant_syntax(v);
  if (!(c.tol > 0.0)) throw UsageError("tol must be positive");
  if (c.t) parse_checkpoints(c.checkpoints, c.t);
}

std::string rows_csv(const std::vector<AggregateRow>& rows) {
  std::string out = "tau,variant,agent,value\n";
  for (const auto& r : rows)
    out += std::to_string(r.round) + ',' + r.variant + ',' + r.agent + ',' + format_double(r.value) + '\n';
  return out;
}

std::vector<AggregateRow> parse_rows_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<AggregateRow> rows;
  std::size_t number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1) {
      if (line != "tau,variant,agent,value") throw CsvError(1, "expected header tau,variant,agent,value");
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 4) throw CsvError(number, "ragged row");
    const auto tau = to_number(cells[0]);
    const auto value = cells[3] == "inf" ? std::optional<double>(INFINITY) : to_number(cells[3]);
    if (!tau || !value) throw CsvError(number, "malformed number");
    rows.push_back({static_cast<std::size_t>(*tau), cells[1], cells[2], *value});
  }
  if (rows.empty()) throw CsvError(0, "no rows");
  return rows;
}

std::string rows_svg(const std::vector<AggregateRow>& rows, const std::string& title,
                     const std::string& y_label) {
  Plot plot;
  plot.title = title;
  plot.y_label = y_label;
  std::vector<std::string> order;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    if (r.agent != "max" && r.agent != "mean") continue;
    const std::string key = r.variant + ", " + (r.agent == "mean" ? "average" : "max");
    if (!index.count(key)) {
      index[key] = plot.series.size();
      plot.series.push_back({key, {}, r.agent == "mean"});
    }
    plot.series[index[key]].points.push_back({static_cast<double>(r.round), r.value});
  }
  return render_svg(plot);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_config(config);

  std::optional<ValueSequence> loaded;
  if (config.instance) {
    try {
      loaded = load_csv(*config.instance).values;
    } catch (const std::exception& e) {
      throw Error("instance " + config.instance->string() + ": " + e.what());
    }
    parse_checkpoints(config.checkpoints, loaded->items());
  }

  const std::size_t reps = config.repetitions;
  std::vector<RepetitionOutcome> outcomes(reps);
  std::vector<std::exception_ptr> errors(reps);
  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        outcomes[r] = run_repetition(config, static_cast<std::uint32_t>(r), loaded ? &*loaded : nullptr);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentResult result;
  const std::size_t n = outcomes.front().agents;
  const auto& cps = outcomes.front().checkpoints;
  const std::size_t nv = config.variants.size();
  const double scale = 1.0 / static_cast<double>(reps);

  for (std::size_t c = 0; c < cps.size(); ++c) {
    for (std::size_t k = 0; k < nv; ++k) {
      std::vector<double> agent_mean(n, 0.0), envy_mean(n, 0.0);
      double max_mean = 0.0, mean_mean = 0.0, envy_max = 0.0, envy_avg = 0.0;
      for (const auto& o : outcomes) {
        const auto& row = o.variants[k].report.trajectory[c];
        const auto& envy = o.variants[k].envy[c];
        for (std::size_t i = 0; i < n; ++i) {
          agent_mean[i] += scale * row.per_agent[i];
          envy_mean[i] += scale * envy[i];
        }
        max_mean += scale * row.max;
        mean_mean += scale * row.mean;
        envy_max += scale * max_of(envy);
        envy_avg += scale * mean_of(envy);
      }
      const std::string& label = outcomes.front().variants[k].report.variant;
      add_rows(result.trajectory, cps[c], label, agent_mean, max_mean, mean_mean);
      add_rows(result.envy, cps[c], label, envy_mean, envy_max, envy_avg);
    }
  }

  Json summary;
  summary["repetitions"] = reps;
  summary["seed"] = config.seed;
  summary["checkpoints"] = cps;
  summary["agents"] = n;
  summary["tol"] = config.tol;
  if (config.model) summary["model"] = model_name(*config.model);
  if (config.instance) summary["instance"] = config.instance->filename().string();
  Json per_variant = Json::object();
  for (std::size_t k = 0; k < nv; ++k) {
    std::vector<double> cr, ratio, final_max, final_mean, envy_mult;
    bool infinite = false;
    for (const auto& o : outcomes) {
      const auto& r = o.variants[k].report;
      cr.push_back(r.competitive_ratio);
      ratio.push_back(r.utility_ratio);
      final_max.push_back(r.trajectory.back().max);
      final_mean.push_back(r.trajectory.back().mean);
      envy_mult.push_back(max_of(r.multiplicative_envy));
      infinite = infinite || !r.flags.empty();
    }
    Json s;
    s["competitive_ratio"] = number_json(mean_of(cr));
    s["utility_ratio"] = number_json(mean_of(ratio));
    s["final_relative_regret_max"] = number_json(mean_of(final_max));
    s["final_relative_regret_mean"] = number_json(mean_of(final_mean));
    s["multiplicative_envy_max"] = number_json(mean_of(envy_mult));
    s["flagged"] = infinite;
    per_variant[outcomes.front().variants[k].report.variant] = std::move(s);
  }
  summary["variants"] = std::move(per_variant);
  result.summary = summary;

  const fs::path out = config.out;
  const fs::path staging = out.parent_path() / ("." + out.filename().string() + ".partial");
  std::vector<std::pair<fs::path, std::string>> files;
  files.push_back({"trajectory.csv", rows_csv(result.trajectory)});
  files.push_back({"envy_trajectory.csv", rows_csv(result.envy)});
  files.push_back({"summary.json", summary.dump(2) + "\n"});
  files.push_back({"relative_regret.svg",
                   rows_svg(result.trajectory, "Relative time-averaged regret", "relative regret")});
  files.push_back({"additive_envy.svg", rows_svg(result.envy, "Additive envy", "envy")});
  for (std::size_t r = 0; r < reps; ++r) {
    char dir[32];
    std::snprintf(dir, sizeof dir, "raw/rep_%03zu", r + 1);
    std::vector<AggregateRow> rows;
    Json metrics = Json::array();
    for (const auto& vo : outcomes[r].variants) {
      for (const auto& row : vo.report.trajectory)
        add_rows(rows, row.round, vo.report.variant, row.per_agent, row.max, row.mean);
      metrics.push_back(metrics_json(vo.report));
    }
    files.push_back({fs::path(dir) / "trajectory.csv", rows_csv(rows)});
    files.push_back({fs::path(dir) / "metrics.json", metrics.dump(2) + "\n"});
  }

  try {
    fs::remove_all(staging);
    for (const auto& [rel, text] : files) write_file(staging / rel, text);
    for (const auto& [rel, text] : files) {
      fs::create_directories((out / rel).parent_path());
      fs::rename(staging / rel, out / rel);
      result.files.push_back(out / rel);
    }
    fs::remove_all(staging);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    for (const auto& p : result.files) fs::remove(p, ec);
    throw;
  }
  return result;
}

}  // namespace pace
