#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pace/eg.hpp"
#include "pace/harness.hpp"
#include "pace/inputs.hpp"
#include "pace/metrics.hpp"
#include "pace/serialize.hpp"
#include "pace/svg.hpp"

namespace fs = std::filesystem;
using namespace pace;

namespace {

std::size_t count_arg(const std::string& text, const std::string& flag) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(x >= 0.0) || std::floor(x) != x || x > 1e18)
    throw UsageError(flag + " expects a nonnegative integer, got \"" + text + "\"");
  return static_cast<std::size_t>(x);
}

std::vector<std::size_t> count_list(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(count_arg(part, flag));
  if (out.empty()) throw UsageError(flag + " is empty");
  return out;
}

std::vector<double> number_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stod(part, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || part.empty()) throw UsageError(flag + ": malformed number \"" + part + "\"");
  }
  return out;
}

AgentWeights weights_for(const std::string& text, std::size_t agents) {
  if (text.empty()) return AgentWeights::equal(agents, 1.0 / static_cast<double>(agents));
  auto w = number_list(text, "--weights");
  if (w.size() != agents)
    throw UsageError("--weights has " + std::to_string(w.size()) + " entries for " +
                     std::to_string(agents) + " agents");
  return AgentWeights(std::move(w));
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path);
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

struct GenArgs {
  std::string model = "iid", spec, out, t = "0", n = "4", support = "8", period = "8", pool = "8";
  std::uint64_t seed = 0;
  std::uint32_t rep = 0;
  bool normalize = false;
};

int do_gen(const GenArgs& a) {
  InputModelSpec spec;
  if (!a.spec.empty()) {
    spec.model = model_from_config(read_json(a.spec), a.seed);
  } else if (a.model == "iid") {
    spec.model = models::Iid{random_distribution(count_arg(a.n, "--n"), count_arg(a.support, "--support"), a.seed)};
  } else if (a.model == "periodic") {
    spec.model = random_periodic(count_arg(a.n, "--n"), count_arg(a.period, "--period"),
                                 count_arg(a.pool, "--pool-size"), a.seed);
  } else {
    throw UsageError("--model must be iid or periodic (use --spec for other models)");
  }
  spec.t = count_arg(a.t, "--t");
  spec.seed = a.seed;
  spec.repetition = a.rep;
  try {
    validate_spec(spec);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  ValueSequence v = gen(spec);
  if (a.normalize) v = normalize_values(v);
  emit(a.out, format_csv(v));
  return 0;
}

struct RunArgs {
  std::string config, checkpoints, out;
  std::vector<std::string> variants;
  std::optional<std::size_t> reps, threads;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

int do_run(const RunArgs& a) {
  ExperimentConfig c = load_config(a.config);
  if (a.reps) c.repetitions = *a.reps;
  if (a.seed) c.seed = *a.seed;
  if (a.tol) c.tol = *a.tol;
  if (a.threads) c.threads = *a.threads;
  if (!a.checkpoints.empty()) c.checkpoints = a.checkpoints;
  if (!a.out.empty()) c.out = a.out;
  if (!a.variants.empty()) c.variants = a.variants;
  if (a.seed && c.model) {
    // random supports follow the overridden seed unless pinned in the file
    const Json j = read_json(a.config);
    if (j.contains("model") && !j.at("model").contains("support_seed"))
      c.model = model_from_config(j.at("model"), c.seed);
  }
  validate_config(c);
  const auto result = run_experiment(c);
  for (const auto& f : result.files) std::cout << f.string() << '\n';
  return 0;
}

struct EvalArgs {
  std::string instance, trace, variant = "pace", weights, checkpoints = "geometric", out;
  double tol = 1e-6;
  std::optional<std::size_t> warmup;
};

int do_eval(const EvalArgs& a) {
  const ValueSequence v = load_csv(a.instance).values;
  RunTrace trace;
  if (!a.trace.empty()) {
    trace = trace_from_json(read_json(a.trace));
    if (trace.items != v.items() || trace.agents != v.agents())
      throw UsageError("trace does not match the instance dimensions");
  } else {
    const AgentWeights w = weights_for(a.weights, v.agents());
    const Variant variant = parse_variant(a.variant, v, w);
    RunOptions options;
    options.checkpoints = parse_checkpoints(a.checkpoints, v.items());
    if (options.checkpoints.back() != v.items()) options.checkpoints.push_back(v.items());
    trace = run(v, w, variant, options);
  }
  std::vector<std::size_t> rounds;
  for (const auto& cp : trace.checkpoints) rounds.push_back(cp.round);
  if (rounds.empty() || rounds.back() != v.items()) rounds.push_back(v.items());
  const auto prefixes = hindsight_prefix(v, trace.weights, rounds, a.tol);
  EvaluationInputs inputs;
  inputs.hindsight_average = prefixes.back().average_utility;
  if (trace.checkpoints.size() == rounds.size()) inputs.prefixes = prefixes;
  inputs.warmup = a.warmup;
  const MetricsReport report = evaluate_run(v, trace, inputs);
  emit(a.out, metrics_json(report).dump(2) + "\n");
  return 0;
}

struct SolveArgs {
  std::string instance, weights, out;
  double tol = 1e-9;
  bool allocation = false, check = false;
};

int do_solve(const SolveArgs& a) {
  const ValueSequence v = load_csv(a.instance).values;
  const AgentWeights w = weights_for(a.weights, v.agents());
  require_valid(v, w);
  const MarketEquilibrium eq = solve_eg(v, w, a.tol);
  Json j = equilibrium_json(eq, a.allocation);
  if (a.check) {
    const EquilibriumCheck c = check_equilibrium(eq, v, w, 1e-6);
    j["check"] = {{"passed", c.passed()}, {"summary", c.summary()}};
  }
  emit(a.out, j.dump(2) + "\n");
  return 0;
}

struct AttackArgs {
  std::string construction, n = "3", phases, variant = "pace", out, rounding = "ceil", repeats = "100000",
                            t = "1000";
  double epsilon = 0.1, a = 1.001, r2 = 0.5, cap = 1.0;
};

int do_attack(const AttackArgs& a) {
  Json summary;
  summary["construction"] = a.construction;
  ValueSequence values;
  if (a.construction == "cr-killer") {
    const std::size_t n = count_arg(a.n, "--n");
    if (a.phases.empty()) throw UsageError("cr-killer needs --phases");
    const auto phases = count_list(a.phases, "--phases");
    const Variant variant = parse_variant(a.variant, n, AgentWeights::equal(n, 1.0 / static_cast<double>(n)));
    const KillerInstance k = adv_cr_killer(n, phases, variant);
    const AgentWeights w = AgentWeights::equal(n, 1.0 / static_cast<double>(n));
    summary["variant"] = a.variant;
    summary["phase_ends"] = phases;
    summary["lower_bound"] = number_json(k.lower_bound);
    std::vector<std::size_t> killed;
    for (auto i : k.killed) killed.push_back(i + 1);
    summary["killed"] = killed;
    summary["policy_utility"] = k.policy_utility;
    summary["witness_utility"] = k.witness_utility;
    summary["witness_ratio"] = number_json(competitive_ratio(k.policy_utility, k.witness_utility, w));
    values = k.values;
    std::cout << "certified competitive ratio lower bound: " << format_double(k.lower_bound) << '\n';
  } else if (a.construction == "envy") {
    const EnvyBase base = adjust_envy_base(a.epsilon, a.a);
    PhaseRounding rounding = PhaseRounding::Ceil;
    if (a.rounding == "floor")
      rounding = PhaseRounding::Floor;
    else if (a.rounding != "ceil")
      throw UsageError("--rounding must be ceil or floor");
    const EnvyInstance e = adv_envy_worstcase(a.epsilon, base.a, count_arg(a.repeats, "--repeats"), rounding);
    summary["a"] = base.a;
    summary["phases_per_side"] = base.k;
    summary["predicted_envy"] = number_json(e.predicted_envy);
    summary["limit_envy"] = number_json(e.limit_envy);
    values = e.values;
    std::cout << "predicted multiplicative envy: " << format_double(e.predicted_envy) << '\n';
  } else if (a.construction == "constrained-failure") {
    values = adv_constrained_failure(a.r2, a.cap, count_arg(a.t, "--t"));
    summary["r2"] = a.r2;
    summary["cap"] = a.cap;
  } else {
    throw UsageError("--construction must be envy, cr-killer or constrained-failure");
  }
  summary["items"] = values.items();
  summary["agents"] = values.agents();
  if (!a.out.empty()) {
    emit(a.out, format_csv(values));
    emit(fs::path(a.out).replace_extension(".json").string(), summary.dump(2) + "\n");
  }
  std::cout << summary.dump(2) << '\n';
  return 0;
}

struct PlotArgs {
  std::string input, out, title = "Relative time-averaged regret", y_label = "relative regret";
};

int do_plot(const PlotArgs& a) {
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw UsageError("cannot open " + a.input);
  std::stringstream ss;
  ss << in.rdbuf();
  emit(a.out, rows_svg(parse_rows_csv(ss.str()), a.title, a.y_label));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online fair division with pacing dynamics: simulation and evaluation"};
  app.require_subcommand(1);

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "generate an instance CSV from an input model");
  gen_cmd->add_option("--model", gen_args.model, "iid or periodic");
  gen_cmd->add_option("--spec", gen_args.spec, "JSON model spec (overrides --model)");
  gen_cmd->add_option("--n", gen_args.n, "agents");
  gen_cmd->add_option("--support", gen_args.support, "support points (iid)");
  gen_cmd->add_option("--period", gen_args.period, "number of pools (periodic)");
  gen_cmd->add_option("--pool-size", gen_args.pool, "vectors per pool (periodic)");
  gen_cmd->add_option("--t", gen_args.t, "rounds")->required();
  gen_cmd->add_option("--seed", gen_args.seed);
  gen_cmd->add_option("--rep", gen_args.rep, "repetition index");
  gen_cmd->add_flag("--normalize", gen_args.normalize, "rescale each agent to mean value 1");
  gen_cmd->add_option("--out", gen_args.out, "output CSV (default stdout)");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", run_args.config)->required();
  run_cmd->add_option("--reps", run_args.reps);
  run_cmd->add_option("--seed", run_args.seed);
  run_cmd->add_option("--tol", run_args.tol);
  run_cmd->add_option("--threads", run_args.threads);
  run_cmd->add_option("--checkpoints", run_args.checkpoints);
  run_cmd->add_option("--out", run_args.out, "output directory");
  run_cmd->add_option("--variant", run_args.variants, "repeatable");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "metrics report for a run");
  eval_cmd->add_option("--instance", eval_args.instance)->required();
  eval_cmd->add_option("--trace", eval_args.trace, "trace JSON (default: run --variant)");
  eval_cmd->add_option("--variant", eval_args.variant);
  eval_cmd->add_option("--weights", eval_args.weights, "comma list (default 1/n)");
  eval_cmd->add_option("--checkpoints", eval_args.checkpoints);
  eval_cmd->add_option("--tol", eval_args.tol);
  eval_cmd->add_option("--warmup", eval_args.warmup);
  eval_cmd->add_option("--out", eval_args.out);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "hindsight equilibrium of an instance");
  solve_cmd->add_option("--instance", solve_args.instance)->required();
  solve_cmd->add_option("--weights", solve_args.weights);
  solve_cmd->add_option("--tol", solve_args.tol);
  solve_cmd->add_flag("--allocation", solve_args.allocation, "include the allocation matrix");
  solve_cmd->add_flag("--check", solve_args.check, "verify equilibrium conditions");
  solve_cmd->add_option("--out", solve_args.out);

  AttackArgs attack_args;
  auto* attack_cmd = app.add_subcommand("attack", "adversarial constructions");
  attack_cmd->add_option("--construction", attack_args.construction)->required();
  attack_cmd->add_option("--n", attack_args.n);
  attack_cmd->add_option("--phases", attack_args.phases, "cumulative phase ends, e.g. 1e2,1e4,1e6");
  attack_cmd->add_option("--variant", attack_args.variant);
  attack_cmd->add_option("--epsilon", attack_args.epsilon);
  attack_cmd->add_option("--a", attack_args.a);
  attack_cmd->add_option("--repeats", attack_args.repeats);
  attack_cmd->add_option("--rounding", attack_args.rounding);
  attack_cmd->add_option("--r2", attack_args.r2);
  attack_cmd->add_option("--cap", attack_args.cap);
  attack_cmd->add_option("--t", attack_args.t);
  attack_cmd->add_option("--out", attack_args.out, "instance CSV; a JSON summary is written beside it");

  PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot", "trajectory CSV to SVG");
  plot_cmd->add_option("input", plot_args.input)->required();
  plot_cmd->add_option("--out", plot_args.out);
  plot_cmd->add_option("--title", plot_args.title);
  plot_cmd->add_option("--y-label", plot_args.y_label);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen_cmd) return do_gen(gen_args);
    if (*run_cmd) return do_run(run_args);
    if (*eval_cmd) return do_eval(eval_args);
    if (*solve_cmd) return do_solve(solve_args);
    if (*attack_cmd) return do_attack(attack_args);
    if (*plot_cmd) return do_plot(plot_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
