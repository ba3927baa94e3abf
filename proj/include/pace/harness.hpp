#pragma once

// Experiment orchestration: load or generate instances for each repetition,
// run the configured dynamics, benchmark them against prefix hindsight
// equilibria, and write trajectory CSV, summary JSON and SVG plots.
//
// Config file (JSON):
//   {
//     "instance": "values.csv",            // or "model": {...} with "t"
//     "model": {"type": "random-iid", "agents": 4, "support": 8},
//     "t": 200000,
//     "normalize": false,                  // rescale each agent to mean value 1
//     "weights": [0.25, 0.25, 0.25, 0.25], // default: 1/n each
//     "variants": ["pace", "proportional"],
//     "repetitions": 10,
//     "seed": 7,
//     "checkpoints": "geometric",
//     "tol": 1e-6,
//     "out": "results",
//     "threads": 0                         // 0: one per hardware thread
//   }
// Model types are those of model_json plus "random-iid" {agents, support} and
// "random-periodic" {agents, period, pool_size}, whose supports are drawn
// from "support_seed" (default: the config seed).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pace/dynamics.hpp"
#include "pace/inputs.hpp"
#include "pace/serialize.hpp"

namespace pace {

/// Malformed command-line or config input (CLI exit code 2).
class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// "geometric" (powers of two plus t), "all", "linear:K" (K evenly spaced
/// rounds ending at t) or a comma list such as "1,10,1e3". Sorted, unique,
/// within [1, t]; throws UsageError otherwise.
std::vector<std::size_t> parse_checkpoints(const std::string& schedule, std::size_t t);

/// "pace", "greedy", "proportional", "seeded[,xi=X]", "set-aside" (exact
/// monopolistic utilities of `v`), "constrained,delta=D" (around the weights)
/// or "constrained,low=L,high=H" (same interval for every agent).
Variant parse_variant(const std::string& text, const ValueSequence& v, const AgentWeights& weights);
/// Parses without an instance; set-aside is rejected.
Variant parse_variant(const std::string& text, std::size_t agents, const AgentWeights& weights);
/// Throws UsageError for an unknown name or malformed parameter list.
void check_variant_syntax(const std::string& text);

struct ExperimentConfig {
  std::optional<std::filesystem::path> instance;
  std::optional<InputModel> model;
  std::size_t t = 0;
  bool normalize = false;
  std::vector<double> weights;
  std::vector<std::string> variants{"pace"};
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  std::string checkpoints = "geometric";
  double tol = 1e-6;
  std::filesystem::path out = "results";
  std::size_t threads = 0;
};

/// Relative paths inside the JSON are resolved against `base_dir`.
ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
void validate_config(const ExperimentConfig& config);

/// Resolves "random-iid" / "random-periodic" into concrete models.
InputModel model_from_config(const Json& j, std::uint64_t default_seed);

struct AggregateRow {
  std::size_t round = 0;
  std::string variant;
  std::string agent;  // "1".."n", "max" or "mean"
  double value = 0.0;
};

struct ExperimentResult {
  std::vector<AggregateRow> trajectory;   // relative regret, mean over repetitions
  std::vector<AggregateRow> envy;         // additive envy, mean over repetitions
  Json summary;
  std::vector<std::filesystem::path> files;
};

/// Writes into config.out; on failure nothing new is left behind and the error
/// names the repetition and variant.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::string rows_csv(const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> parse_rows_csv(const std::string& text);
/// max and mean series per variant.
std::string rows_svg(const std::vector<AggregateRow>& rows, const std::string& title,
                     const std::string& y_label);

}  // namespace pace
