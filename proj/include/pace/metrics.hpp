#pragma once

// Performance metrics for a run against its hindsight benchmark.
//
// Quantities that are undefined because some agent has zero utility come back
// as +infinity and are listed in MetricsReport::flags; nothing here throws for
// that reason except the utility ratios, whose definition needs U > 0.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pace/dynamics.hpp"
#include "pace/eg.hpp"
#include "pace/model.hpp"

namespace pace {

/// max(u_gamma_i - ubar_i, 0).
std::vector<double> regret(std::span<const double> average_utility,
                           std::span<const double> hindsight_average);

/// max_k ubar_ik / B_k - ubar_i / B_i, with ubar_ik = <v_i, x_k> / t.
std::vector<double> additive_envy(const ValueSequence& v, const Allocation& x,
                                  const AgentWeights& weights);
std::vector<double> additive_envy(const CrossUtility& cross, std::size_t items,
                                  const AgentWeights& weights);

/// max_{k != i} (B_i / B_k) (ubar_ik / ubar_i); +inf when ubar_i = 0.
std::vector<double> multiplicative_envy(const ValueSequence& v, const Allocation& x,
                                        const AgentWeights& weights);
std::vector<double> multiplicative_envy(const CrossUtility& cross, const AgentWeights& weights);

/// prod_i U_i^(B_i / ||B||_1).
double nash_welfare(std::span<const double> utility, const AgentWeights& weights);
/// prod_i (U_hindsight_i / U_i)^(B_i / ||B||_1); +inf when some U_i = 0.
double competitive_ratio(std::span<const double> utility, std::span<const double> hindsight,
                         const AgentWeights& weights);

/// sum_tau max_i B_i v_i / (||B||_1 U_i). Throws InvalidArgument when some U_i = 0.
double utility_ratio(const ValueSequence& v, std::span<const double> utility,
                     const AgentWeights& weights);
/// sum_i B_i xi / (U_i + xi) + sum_tau max_i B_i v_i / (U_i + xi).
double utility_ratio_seeded(const ValueSequence& v, std::span<const double> utility,
                            const AgentWeights& weights, double xi);

struct ExpenditureDeviation {
  double value = 0.0;
  /// An infinite expenditure fell after the warm-up window; value is +inf.
  bool flagged = false;
};

/// || (1/t) sum_{tau > warmup} b^tau - B ||^2 over the winners' expenditures.
ExpenditureDeviation expenditure_deviation(const RunTrace& trace, std::size_t warmup);

struct TrajectoryRow {
  std::size_t round = 0;
  std::vector<double> per_agent;  // relative regret; 0 for excluded agents
  std::vector<bool> excluded;     // hindsight utility below 1e-12
  double max = 0.0;
  double mean = 0.0;
  std::size_t excluded_count = 0;
};

/// max(u*_i - ubar_i, 0) / u*_i at every checkpoint of the trace.
std::vector<TrajectoryRow> relative_regret_trajectory(const RunTrace& trace,
                                                      std::span<const PrefixSolution> prefixes);

struct MetricsReport {
  std::string variant;
  std::size_t items = 0;
  std::vector<double> utility;
  std::vector<double> hindsight_utility;
  std::vector<double> regret;
  std::vector<double> additive_envy;
  std::vector<double> multiplicative_envy;
  double nash_welfare = 0.0;
  double competitive_ratio = 0.0;
  double utility_ratio = 0.0;
  std::optional<double> utility_ratio_seeded;
  std::optional<ExpenditureDeviation> expenditure_deviation;
  std::vector<TrajectoryRow> trajectory;
  std::vector<std::string> flags;
};

struct EvaluationInputs {
  /// Time-averaged hindsight utilities over the whole horizon.
  std::vector<double> hindsight_average;
  /// Prefix benchmarks at the trace's checkpoints (optional).
  std::vector<PrefixSolution> prefixes;
  /// Seed for R_xi; defaults to the trace's own seed for seeded runs.
  std::optional<double> seed;
  /// Warm-up length for the expenditure deviation (winner variants only).
  std::optional<std::size_t> warmup;
};

MetricsReport evaluate_run(const ValueSequence& v, const RunTrace& trace,
                           const EvaluationInputs& inputs);

}  // namespace pace
