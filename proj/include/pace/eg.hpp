#pragma once

// Eisenberg-Gale hindsight benchmark: solvers for the finite-horizon market and
// the finite-support underlying market, the primal and dual objectives, and an
// equilibrium checker.
//
// The solver runs proportional-response iterations on a market whose identical
// items are merged into one good with integer supply, and periodically tries to
// snap the iterate to an exact equilibrium on its tight edges. Every answer is
// certified by the duality gap dual(beta(x)) - primal(x).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pace/model.hpp"

namespace pace {

struct MarketEquilibrium {
  Allocation allocation;
  std::vector<double> utility;     // <v_i, x_i>, cumulative units
  std::vector<double> multiplier;  // beta_i = B_i / u_i
  std::vector<double> price;       // per item: max_i beta_i v_i
  double gap = 0.0;
  std::size_t iterations = 0;
};

struct EgOptions {
  /// Stop once gap <= tol * ||B||_1.
  double tol = 1e-9;
  std::size_t max_iterations = 200000;
};

class NonConvergence : public Error {
 public:
  NonConvergence(double gap, std::size_t iterations);
  double last_gap() const { return gap_; }

 private:
  double gap_;
};

MarketEquilibrium solve_eg(const ValueSequence& v, const AgentWeights& weights,
                           const EgOptions& options = {});
MarketEquilibrium solve_eg(const ValueSequence& v, const AgentWeights& weights, double tol);

/// sum_tau max_i beta_i v_i - sum_i B_i log beta_i + sum_i (B_i log B_i - B_i).
double dual_objective(std::span<const double> beta, const ValueSequence& v,
                      const AgentWeights& weights);
/// sum_i B_i log u_i (-inf when some u_i is 0).
double primal_objective(std::span<const double> utility, const AgentWeights& weights);
double primal_objective(const Allocation& x, const ValueSequence& v, const AgentWeights& weights);

struct UnderlyingMarket {
  std::vector<std::vector<double>> support;
  std::vector<double> probs;
  std::vector<double> utility;     // time-averaged u*
  std::vector<double> multiplier;  // beta* = B / u*
  double gap = 0.0;
};

UnderlyingMarket solve_underlying(const std::vector<std::vector<double>>& support,
                                  std::span<const double> probs, const AgentWeights& weights,
                                  double tol = 1e-9);

struct EquilibriumCheck {
  bool envy_free = true;
  bool proportional = true;
  bool clears = true;
  bool budgets_spent = true;
  bool complementary = true;
  /// Largest violation of each condition (0 when satisfied exactly).
  double envy_violation = 0.0;
  double proportionality_violation = 0.0;
  double clearing_violation = 0.0;
  double budget_violation = 0.0;
  double complementarity_violation = 0.0;

  bool passed() const {
    return envy_free && proportional && clears && budgets_spent && complementary;
  }
  std::string summary() const;
};

EquilibriumCheck check_equilibrium(const MarketEquilibrium& eq, const ValueSequence& v,
                                   const AgentWeights& weights, double tol);

struct PrefixSolution {
  std::size_t round = 0;
  std::vector<double> average_utility;  // u^{*,1:round}
  std::vector<bool> flagged;            // agent had no positive value yet
  double gap = 0.0;
};

/// Solves EG on each prefix v[0, round) for round in `checkpoints` (1-based,
/// sorted), warm-starting from the previous checkpoint.
std::vector<PrefixSolution> hindsight_prefix(const ValueSequence& v, const AgentWeights& weights,
                                             std::span<const std::size_t> checkpoints,
                                             double tol = 1e-6);

/// {1, 2, 4, ...} up to t, plus t itself.
std::vector<std::size_t> geometric_checkpoints(std::size_t t);

}  // namespace pace
