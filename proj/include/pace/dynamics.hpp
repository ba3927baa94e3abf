#pragma once

// Online allocation dynamics: unconstrained PACE, the interval-projected
// (constrained) variant, PACE with seed utility, set-aside PACE, the one-step
// Nash-welfare greedy rule, and the proportional split baseline.
//
// Each dynamic is a state machine over PaceState advanced one item at a time
// (pace_step / advance) and a full-horizon executor (run) that records a
// RunTrace.

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pace/model.hpp"

namespace pace {

/// A nonnegative real or +infinity. Used for bids and expenditures, which are
/// infinite for an agent that has not received any utility yet.
struct ExtReal {
  double value = 0.0;
  bool infinite = false;

  static ExtReal inf() { return {0.0, true}; }
  static ExtReal of(double x) { return {x, false}; }

  /// +inf as an IEEE double, for output only.
  double to_double() const { return infinite ? std::numeric_limits<double>::infinity() : value; }

  friend std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
    if (a.infinite || b.infinite) return a.infinite <=> b.infinite;
    return a.value <=> b.value;
  }
  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.infinite == b.infinite && (a.infinite || a.value == b.value);
  }
};

namespace variants {

struct Unconstrained {};

/// Multipliers projected onto [low_i, high_i] after every update.
struct Constrained {
  std::vector<double> low;
  std::vector<double> high;

  /// [B_i / (1 + delta0), B_i (1 + delta0)] for every agent.
  static Constrained around_weights(const AgentWeights& weights, double delta0);
};

/// Every agent starts with fictitious utility `xi`.
struct Seeded {
  double xi = 1.0;
};

/// Half of each item is split evenly; the other half is auctioned with values
/// normalized by the monopolistic utilities and seed 1/(2n).
struct SetAside {
  std::vector<double> monopolistic;
};

/// argmax_i B_i log(1 + v_i / U_i), an agent with U_i = 0 and v_i > 0 scoring +inf.
struct OneStepGreedy {};

/// Every item split in proportion to the weights.
struct Proportional {};

}  // namespace variants

using Variant = std::variant<variants::Unconstrained, variants::Constrained, variants::Seeded,
                             variants::SetAside, variants::OneStepGreedy, variants::Proportional>;

std::string variant_name(const Variant& variant);
/// True for the variants that give each item wholly to one agent.
bool is_integral(const Variant& variant);
/// True for variants that select an auction winner each round.
bool has_winner(const Variant& variant);
/// Throws InvalidArgument on bad parameters or a size mismatch with n agents.
void validate_variant(const Variant& variant, std::size_t agents);

/// beta_i; `unserved()` stands for +infinity (weight over zero tracked utility).
class PacingMultiplier {
 public:
  static PacingMultiplier unserved() { return PacingMultiplier(0.0, true); }
  static PacingMultiplier of(double beta) { return PacingMultiplier(beta, false); }

  bool is_unserved() const { return unserved_; }
  /// Precondition: !is_unserved().
  double value() const { return value_; }
  ExtReal as_ext() const { return unserved_ ? ExtReal::inf() : ExtReal::of(value_); }

  /// beta * v with the convention infinity * 0 = 0.
  ExtReal times(double v) const {
    if (unserved_) return v > 0.0 ? ExtReal::inf() : ExtReal::of(0.0);
    return ExtReal::of(value_ * v);
  }

  friend bool operator==(const PacingMultiplier&, const PacingMultiplier&) = default;

 private:
  PacingMultiplier(double v, bool u) : value_(v), unserved_(u) {}
  double value_;
  bool unserved_;
};

struct PaceState {
  std::size_t round = 0;  // completed rounds
  std::vector<double> utility;  // realized cumulative utility U_i
  /// The quantity the variant divides by when pricing: U (unconstrained,
  /// constrained, greedy), U + xi (seeded), normalized auction utility + 1/(2n)
  /// (set-aside). Its round average is the tracked average utility.
  std::vector<double> tracked;
  std::vector<PacingMultiplier> multiplier;
  Variant variant;
  AgentWeights weights;

  /// Round-0 state with beta = 1.
  static PaceState initial(const AgentWeights& weights, const Variant& variant);

  std::size_t agents() const { return utility.size(); }
  /// tracked / round (zeros before the first round).
  std::vector<double> tracked_average() const;
};

struct StepOutcome {
  std::optional<std::size_t> winner;
  std::vector<double> allocation;
  std::vector<ExtReal> bids;
  std::vector<ExtReal> expenditure;
  std::vector<double> utility;
};

/// Bids beta_i v_i for the next item (greedy: its NW increments; proportional: zeros).
std::vector<ExtReal> pace_bid(const PaceState& state, std::span<const double> values);

/// In-place transition; throws InvalidArgument on a dimension mismatch.
StepOutcome advance(PaceState& state, std::span<const double> values);

std::pair<PaceState, StepOutcome> pace_step(const PaceState& state, std::span<const double> values);

struct Checkpoint {
  std::size_t round = 0;
  std::vector<double> average_utility;  // realized U / round
  std::vector<ExtReal> multiplier;
  std::vector<ExtReal> cumulative_expenditure;
  CrossUtility cross;  // <v_i, x_k> over the first `round` items
};

struct RunOptions {
  /// 1-based rounds after which a Checkpoint is recorded (sorted, unique).
  std::vector<std::size_t> checkpoints;
  /// Keep every StepOutcome (memory t * n).
  bool keep_rounds = false;
};

inline constexpr std::uint32_t kNoWinner = std::numeric_limits<std::uint32_t>::max();

struct RunTrace {
  Variant variant;
  AgentWeights weights;
  std::size_t items = 0;
  std::size_t agents = 0;

  std::vector<std::uint32_t> winners;  // kNoWinner when the variant has no auction
  std::vector<ExtReal> winner_spend;   // expenditure b^tau of the winner
  std::vector<StepOutcome> rounds;     // only with keep_rounds
  std::vector<Checkpoint> checkpoints;

  std::vector<double> utility;
  std::vector<double> average_utility;
  std::vector<ExtReal> multiplier;
  CrossUtility cross;

  /// Allocation rebuilt from the winners and the variant's split rule.
  Allocation allocation() const;
  /// Row of the allocation for one round, without materializing the matrix.
  std::vector<double> allocation_row(std::size_t tau) const;
};

RunTrace run(const ValueSequence& v, const AgentWeights& weights, const Variant& variant,
             const RunOptions& options = {});

/// gamma -> gamma_J: keep agents in J (ascending) and the items won by them.
ValueSequence restrict_instance(const ValueSequence& v, const RunTrace& trace,
                                std::span<const std::size_t> agents);

/// Exact monopolistic utilities, the natural SetAside predictions.
variants::SetAside set_aside_exact(const ValueSequence& v);

}  // namespace pace
