#pragma once

// Seeded input generators (i.i.d., periodic, block-wise, Markov-chain ergodic,
// corrupted i.i.d.) and the adversarial constructions used to probe the
// dynamics' worst cases.
//
// Randomness comes only from Substream(seed, repetition, round), so each row
// of a generated instance depends on the spec and its own round alone (block
// and Markov models: on the block's first round / the previous state).

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "pace/dynamics.hpp"
#include "pace/model.hpp"

namespace pace {

struct FiniteDistribution {
  std::vector<std::vector<double>> support;
  std::vector<double> probs;

  std::size_t agents() const { return support.empty() ? 0 : support.front().size(); }
  /// Throws InvalidArgument unless probabilities are valid, rows have equal
  /// length, values are finite and nonnegative, and (if asked) every agent has
  /// positive expected value.
  void validate(bool require_positive_mean = true) const;
  std::vector<double> mean() const;
};

namespace models {

struct Iid {
  FiniteDistribution dist;
};

/// Round tau (1-based) draws uniformly from pools[(tau - 1) mod q].
struct Periodic {
  std::vector<std::vector<std::vector<double>>> pools;
};

/// Consecutive blocks; block k emits a shuffled multiset of lengths[k] rows
/// whose counts follow dists[k] (largest-remainder rounding).
struct Block {
  std::vector<std::size_t> lengths;
  std::vector<FiniteDistribution> dists;
};

/// Markov chain over value vectors starting in `initial`.
struct Ergodic {
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> transition;
  std::size_t initial = 0;
};

/// Rounds tau with floor(tau f) > floor((tau - 1) f) draw from `corruption`,
/// every other round from `base`.
struct Corrupted {
  FiniteDistribution base;
  FiniteDistribution corruption;
  double fraction = 0.0;
};

}  // namespace models

using InputModel = std::variant<models::Iid, models::Periodic, models::Block, models::Ergodic,
                                models::Corrupted>;

struct InputModelSpec {
  InputModel model;
  std::size_t t = 0;
  std::uint64_t seed = 0;
  std::uint32_t repetition = 0;
};

std::string model_name(const InputModel& model);
void validate_spec(const InputModelSpec& spec);

/// Deterministic in (spec, seed, repetition). Throws Error if the sample leaves
/// some agent without positive value.
ValueSequence gen(const InputModelSpec& spec);

/// (1/t) sum_tau ||Q^tau - Qbar||_TV computed from the declared distributions.
/// Defined for i.i.d., periodic, block and corrupted specs.
double empirical_tv_delta(const InputModelSpec& spec);

/// sup over reachable states s of ||P^iota(s, .) - Qbar||_TV for a Markov
/// model, with Qbar the time-averaged marginal over t rounds.
double ergodic_deviation(const models::Ergodic& chain, std::size_t t, std::size_t iota);

/// Total variation between two finite distributions (identical value vectors
/// are merged).
double tv_distance(const FiniteDistribution& p, const FiniteDistribution& q);

/// `points` value vectors with entries uniform in (0, 1] and equal
/// probabilities, drawn from a substream reserved for support generation.
FiniteDistribution random_distribution(std::size_t agents, std::size_t points, std::uint64_t seed);
/// `period` pools of `pool_size` random value vectors each.
models::Periodic random_periodic(std::size_t agents, std::size_t period, std::size_t pool_size,
                                 std::uint64_t seed);

enum class PhaseRounding { Ceil, Floor };

struct EnvyBase {
  double a = 0.0;
  std::size_t k = 0;
};

/// Nearest a' to `a` with (1/epsilon)^(1/k) = a' for an integer k >= 1.
EnvyBase adjust_envy_base(double epsilon, double a);

struct EnvyInstance {
  ValueSequence values;
  double predicted_envy = 0.0;  // from the realized phase lengths
  double limit_envy = 0.0;      // 1 + 2 (1 - 1/a) log_a(1/epsilon)
  std::vector<std::size_t> phase_lengths;
};

/// Two-agent phases A1, A2, B1..Bk, C1..Ck. Requires epsilon * a^k = 1 for an
/// integer k (up to 1e-9 relative); see adjust_envy_base.
EnvyInstance adv_envy_worstcase(double epsilon, double a, std::size_t repeats,
                                PhaseRounding rounding = PhaseRounding::Ceil);

struct KillerInstance {
  ValueSequence values;
  double lower_bound = 0.0;
  std::vector<std::size_t> killed;          // i_1, ..., i_n (the last one never killed)
  std::vector<double> witness_utility;      // per agent: length of the phase it gets
  std::vector<double> policy_utility;       // the policy's utilities on the instance
};

/// Adaptive construction against `variant` with equal weights: `phase_ends` are
/// cumulative end rounds t_1 < ... < t_n (exactly n of them).
KillerInstance adv_cr_killer(std::size_t agents, const std::vector<std::size_t>& phase_ends,
                             const Variant& variant);

/// Constant two-agent instance with value min(1 / r2, cap).
ValueSequence adv_constrained_failure(double r2, double cap, std::size_t t);

}  // namespace pace
