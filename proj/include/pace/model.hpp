#pragma once

// Core instance types shared by every module: agent weights, the item-by-agent
// value matrix, fractional allocations, and CSV ingestion.
//
// Indexing is 0-based in code. Messages meant for people (validation reports,
// CSV errors) use 1-based item/agent numbers and 1-based file line numbers.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pace {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a caller passes parameters that violate an operation's
/// precondition (bad shape, nonpositive weight, empty subset, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class AgentWeights {
 public:
  AgentWeights() = default;
  /// Stores the weights as given; `validate_instance` reports violations.
  explicit AgentWeights(std::vector<double> weights) : w_(std::move(weights)) {}

  static AgentWeights equal(std::size_t n, double weight = 1.0) {
    return AgentWeights(std::vector<double>(n, weight));
  }

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const { return w_; }
  double total() const;
  AgentWeights normalized() const;
  AgentWeights subset(std::span<const std::size_t> agents) const;

  friend bool operator==(const AgentWeights&, const AgentWeights&) = default;

 private:
  std::vector<double> w_;
};

/// t x n matrix of item values; row tau is the item arriving at round tau+1.
class ValueSequence {
 public:
  ValueSequence() = default;
  ValueSequence(std::size_t items, std::size_t agents, std::vector<double> data);

  /// Throws InvalidArgument on ragged input.
  static ValueSequence from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t items() const { return items_; }
  std::size_t agents() const { return agents_; }
  bool empty() const { return items_ == 0; }

  double operator()(std::size_t tau, std::size_t i) const { return v_[tau * agents_ + i]; }
  std::span<const double> row(std::size_t tau) const {
    return {v_.data() + tau * agents_, agents_};
  }
  std::span<const double> data() const { return v_; }

  /// Monopolistic utilities W_i = sum over items of v_i.
  std::vector<double> column_sums() const;
  /// Largest entry of the matrix.
  double max_value() const;

  ValueSequence prefix(std::size_t items) const;
  ValueSequence scaled(double factor) const;
  ValueSequence scaled_columns(std::span<const double> factors) const;
  ValueSequence select_agents(std::span<const std::size_t> agents) const;

  friend bool operator==(const ValueSequence&, const ValueSequence&) = default;

 private:
  std::size_t items_ = 0;
  std::size_t agents_ = 0;
  std::vector<double> v_;
};

/// Fractional allocation, one row per item; rows must lie in the simplex
/// (sum <= 1) for feasibility.
class Allocation {
 public:
  Allocation() = default;
  Allocation(std::size_t items, std::size_t agents)
      : items_(items), agents_(agents), x_(items * agents, 0.0) {}

  std::size_t items() const { return items_; }
  std::size_t agents() const { return agents_; }
  double& operator()(std::size_t tau, std::size_t i) { return x_[tau * agents_ + i]; }
  double operator()(std::size_t tau, std::size_t i) const { return x_[tau * agents_ + i]; }
  std::span<const double> row(std::size_t tau) const {
    return {x_.data() + tau * agents_, agents_};
  }

  /// True when every entry is in [0, 1] and each row sums to at most 1 + tol.
  bool feasible(double tol = 1e-12) const;

 private:
  std::size_t items_ = 0;
  std::size_t agents_ = 0;
  std::vector<double> x_;
};

/// <v_i, x_k> for every ordered pair (i, k); entry [i][k] is what agent i
/// would get from agent k's bundle. The diagonal holds realized utilities.
using CrossUtility = std::vector<std::vector<double>>;

CrossUtility cross_utility(const ValueSequence& v, const Allocation& x);

struct ValidationReport {
  bool ok = true;
  std::string message;
  std::optional<std::size_t> item;   // 0-based
  std::optional<std::size_t> agent;  // 0-based

  explicit operator bool() const { return ok; }
};

/// First violation wins: dimensions, weights, entries (row-major), then
/// agents with no positive value.
ValidationReport validate_instance(const ValueSequence& v, const AgentWeights& weights);

/// Throws InvalidArgument carrying the report message when validation fails.
void require_valid(const ValueSequence& v, const AgentWeights& weights);

class CsvError : public Error {
 public:
  CsvError(std::size_t line, const std::string& what);
  /// 1-based line of the offending row; 0 for whole-file problems.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct CsvInstance {
  ValueSequence values;
  std::vector<std::string> agent_names;
};

CsvInstance parse_csv(const std::string& text);
CsvInstance load_csv(const std::filesystem::path& path);

/// Decimal rendering with 17 significant digits, so load(save(v)) == v.
std::string format_csv(const ValueSequence& v, std::span<const std::string> agent_names = {});
void save_csv(const std::filesystem::path& path, const ValueSequence& v,
              std::span<const std::string> agent_names = {});

/// Column i scaled so that its mean over items is 1.
ValueSequence normalize_values(const ValueSequence& v);

struct Extremity {
  double epsilon = 1.0;
};

/// min over agents of (smallest nonzero value / largest value).
Extremity extremity(const ValueSequence& v);

/// Shortest-safe rendering used by every text output: 17 significant digits.
std::string format_double(double x);

}  // namespace pace
