#include "pace/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace pace {

double AgentWeights::total() const { return std::accumulate(w_.begin(), w_.end(), 0.0); }

AgentWeights AgentWeights::normalized() const {
  const double s = total();
  std::vector<double> out(w_);
  for (double& b : out) b /= s;
  return AgentWeights(std::move(out));
}

AgentWeights AgentWeights::subset(std::span<const std::size_t> agents) const {
  std::vector<double> out;
  out.reserve(agents.size());
  for (std::size_t i : agents) {
    if (i >= w_.size()) throw InvalidArgument("agent index out of range");
    out.push_back(w_[i]);
  }
  return AgentWeights(std::move(out));
}

ValueSequence::ValueSequence(std::size_t items, std::size_t agents, std::vector<double> data)
    : items_(items), agents_(agents), v_(std::move(data)) {
  if (v_.size() != items_ * agents_) {
    throw InvalidArgument("value matrix has " + std::to_string(v_.size()) + " entries, expected " +
                          std::to_string(items_) + "x" + std::to_string(agents_));
  }
}

ValueSequence ValueSequence::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t n = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * n);
  for (std::size_t tau = 0; tau < rows.size(); ++tau) {
    if (rows[tau].size() != n) {
      throw InvalidArgument("row " + std::to_string(tau + 1) + " has " +
                            std::to_string(rows[tau].size()) + " values, expected " +
                            std::to_string(n));
    }
    data.insert(data.end(), rows[tau].begin(), rows[tau].end());
  }
  return ValueSequence(rows.size(), n, std::move(data));
}

std::vector<double> ValueSequence::column_sums() const {
  std::vector<double> sums(agents_, 0.0);
  for (std::size_t tau = 0; tau < items_; ++tau)
    for (std::size_t i = 0; i < agents_; ++i) sums[i] += (*this)(tau, i);
  return sums;
}

double ValueSequence::max_value() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, x);
  return m;
}

ValueSequence ValueSequence::prefix(std::size_t items) const {
  items = std::min(items, items_);
  return ValueSequence(items, agents_,
                       std::vector<double>(v_.begin(), v_.begin() + items * agents_));
}

ValueSequence ValueSequence::scaled(double factor) const {
  std::vector<double> out(v_);
  for (double& x : out) x *= factor;
  return ValueSequence(items_, agents_, std::move(out));
}

ValueSequence ValueSequence::scaled_columns(std::span<const double> factors) const {
  if (factors.size() != agents_) throw InvalidArgument("one scale factor per agent required");
  std::vector<double> out(v_);
  for (std::size_t tau = 0; tau < items_; ++tau)
    for (std::size_t i = 0; i < agents_; ++i) out[tau * agents_ + i] *= factors[i];
  return ValueSequence(items_, agents_, std::move(out));
}

ValueSequence ValueSequence::select_agents(std::span<const std::size_t> agents) const {
  std::vector<double> out;
  out.reserve(items_ * agents.size());
  for (std::size_t tau = 0; tau < items_; ++tau)
    for (std::size_t i : agents) {
      if (i >= agents_) throw InvalidArgument("agent index out of range");
      out.push_back((*this)(tau, i));
    }
  return ValueSequence(items_, agents.size(), std::move(out));
}

bool Allocation::feasible(double tol) const {
  for (std::size_t tau = 0; tau < items_; ++tau) {
    double s = 0.0;
    for (std::size_t i = 0; i < agents_; ++i) {
      const double x = (*this)(tau, i);
      if (!(x >= -tol && x <= 1.0 + tol)) return false;
      s += x;
    }
    if (s > 1.0 + tol) return false;
  }
  return true;
}

CrossUtility cross_utility(const ValueSequence& v, const Allocation& x) {
  if (v.items() != x.items() || v.agents() != x.agents())
    throw InvalidArgument("allocation shape does not match the instance");
  const std::size_t n = v.agents();
  CrossUtility c(n, std::vector<double>(n, 0.0));
  for (std::size_t tau = 0; tau < v.items(); ++tau)
    for (std::size_t k = 0; k < n; ++k) {
      const double share = x(tau, k);
      if (share == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) c[i][k] += v(tau, i) * share;
    }
  return c;
}

ValidationReport validate_instance(const ValueSequence& v, const AgentWeights& weights) {
  auto fail = [](std::string msg, std::optional<std::size_t> item,
                 std::optional<std::size_t> agent) {
    return ValidationReport{false, std::move(msg), item, agent};
  };
  if (v.items() == 0) return fail("no items", std::nullopt, std::nullopt);
  if (v.agents() == 0) return fail("no agents", std::nullopt, std::nullopt);
  if (weights.size() != v.agents()) {
    return fail("dimension mismatch: " + std::to_string(weights.size()) + " weights for " +
                    std::to_string(v.agents()) + " agents",
                std::nullopt, std::nullopt);
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      return fail("nonpositive weight at agent " + std::to_string(i + 1), std::nullopt, i);
  }
  for (std::size_t tau = 0; tau < v.items(); ++tau)
    for (std::size_t i = 0; i < v.agents(); ++i) {
      const double x = v(tau, i);
      if (std::isnan(x))
        return fail("NaN value at item " + std::to_string(tau + 1) + ", agent " +
                        std::to_string(i + 1),
                    tau, i);
      if (!std::isfinite(x))
        return fail("infinite value at item " + std::to_string(tau + 1) + ", agent " +
                        std::to_string(i + 1),
                    tau, i);
      if (x < 0.0)
        return fail("negative value at item " + std::to_string(tau + 1) + ", agent " +
                        std::to_string(i + 1),
                    tau, i);
    }
  const auto sums = v.column_sums();
  for (std::size_t i = 0; i < sums.size(); ++i)
    if (!(sums[i] > 0.0))
      return fail("agent " + std::to_string(i + 1) + " has no positive value", std::nullopt, i);
  return {};
}

void require_valid(const ValueSequence& v, const AgentWeights& weights) {
  if (auto report = validate_instance(v, weights); !report) throw InvalidArgument(report.message);
}

CsvError::CsvError(std::size_t line, const std::string& what)
    : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

CsvInstance parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  CsvInstance result;

  // Header: first non-blank line.
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw CsvError(0, "empty file");
  for (auto field : split_fields(line)) result.agent_names.emplace_back(trim(field));
  const std::size_t n = result.agent_names.size();

  std::vector<double> data;
  std::size_t items = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != n) {
      throw CsvError(line_no, "ragged row (" + std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(n) + ")");
    }
    for (auto field : fields) {
      double x = 0.0;
      if (!parse_double(field, x)) throw CsvError(line_no, "malformed number");
      data.push_back(x);
    }
    ++items;
  }
  if (items == 0) throw CsvError(0, "no items");
  result.values = ValueSequence(items, n, std::move(data));
  return result;
}

CsvInstance load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string format_csv(const ValueSequence& v, std::span<const std::string> agent_names) {
  std::string out;
  for (std::size_t i = 0; i < v.agents(); ++i) {
    if (i) out += ',';
    out += i < agent_names.size() ? agent_names[i] : "agent" + std::to_string(i + 1);
  }
  out += '\n';
  for (std::size_t tau = 0; tau < v.items(); ++tau) {
    for (std::size_t i = 0; i < v.agents(); ++i) {
      if (i) out += ',';
      out += format_double(v(tau, i));
    }
    out += '\n';
  }
  return out;
}

void save_csv(const std::filesystem::path& path, const ValueSequence& v,
              std::span<const std::string> agent_names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << format_csv(v, agent_names);
}

ValueSequence normalize_values(const ValueSequence& v) {
  const auto sums = v.column_sums();
  std::vector<double> factors(v.agents());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (!(sums[i] > 0.0))
      throw InvalidArgument("agent " + std::to_string(i + 1) + " has no positive value");
    factors[i] = static_cast<double>(v.items()) / sums[i];
  }
  return v.scaled_columns(factors);
}

Extremity extremity(const ValueSequence& v) {
  double eps = 1.0;
  for (std::size_t i = 0; i < v.agents(); ++i) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t tau = 0; tau < v.items(); ++tau) {
      const double x = v(tau, i);
      if (x > 0.0) {
        lo = lo == 0.0 ? x : std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    if (hi == 0.0) throw InvalidArgument("agent " + std::to_string(i + 1) + " has no positive value");
    eps = std::min(eps, lo / hi);
  }
  return {eps};
}

}  // namespace pace
