#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mca {

using State = std::uint8_t;

// Thrown for malformed rule text; carries a 1-based line and column.
class RuleParseError : public std::runtime_error {
 public:
  RuleParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Thrown when an operation's precondition on a rule or configuration fails.
class RuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultTableCap = std::size_t{1} << 24;

// A one-dimensional local rule on the alphabet {0..m} with radius r. The
// table is indexed by the neighborhood word (x_{-r},...,x_r) read as a base
// (m+1) number with the leftmost cell most significant.
class LocalRule {
 public:
  LocalRule(int state_count, int radius, std::vector<State> table);

  int state_count() const { return state_count_; }
  int max_state() const { return state_count_ - 1; }
  int radius() const { return radius_; }
  int width() const { return 2 * radius_ + 1; }
  const std::vector<State>& table() const { return table_; }

  State operator()(std::span<const State> neighborhood) const {
    return table_[index_of(neighborhood)];
  }
  State at(std::size_t index) const { return table_[index]; }

  std::size_t index_of(std::span<const State> neighborhood) const {
    std::size_t index = 0;
    for (State s : neighborhood) index = index * state_count_ + s;
    return index;
  }
  std::vector<State> neighborhood_of(std::size_t index) const;

  bool operator==(const LocalRule& other) const = default;

  // Table size (m+1)^(2r+1), or nullopt when it exceeds `cap`.
  static std::optional<std::size_t> table_size(int state_count, int radius,
                                               std::size_t cap = kDefaultTableCap);

 private:
  int state_count_;
  int radius_;
  std::vector<State> table_;
};

// A finite window [lo, hi] of a configuration; every cell outside the window
// holds the corresponding boundary state.
struct Configuration {
  std::int64_t lo = 0;
  std::vector<State> cells;
  State left_boundary = 0;
  State right_boundary = 0;

  std::int64_t hi() const { return lo + static_cast<std::int64_t>(cells.size()) - 1; }
  State at(std::int64_t i) const {
    if (i < lo) return left_boundary;
    if (i > hi()) return right_boundary;
    return cells[static_cast<std::size_t>(i - lo)];
  }
  bool operator==(const Configuration& other) const = default;

  static Configuration constant(std::int64_t lo, std::int64_t hi, State s) {
    return {lo, std::vector<State>(static_cast<std::size_t>(hi - lo + 1), s), s, s};
  }
};

// Parsing and builtins -------------------------------------------------------

LocalRule parse_rule(std::string_view text);
// Accepts "builtin:<name>[:param]" or a path to a rule file.
LocalRule load_rule(const std::string& reference);
LocalRule builtin_rule(const std::string& name, std::optional<int> param = std::nullopt);
std::vector<std::string> builtin_names();
std::string format_rule(const LocalRule& rule);

// Simulation -----------------------------------------------------------------

Configuration apply(const LocalRule& rule, const Configuration& config);
Configuration apply_power(const LocalRule& rule, Configuration config, int n);

// Applies the rule to a plain word; the result has r fewer cells on each side.
std::vector<State> apply_shrinking(const LocalRule& rule, std::span<const State> word);

LocalRule compose_power(const LocalRule& rule, int power, std::size_t cap = kDefaultTableCap);

// Structural properties ------------------------------------------------------

struct MonotonicityWitness {
  std::vector<State> lower;
  std::vector<State> upper;
};

struct MonotonicityVerdict {
  bool monotone = true;
  std::optional<MonotonicityWitness> witness;
  explicit operator bool() const { return monotone; }
};

MonotonicityVerdict is_monotone(const LocalRule& rule);
std::vector<State> quiescent_states(const LocalRule& rule);
bool is_quiescent(const LocalRule& rule, int state);

LocalRule reflect(const LocalRule& rule);
LocalRule invert(const LocalRule& rule);
LocalRule restrict_states(const LocalRule& rule, int low, int high);

}  // namespace mca
