#include "mca/rule.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mca {

LocalRule::LocalRule(int state_count, int radius, std::vector<State> table)
    : state_count_(state_count), radius_(radius), table_(std::move(table)) {
  if (state_count < 2 || state_count > 256) throw RuleError("state count must be in [2, 256]");
  if (radius < 0) throw RuleError("radius must be non-negative");
  auto expected = table_size(state_count, radius, SIZE_MAX);
  if (!expected || table_.size() != *expected) {
    throw RuleError("table has " + std::to_string(table_.size()) + " entries, expected " +
                    (expected ? std::to_string(*expected) : std::string("too many")));
  }
  for (State s : table_) {
    if (s >= state_count) throw RuleError("table entry " + std::to_string(s) + " out of range");
  }
}

std::optional<std::size_t> LocalRule::table_size(int state_count, int radius, std::size_t cap) {
  std::size_t size = 1;
  for (int i = 0; i < 2 * radius + 1; ++i) {
    if (size > cap / static_cast<std::size_t>(state_count)) return std::nullopt;
    size *= static_cast<std::size_t>(state_count);
  }
  if (size > cap) return std::nullopt;
  return size;
}

std::vector<State> LocalRule::neighborhood_of(std::size_t index) const {
  std::vector<State> word(static_cast<std::size_t>(width()));
  for (std::size_t k = word.size(); k-- > 0;) {
    word[k] = static_cast<State>(index % state_count_);
    index /= state_count_;
  }
  return word;
}

Configuration apply(const LocalRule& rule, const Configuration& config) {
  if (!is_quiescent(rule, config.left_boundary) || !is_quiescent(rule, config.right_boundary)) {
    throw RuleError("boundary state is not quiescent");
  }
  const std::int64_t r = rule.radius();
  const std::size_t n = config.cells.size();
  std::vector<State> padded;
  padded.reserve(n + 2 * static_cast<std::size_t>(r));
  padded.insert(padded.end(), static_cast<std::size_t>(r), config.left_boundary);
  padded.insert(padded.end(), config.cells.begin(), config.cells.end());
  padded.insert(padded.end(), static_cast<std::size_t>(r), config.right_boundary);
  Configuration out = config;
  out.cells = apply_shrinking(rule, padded);
  return out;
}

Configuration apply_power(const LocalRule& rule, Configuration config, int n) {
  if (n < 0) throw RuleError("negative power");
  for (int i = 0; i < n; ++i) config = apply(rule, config);
  return config;
}

std::vector<State> apply_shrinking(const LocalRule& rule, std::span<const State> word) {
  const std::size_t w = static_cast<std::size_t>(rule.width());
  if (word.size() < w) return {};
  const std::size_t n = word.size() - w + 1;
  std::vector<State> out(n);
  // Rolling base-(m+1) index of the current neighborhood.
  const std::size_t base = static_cast<std::size_t>(rule.state_count());
  std::size_t top = 1;
  for (std::size_t k = 1; k < w; ++k) top *= base;
  std::size_t index = 0;
  for (std::size_t k = 0; k < w; ++k) index = index * base + word[k];
  for (std::size_t i = 0;; ++i) {
    out[i] = rule.at(index);
    if (i + 1 == n) break;
    index = (index - word[i] * top) * base + word[i + w];
  }
  return out;
}

LocalRule compose_power(const LocalRule& rule, int power, std::size_t cap) {
  if (power < 1) throw RuleError("power must be at least 1");
  if (power == 1) return rule;
  const int radius = rule.radius() * power;
  auto size = LocalRule::table_size(rule.state_count(), radius, cap);
  if (!size) {
    throw RuleError("table of the " + std::to_string(power) +
                    "-th power exceeds the size cap; use iterated application");
  }
  LocalRule shape(rule.state_count(), radius,
                  std::vector<State>(*size, 0));
  std::vector<State> table(*size);
  for (std::size_t index = 0; index < *size; ++index) {
    std::vector<State> word = shape.neighborhood_of(index);
    for (int p = 0; p < power; ++p) word = apply_shrinking(rule, word);
    table[index] = word.front();
  }
  return LocalRule(rule.state_count(), radius, std::move(table));
}

// Raising one coordinate by one at a time connects any ordered pair of
// neighborhoods by a chain, so checking single increments is complete.
MonotonicityVerdict is_monotone(const LocalRule& rule) {
  const std::size_t size = rule.table().size();
  const std::size_t base = static_cast<std::size_t>(rule.state_count());
  const int w = rule.width();
  for (std::size_t index = 0; index < size; ++index) {
    std::size_t weight = 1;
    std::size_t rest = index;
    for (int k = w - 1; k >= 0; --k) {
      const std::size_t digit = rest % base;
      rest /= base;
      if (digit + 1 < base) {
        const std::size_t raised = index + weight;
        if (rule.at(raised) < rule.at(index)) {
          return {false, MonotonicityWitness{rule.neighborhood_of(index),
                                             rule.neighborhood_of(raised)}};
        }
      }
      weight *= base;
    }
  }
  return {true, std::nullopt};
}

bool is_quiescent(const LocalRule& rule, int state) {
  if (state < 0 || state >= rule.state_count()) return false;
  std::vector<State> word(static_cast<std::size_t>(rule.width()), static_cast<State>(state));
  return rule(word) == state;
}

std::vector<State> quiescent_states(const LocalRule& rule) {
  std::vector<State> out;
  for (int s = 0; s < rule.state_count(); ++s) {
    if (is_quiescent(rule, s)) out.push_back(static_cast<State>(s));
  }
  return out;
}

LocalRule reflect(const LocalRule& rule) {
  std::vector<State> table(rule.table().size());
  for (std::size_t index = 0; index < table.size(); ++index) {
    std::vector<State> word = rule.neighborhood_of(index);
    std::reverse(word.begin(), word.end());
    table[index] = rule(word);
  }
  return LocalRule(rule.state_count(), rule.radius(), std::move(table));
}

LocalRule invert(const LocalRule& rule) {
  const int m = rule.max_state();
  std::vector<State> table(rule.table().size());
  for (std::size_t index = 0; index < table.size(); ++index) {
    std::vector<State> word = rule.neighborhood_of(index);
    for (State& s : word) s = static_cast<State>(m - s);
    table[index] = static_cast<State>(m - rule(word));
  }
  return LocalRule(rule.state_count(), rule.radius(), std::move(table));
}

LocalRule restrict_states(const LocalRule& rule, int low, int high) {
  if (low < 0 || high > rule.max_state() || high <= low) {
    throw RuleError("restriction interval must satisfy 0 <= c < d <= m");
  }
  const int count = high - low + 1;
  auto size = LocalRule::table_size(count, rule.radius(), SIZE_MAX);
  LocalRule shape(count, rule.radius(), std::vector<State>(*size, 0));
  std::vector<State> table(*size);
  for (std::size_t index = 0; index < *size; ++index) {
    std::vector<State> word = shape.neighborhood_of(index);
    for (State& s : word) s = static_cast<State>(s + low);
    const int out = rule(word);
    if (out < low || out > high) {
      std::ostringstream msg;
      msg << "restriction to [" << low << "," << high << "] is not closed: neighborhood ";
      for (State s : word) msg << int(s);
      msg << " maps to " << out;
      throw RuleError(msg.str());
    }
    table[index] = static_cast<State>(out - low);
  }
  return LocalRule(count, rule.radius(), std::move(table));
}

}  // namespace mca
