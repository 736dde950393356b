#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mca/rational.hpp"
#include "mca/rule.hpp"

namespace mca {

// Evolution of the step of type a,b: a on negative coordinates, b elsewhere.
// Every image is a ladder, so the configuration at time t is fully described
// by left[t] (last cell holding a), right[t] (first cell holding b) and the
// word strictly between them.
struct StepTrace {
  State a = 0;
  State b = 0;
  std::vector<std::int64_t> left;
  std::vector<std::int64_t> right;
  std::vector<std::vector<State>> interface;  // cells left[t]+1 .. right[t]-1

  int horizon() const { return static_cast<int>(left.size()) - 1; }
};

// Incremental evolver; only the interface and r cells of context on either
// side are touched per step, which is exact because a and b are quiescent.
class StepEvolver {
 public:
  StepEvolver(const LocalRule& rule, State a, State b);

  std::int64_t left() const { return left_; }
  std::int64_t right() const { return right_; }
  const std::vector<State>& interface() const { return word_; }
  int time() const { return time_; }
  void step();

 private:
  const LocalRule& rule_;
  State a_, b_;
  std::int64_t left_ = -1;
  std::int64_t right_ = 0;
  std::vector<State> word_;
  std::vector<State> scratch_;
  int time_ = 0;
};

StepTrace evolve_step(const LocalRule& rule, State a, State b, int horizon);

enum class Edge { kLeft, kRight };
enum class RateStatus { kExactCycle, kExactStabilized, kBounded };

const char* to_string(Edge edge);
const char* to_string(RateStatus status);

struct RateEstimate {
  Edge target = Edge::kLeft;
  RateStatus status = RateStatus::kBounded;
  Rational lower;  // equals upper when exact
  Rational upper;

  // evidence
  std::optional<std::pair<int, int>> cycle;  // (t1, t2)
  std::int64_t shift = 0;
  std::optional<int> stabilized_from;  // start of the confirming window
  int period = 0;
  bool from_candidate = false;
  int horizon = 0;
  // Best one-sided certificate: lower bound for L, upper bound for R.
  Rational certified;
  // max_t |edge^t - t * value| over the recorded horizon (exact entries only)
  std::optional<Rational> deviation;

  bool exact() const { return status != RateStatus::kBounded; }
  std::optional<Rational> value() const {
    return exact() ? std::optional<Rational>(lower) : std::nullopt;
  }
  // "p/q" for exact values, "[p1/q1,p2/q2]" for brackets.
  std::string render() const;
};

struct RatePair {
  RateEstimate left;   // L_{a,b}
  RateEstimate right;  // R_{a,b}
};

struct RateParams {
  int max_time = 4096;
  int denominator_bound = 64;
  int confirm_window = 256;
};

class RateTable {
 public:
  void set(State a, State b, RatePair rates) { entries_[{a, b}] = std::move(rates); }
  const RatePair* find(State a, State b) const {
    auto it = entries_.find({a, b});
    return it == entries_.end() ? nullptr : &it->second;
  }
  const RatePair& at(State a, State b) const;
  const std::map<std::pair<State, State>, RatePair>& entries() const { return entries_; }
  bool all_exact() const;

 private:
  std::map<std::pair<State, State>, RatePair> entries_;
};

// Exact rates from a repeated interface word, if the trace contains one.
std::optional<RatePair> rate_by_cycle(const StepTrace& trace);

struct RateBounds {
  Rational lower_left;   // max_t (L^t + 1) / t
  Rational upper_right;  // min_t R^t / t
};
RateBounds rate_bounds(const StepTrace& trace);

RatePair rate(const LocalRule& rule, State a, State b, const RateParams& params = {},
              const RateTable* known = nullptr);

RateTable rate_table(const LocalRule& rule, const RateParams& params = {}, int workers = 1);

// Values that must contain the true rate of (a, b, edge), drawn from exact
// entries of strictly narrower pairs in `known` (border-guard identities).
std::vector<Rational> candidate_rates(const LocalRule& rule, State a, State b, Edge edge,
                                      const RateTable& known);

// max_t |edge^t - t * value| for t in [from, to].
Rational max_deviation(const std::vector<std::int64_t>& edge, const Rational& value, int from,
                       int to);

}  // namespace mca
