#include "mca/stepdyn.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <unordered_map>

#include "mca/parallel.hpp"

namespace mca {

namespace {

void require_step_pair(const LocalRule& rule, State a, State b) {
  if (a == b) throw RuleError("step endpoints must differ");
  if (!is_quiescent(rule, a) || !is_quiescent(rule, b)) {
    throw RuleError("step endpoints must be quiescent");
  }
}

void require_monotone(const LocalRule& rule) {
  if (!is_monotone(rule)) throw RuleError("rule is not monotone");
}

bool quiescent_between(const LocalRule& rule, State a, State b) {
  const int lo = std::min(a, b), hi = std::max(a, b);
  for (int s = lo + 1; s < hi; ++s) {
    if (is_quiescent(rule, s)) return true;
  }
  return false;
}

// Accepts p/q when edge[t+q] - edge[t] == p across the trailing window and
// p/q falls inside [lo, hi]. Candidates are tried first, then q = 1..D.
struct Stabilized {
  Rational value;
  int from;
  int period;
  bool candidate;
};

std::optional<Stabilized> stabilize(const std::vector<std::int64_t>& edge, int window, int bound,
                                    const Rational& lo, const Rational& hi,
                                    const std::vector<Rational>& candidates) {
  const int T = static_cast<int>(edge.size()) - 1;
  const int from = T - window;
  if (from < 0) return std::nullopt;
  auto periodic = [&](int q, std::int64_t p) {
    for (int t = from; t + q <= T; ++t) {
      if (edge[t + q] - edge[t] != p) return false;
    }
    return true;
  };
  auto try_q = [&](int q, bool candidate) -> std::optional<Stabilized> {
    if (q < 1 || q >= window) return std::nullopt;
    const std::int64_t p = edge[T] - edge[T - q];
    if (!periodic(q, p)) return std::nullopt;
    Rational value(p, q);
    if (value < lo || value > hi) return std::nullopt;
    return Stabilized{value, from, q, candidate};
  };
  for (const Rational& c : candidates) {
    if (c.den() >= window) continue;
    if (auto s = try_q(static_cast<int>(c.den()), true); s && s->value == c) return s;
  }
  for (int q = 1; q <= bound; ++q) {
    if (auto s = try_q(q, false)) return s;
  }
  return std::nullopt;
}

}  // namespace

StepEvolver::StepEvolver(const LocalRule& rule, State a, State b) : rule_(rule), a_(a), b_(b) {}

void StepEvolver::step() {
  const std::int64_t r = rule_.radius();
  // Cells left_-2r+1 .. right_+2r-1 determine the new values on
  // left_-r+1 .. right_+r-1; everything outside is a or b already.
  scratch_.assign(static_cast<std::size_t>(2 * r), a_);
  scratch_.insert(scratch_.end(), word_.begin(), word_.end());
  scratch_.insert(scratch_.end(), static_cast<std::size_t>(2 * r), b_);
  // scratch_ starts at left_ - 2r + 1 and the image starts at left_ - r + 1
  std::vector<State> image = apply_shrinking(rule_, scratch_);
  const std::int64_t base = left_ - r + 1;
  std::size_t first = 0;
  while (first < image.size() && image[first] == a_) ++first;
  std::size_t last = image.size();
  while (last > first && image[last - 1] == b_) --last;
  left_ = base + static_cast<std::int64_t>(first) - 1;
  right_ = base + static_cast<std::int64_t>(last);
  word_.assign(image.begin() + static_cast<std::ptrdiff_t>(first),
               image.begin() + static_cast<std::ptrdiff_t>(last));
  ++time_;
}

StepTrace evolve_step(const LocalRule& rule, State a, State b, int horizon) {
  require_step_pair(rule, a, b);
  require_monotone(rule);
  if (horizon < 0) throw RuleError("negative horizon");
  StepTrace trace;
  trace.a = a;
  trace.b = b;
  StepEvolver ev(rule, a, b);
  for (int t = 0;; ++t) {
    trace.left.push_back(ev.left());
    trace.right.push_back(ev.right());
    trace.interface.push_back(ev.interface());
    if (t == horizon) break;
    ev.step();
  }
  return trace;
}

const char* to_string(Edge edge) { return edge == Edge::kLeft ? "L" : "R"; }

const char* to_string(RateStatus status) {
  switch (status) {
    case RateStatus::kExactCycle:
      return "exact-cycle";
    case RateStatus::kExactStabilized:
      return "exact-stabilized";
    case RateStatus::kBounded:
      break;
  }
  return "bounded";
}

std::string RateEstimate::render() const {
  if (exact()) return lower.str();
  return "[" + lower.str() + "," + upper.str() + "]";
}

const RatePair& RateTable::at(State a, State b) const {
  const RatePair* p = find(a, b);
  if (!p) {
    throw RuleError("no rate entry for pair " + std::to_string(a) + "," + std::to_string(b));
  }
  return *p;
}

bool RateTable::all_exact() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const auto& e) { return e.second.left.exact() && e.second.right.exact(); });
}

Rational max_deviation(const std::vector<std::int64_t>& edge, const Rational& value, int from,
                       int to) {
  Rational best(0);
  for (int t = std::max(from, 0); t <= to && t < static_cast<int>(edge.size()); ++t) {
    Rational d = Rational(edge[t]) - value * Rational(t);
    if (d < Rational(0)) d = -d;
    best = max(best, d);
  }
  return best;
}

std::optional<RatePair> rate_by_cycle(const StepTrace& trace) {
  std::unordered_map<std::string, int> seen;
  for (int t = 0; t <= trace.horizon(); ++t) {
    const auto& w = trace.interface[t];
    std::string key(w.begin(), w.end());
    auto [it, fresh] = seen.emplace(std::move(key), t);
    if (fresh) continue;
    const int t1 = it->second;
    const std::int64_t shift = trace.left[t] - trace.left[t1];
    Rational value(shift, t - t1);
    RatePair out;
    for (RateEstimate* e : {&out.left, &out.right}) {
      e->status = RateStatus::kExactCycle;
      e->lower = e->upper = e->certified = value;
      e->cycle = {t1, t};
      e->shift = shift;
      e->horizon = trace.horizon();
    }
    out.left.target = Edge::kLeft;
    out.right.target = Edge::kRight;
    out.left.deviation = max_deviation(trace.left, value, 0, trace.horizon());
    out.right.deviation = max_deviation(trace.right, value, 0, trace.horizon());
    return out;
  }
  return std::nullopt;
}

RateBounds rate_bounds(const StepTrace& trace) {
  if (trace.horizon() < 1) throw RuleError("rate bounds need at least one step");
  RateBounds b{Rational(trace.left[1] + 1), Rational(trace.right[1])};
  for (int t = 2; t <= trace.horizon(); ++t) {
    b.lower_left = max(b.lower_left, Rational(trace.left[t] + 1, t));
    b.upper_right = min(b.upper_right, Rational(trace.right[t], t));
  }
  return b;
}

std::vector<Rational> candidate_rates(const LocalRule& rule, State a, State b, Edge edge,
                                      const RateTable& known) {
  std::vector<Rational> out;
  auto cite = [&](State x, State y, Edge e) {
    if (!is_quiescent(rule, x) || !is_quiescent(rule, y) || x == y) return;
    const RatePair* p = known.find(x, y);
    if (!p) return;
    const RateEstimate& est = e == Edge::kLeft ? p->left : p->right;
    if (!est.exact()) return;
    if (std::find(out.begin(), out.end(), est.lower) == out.end()) out.push_back(est.lower);
  };
  if (a < b) {
    if (edge == Edge::kLeft) {
      for (int d = a + 1; d < b; ++d) cite(a, static_cast<State>(d), Edge::kRight);
    } else {
      for (int c = a + 1; c < b; ++c) cite(static_cast<State>(c), b, Edge::kLeft);
    }
  } else {
    // here b < a
    if (edge == Edge::kRight) {
      for (int c = b + 1; c < a; ++c) cite(static_cast<State>(c), b, Edge::kLeft);
    } else {
      for (int d = b + 1; d < a; ++d) cite(a, static_cast<State>(d), Edge::kRight);
    }
  }
  return out;
}

RatePair rate(const LocalRule& rule, State a, State b, const RateParams& params,
              const RateTable* known) {
  require_step_pair(rule, a, b);
  require_monotone(rule);
  if (params.max_time < 1 || params.confirm_window < 2 || params.denominator_bound < 1) {
    throw RuleError("rate parameters must be positive");
  }
  std::vector<Rational> cand_left, cand_right;
  if (known) {
    cand_left = candidate_rates(rule, a, b, Edge::kLeft, *known);
    cand_right = candidate_rates(rule, a, b, Edge::kRight, *known);
  }
  const bool adjacent = !quiescent_between(rule, a, b);

  StepEvolver ev(rule, a, b);
  std::vector<std::int64_t> left, right;
  std::unordered_map<std::string, int> seen;
  Rational lower_left, upper_right;
  std::optional<Stabilized> stab_left, stab_right;
  int checkpoint = std::min(2 * params.confirm_window, params.max_time);

  auto finish = [&](int T) {
    RatePair out;
    out.left.target = Edge::kLeft;
    out.right.target = Edge::kRight;
    for (RateEstimate* e : {&out.left, &out.right}) {
      e->horizon = T;
      e->lower = lower_left;
      e->upper = upper_right;
    }
    out.left.certified = lower_left;
    out.right.certified = upper_right;
    auto settle = [&](RateEstimate& e, const std::optional<Stabilized>& s,
                      const std::vector<std::int64_t>& edge) {
      if (!s) return;
      e.status = RateStatus::kExactStabilized;
      e.lower = e.upper = s->value;
      e.stabilized_from = s->from;
      e.period = s->period;
      e.from_candidate = s->candidate;
      e.deviation = max_deviation(edge, s->value, 0, T);
    };
    settle(out.left, stab_left, left);
    settle(out.right, stab_right, right);
    return out;
  };

  for (int t = 0;; ++t) {
    left.push_back(ev.left());
    right.push_back(ev.right());
    if (t >= 1) {
      const Rational lo(left[t] + 1, t), hi(right[t], t);
      if (t == 1) {
        lower_left = lo;
        upper_right = hi;
      } else {
        lower_left = max(lower_left, lo);
        upper_right = min(upper_right, hi);
      }
    }

    const auto& w = ev.interface();
    auto [it, fresh] = seen.emplace(std::string(w.begin(), w.end()), t);
    if (!fresh) {
      const int t1 = it->second;
      const std::int64_t shift = left[t] - left[t1];
      const Rational value(shift, t - t1);
      RatePair out = finish(t);
      for (RateEstimate* e : {&out.left, &out.right}) {
        e->status = RateStatus::kExactCycle;
        e->lower = e->upper = value;
        e->cycle = {t1, t};
        e->shift = shift;
        e->stabilized_from.reset();
        e->period = 0;
        e->from_candidate = false;
      }
      out.left.deviation = max_deviation(left, value, 0, t);
      out.right.deviation = max_deviation(right, value, 0, t);
      return out;
    }

    if (t >= 1 && lower_left == upper_right) {
      // L <= R with the bracket closed pins both values.
      stab_left = stab_right = Stabilized{lower_left, t, 0, false};
      return finish(t);
    }

    if (t == checkpoint || t == params.max_time) {
      auto sl = stabilize(left, params.confirm_window, params.denominator_bound, lower_left,
                          upper_right, cand_left);
      auto sr = stabilize(right, params.confirm_window, params.denominator_bound, lower_left,
                          upper_right, cand_right);
      if (sl) stab_left = sl;
      if (sr) stab_right = sr;
      if (adjacent) {
        // no quiescent state in between forces L = R
        if (stab_left && !stab_right) stab_right = stab_left;
        if (stab_right && !stab_left) stab_left = stab_right;
      }
      if ((stab_left && stab_right) || t == params.max_time) return finish(t);
      checkpoint = std::min(checkpoint * 2, params.max_time);
    }
    ev.step();
  }
}

RateTable rate_table(const LocalRule& rule, const RateParams& params, int workers) {
  require_monotone(rule);
  const std::vector<State> q = quiescent_states(rule);
  // Narrower pairs first so that their exact values can serve as candidates.
  std::map<int, std::vector<std::pair<State, State>>> by_width;
  for (State a : q) {
    for (State b : q) {
      if (a != b) by_width[std::abs(int(a) - int(b))].push_back({a, b});
    }
  }
  RateTable table;
  for (auto& [width, pairs] : by_width) {
    std::vector<RatePair> results(pairs.size());
    const RateTable& known = table;
    parallel_for(pairs.size(), workers, [&](std::size_t i) {
      results[i] = rate(rule, pairs[i].first, pairs[i].second, params, &known);
    });
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      table.set(pairs[i].first, pairs[i].second, std::move(results[i]));
    }
  }
  return table;
}

}  // namespace mca
