#include "mca/deciders.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>

#include "mca/parallel.hpp"

namespace mca {

const char* to_string(Answer answer) {
  switch (answer) {
    case Answer::kYes:
      return "yes";
    case Answer::kNo:
      return "no";
    case Answer::kUnknown:
      break;
  }
  return "unknown";
}

namespace {

void require_extremes_quiescent(const LocalRule& rule) {
  if (!is_quiescent(rule, 0) || !is_quiescent(rule, rule.max_state())) {
    throw RuleError("states 0 and m must be quiescent");
  }
}

// Looks the pair up in `table`, computing it on demand otherwise.
RatePair rates_for(const LocalRule& rule, State a, State b, const DecideParams& params,
                   const RateTable* table) {
  if (table) {
    if (const RatePair* p = table->find(a, b)) return *p;
  }
  return rate(rule, a, b, params.rates);
}

RateCitation cite(State a, State b, Edge edge, const RatePair& pair) {
  return {a, b, edge, edge == Edge::kLeft ? pair.left : pair.right};
}

// Sign of x - y when the brackets decide it: +1 if x > y surely, -1 if
// x <= y surely, 0 otherwise.
int compare_brackets(const RateEstimate& x, const RateEstimate& y) {
  if (x.lower > y.upper) return 1;
  if (x.upper <= y.lower) return -1;
  return 0;
}

}  // namespace

Verdict is_shrinking(const LocalRule& rule, State a, State b, const DecideParams& params,
                     const RateTable* table) {
  if (!(a < b)) throw RuleError("shrinking needs a < b");
  if (!is_quiescent(rule, a) || !is_quiescent(rule, b)) {
    throw RuleError("shrinking needs quiescent states");
  }
  Verdict v;
  const RatePair ab = rates_for(rule, a, b, params, table);
  const RatePair ba = rates_for(rule, b, a, params, table);
  v.rates = {cite(a, b, Edge::kLeft, ab), cite(b, a, Edge::kRight, ba)};
  const int by_rates = compare_brackets(ab.left, ba.right);
  v.forcing = shrinking_certificate(rule, a, b, params.k_max);

  if (v.forcing && by_rates < 0) {
    throw std::logic_error("forcing certificate contradicts rates for pair " + std::to_string(a) +
                           "," + std::to_string(b));
  }
  if (v.forcing || by_rates > 0) {
    v.answer = Answer::kYes;
  } else if (by_rates < 0) {
    v.answer = Answer::kNo;
  } else {
    v.note = "no forcing certificate up to level " + std::to_string(params.k_max) +
             " and rate brackets overlap";
  }
  return v;
}

Verdict is_eroder(const LocalRule& rule, const DecideParams& params, const RateTable* table) {
  require_extremes_quiescent(rule);
  Verdict v;
  v.answer = Answer::kYes;
  for (State a : quiescent_states(rule)) {
    if (a == 0) continue;
    const RatePair zero_a = rates_for(rule, 0, a, params, table);
    const RatePair a_zero = rates_for(rule, a, 0, params, table);
    const int cmp = compare_brackets(zero_a.right, a_zero.left);
    if (cmp > 0 && v.answer == Answer::kYes) {
      v.rates.push_back(cite(0, a, Edge::kRight, zero_a));
      v.rates.push_back(cite(a, 0, Edge::kLeft, a_zero));
    } else if (cmp < 0) {
      // a single failing state settles it
      v.answer = Answer::kNo;
      v.rates = {cite(0, a, Edge::kRight, zero_a), cite(a, 0, Edge::kLeft, a_zero)};
      v.note.clear();
      return v;
    } else if (cmp == 0) {
      v.answer = Answer::kUnknown;
      v.rates.clear();
      v.note = "rates for state " + std::to_string(a) + " only bracketed";
    }
  }
  return v;
}

Verdict is_stable_eroder(const LocalRule& rule, const DecideParams& params,
                         const RateTable* table) {
  require_extremes_quiescent(rule);
  std::optional<RateTable> own;
  if (!table) {
    own = rate_table(rule, params.rates, params.workers);
    table = &*own;
  }
  const std::vector<State> q = quiescent_states(rule);
  std::vector<std::pair<State, State>> pairs;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) pairs.push_back({q[i], q[j]});
  }
  std::vector<Verdict> results(pairs.size());
  parallel_for(pairs.size(), params.workers, [&](std::size_t i) {
    results[i] = is_shrinking(rule, pairs[i].first, pairs[i].second, params, table);
  });
  std::map<std::pair<State, State>, const Verdict*> edge;
  for (std::size_t i = 0; i < pairs.size(); ++i) edge[pairs[i]] = &results[i];

  // Chain formulation: shortest path 0 -> m over yes-edges, lexicographically
  // smallest among shortest. Distances are taken toward m.
  auto distances = [&](bool optimistic) {
    std::map<State, int> dist;
    dist[q.back()] = 0;
    for (std::size_t i = q.size() - 1; i-- > 0;) {
      for (std::size_t j = i + 1; j < q.size(); ++j) {
        const Answer ans = edge.at({q[i], q[j]})->answer;
        const bool usable = ans == Answer::kYes || (optimistic && ans == Answer::kUnknown);
        if (!usable || !dist.count(q[j])) continue;
        const int d = dist[q[j]] + 1;
        if (!dist.count(q[i]) || d < dist[q[i]]) dist[q[i]] = d;
      }
    }
    return dist;
  };
  const auto sure = distances(false);
  const auto hopeful = distances(true);
  Answer chain_answer = Answer::kUnknown;
  std::vector<State> chain;
  if (sure.count(0)) {
    chain_answer = Answer::kYes;
    State cur = 0;
    chain.push_back(cur);
    while (cur != q.back()) {
      for (State next : q) {
        if (next <= cur || !sure.count(next)) continue;
        if (edge.at({cur, next})->answer == Answer::kYes && sure.at(next) == sure.at(cur) - 1) {
          cur = next;
          break;
        }
      }
      chain.push_back(cur);
    }
  } else if (!hopeful.count(0)) {
    chain_answer = Answer::kNo;
  }

  // Alternative formulation: every quiescent a > 0 has a shrinking pair
  // (b, a) with b < a.
  Answer alt_answer = Answer::kYes;
  std::optional<State> witness;
  for (std::size_t j = 1; j < q.size(); ++j) {
    bool any_yes = false, all_no = true;
    for (std::size_t i = 0; i < j; ++i) {
      const Answer ans = edge.at({q[i], q[j]})->answer;
      any_yes = any_yes || ans == Answer::kYes;
      all_no = all_no && ans == Answer::kNo;
    }
    if (all_no) {
      alt_answer = Answer::kNo;
      witness = q[j];
      break;
    }
    if (!any_yes) alt_answer = Answer::kUnknown;
  }

  if (chain_answer != Answer::kUnknown && alt_answer != Answer::kUnknown &&
      chain_answer != alt_answer) {
    throw std::logic_error("chain and alternative stability formulations disagree");
  }

  Verdict v;
  if (chain_answer == Answer::kYes || (chain_answer == Answer::kUnknown && alt_answer == Answer::kYes)) {
    if (chain_answer == Answer::kYes) {
      v.answer = Answer::kYes;
      v.chain = chain;
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        v.edges.push_back(*edge.at({chain[i], chain[i + 1]}));
      }
    } else {
      // Every state has a yes-edge below it, so following them down from m
      // always reaches 0; build that chain.
      std::vector<State> down{q.back()};
      while (down.back() != 0) {
        for (State b : q) {
          if (b < down.back() && edge.at({b, down.back()})->answer == Answer::kYes) {
            down.push_back(b);
            break;
          }
        }
      }
      std::reverse(down.begin(), down.end());
      v.answer = Answer::kYes;
      v.chain = down;
      for (std::size_t i = 0; i + 1 < down.size(); ++i) {
        v.edges.push_back(*edge.at({down[i], down[i + 1]}));
      }
    }
  } else if (chain_answer == Answer::kNo || alt_answer == Answer::kNo) {
    v.answer = Answer::kNo;
    if (witness) {
      // every pair (b, witness) with b < witness fails to shrink
      for (State b : q) {
        if (b < *witness) v.edges.push_back(*edge.at({b, *witness}));
      }
      v.note = "state " + std::to_string(*witness) + " has no shrinking pair below it";
    } else {
      // no path even through undecided edges: cite every non-yes edge
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (results[i].answer == Answer::kNo) v.edges.push_back(results[i]);
      }
      v.note = "no chain from 0 to m";
    }
  } else {
    v.note = "some pairs undecided";
  }
  return v;
}

bool revalidate_shrinking(const LocalRule& rule, State a, State b, const Verdict& verdict) {
  if (verdict.answer == Answer::kUnknown) return true;
  if (verdict.answer == Answer::kYes && verdict.forcing) {
    return check_certificate(rule, a, b, *verdict.forcing);
  }
  // Rate route: recompute both cited rates and repeat the comparison.
  const RatePair ab = rate(rule, a, b);
  const RatePair ba = rate(rule, b, a);
  const int cmp = compare_brackets(ab.left, ba.right);
  return verdict.answer == Answer::kYes ? cmp > 0 : cmp < 0;
}

bool revalidate_stable(const LocalRule& rule, const Verdict& verdict) {
  if (verdict.answer == Answer::kYes) {
    if (verdict.chain.empty() || verdict.chain.front() != 0 ||
        verdict.chain.back() != rule.max_state() ||
        verdict.edges.size() + 1 != verdict.chain.size()) {
      return false;
    }
    for (std::size_t i = 0; i + 1 < verdict.chain.size(); ++i) {
      const Verdict& e = verdict.edges[i];
      if (e.answer != Answer::kYes ||
          !revalidate_shrinking(rule, verdict.chain[i], verdict.chain[i + 1], e)) {
        return false;
      }
    }
    return true;
  }
  if (verdict.answer == Answer::kNo) {
    for (const Verdict& e : verdict.edges) {
      if (e.rates.size() != 2) return false;
      const State a = e.rates[0].a, b = e.rates[0].b;
      if (e.answer != Answer::kNo || !revalidate_shrinking(rule, a, b, e)) return false;
    }
    return true;
  }
  return true;
}

BinaryReport binary_equivalence_check(const LocalRule& rule, const DecideParams& params) {
  if (rule.state_count() != 2) throw RuleError("binary check needs a binary rule");
  if (!is_monotone(rule)) throw RuleError("binary check needs a monotone rule");
  require_extremes_quiescent(rule);
  const RateTable table = rate_table(rule, params.rates, params.workers);
  BinaryReport report;
  report.eroder = is_eroder(rule, params, &table).answer;
  report.stable = is_stable_eroder(rule, params, &table).answer;
  report.shrinking = is_shrinking(rule, 0, 1, params, &table).answer;
  report.tau_empty = tau(rule, 0, 1, 1) ? Answer::kNo : Answer::kYes;
  std::optional<Answer> seen;
  for (Answer ans : {report.eroder, report.stable, report.shrinking, report.tau_empty}) {
    if (ans == Answer::kUnknown) continue;
    if (seen && *seen != ans) report.agree = false;
    seen = ans;
  }
  return report;
}

}  // namespace mca
