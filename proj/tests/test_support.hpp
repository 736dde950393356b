#pragma once
// Helpers shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <random>
#include <sstream>
#include <string>

#include "mca/rule.hpp"
#include "mca/stepdyn.hpp"

namespace test {

using namespace mca;

// Random monotone rule with 0 and m quiescent. Half of the draws are lattice
// polynomials (max of mins over random position sets) followed by a monotone
// state map fixing 0 and m; these include eroders such as min2. The rest are
// noisy local averages closed under "max over cellwise-smaller neighborhoods".
inline LocalRule random_monotone_quiescent(std::mt19937_64& rng, int states, int radius) {
  const std::size_t size = *LocalRule::table_size(states, radius);
  const LocalRule shape(states, radius, std::vector<State>(size, 0));
  const int m = states - 1;
  const int w = 2 * radius + 1;
  std::vector<int> table(size);
  if (std::bernoulli_distribution(0.5)(rng)) {
    std::uniform_int_distribution<int> term_count(1, 3);
    std::uniform_int_distribution<unsigned> subset(1, (1u << w) - 1);
    std::vector<unsigned> terms(static_cast<std::size_t>(term_count(rng)));
    for (auto& t : terms) t = subset(rng);
    std::vector<int> map(static_cast<std::size_t>(states));
    for (int s = 1; s < m; ++s) map[static_cast<std::size_t>(s)] = std::uniform_int_distribution<int>(0, m)(rng);
    map[static_cast<std::size_t>(m)] = m;
    std::sort(map.begin(), map.end());
    for (std::size_t k = 0; k < size; ++k) {
      const auto word = shape.neighborhood_of(k);
      int value = 0;
      for (unsigned t : terms) {
        int low = m;
        for (int j = 0; j < w; ++j) {
          if (t >> j & 1u) low = std::min<int>(low, word[static_cast<std::size_t>(j)]);
        }
        value = std::max(value, low);
      }
      table[k] = map[static_cast<std::size_t>(value)];
    }
  } else {
    std::uniform_int_distribution<int> jitter(-1, 1);
    for (std::size_t k = 0; k < size; ++k) {
      const auto word = shape.neighborhood_of(k);
      int sum = 0;
      for (State s : word) sum += s;
      table[k] = std::clamp((sum + w / 2) / w + jitter(rng), 0, m);
    }
    table[0] = 0;
    // Decreasing one coordinate lowers the index, so one pass in index order
    // closes the table under "max over predecessors".
    for (std::size_t k = 0; k < size; ++k) {
      std::size_t place = 1;
      const auto word = shape.neighborhood_of(k);
      for (int j = w - 1; j >= 0; --j, place *= static_cast<std::size_t>(states)) {
        if (word[static_cast<std::size_t>(j)] > 0) table[k] = std::max(table[k], table[k - place]);
      }
    }
    table[size - 1] = m;
  }
  std::vector<State> out(table.begin(), table.end());
  return LocalRule(states, radius, std::move(out));
}

// Checks every structural property of step edges and exact rates. Returns
// an empty string, or a description of the first violation.
inline std::string rate_properties(const LocalRule& f, int additivity_horizon,
                                   int deviation_horizon, const RateParams& params = {}) {
  std::ostringstream bad;
  const auto q = quiescent_states(f);
  const RateTable table = rate_table(f, params);
  const RateTable mirrored = rate_table(reflect(f), params);
  auto value = [&](const RateTable& t, State a, State b, Edge e) -> std::optional<Rational> {
    const RatePair& p = t.at(a, b);
    return (e == Edge::kLeft ? p.left : p.right).value();
  };
  auto L = [&](State a, State b) { return value(table, a, b, Edge::kLeft); };
  auto R = [&](State a, State b) { return value(table, a, b, Edge::kRight); };

  for (State a : q) {
    for (State b : q) {
      if (a == b) continue;
      const int horizon = std::max(additivity_horizon, deviation_horizon);
      const StepTrace tr = evolve_step(f, a, b, horizon);
      const int half = additivity_horizon / 2;
      for (int t = 1; t <= half; ++t) {
        for (int s = 1; s <= half; ++s) {
          const auto u = static_cast<std::size_t>(t), v = static_cast<std::size_t>(s);
          if (tr.left[u + v] < tr.left[u] + tr.left[v] + 1) {
            bad << "superadditivity " << int(a) << "," << int(b) << " t=" << t << " s=" << s;
            return bad.str();
          }
          if (tr.right[u + v] > tr.right[u] + tr.right[v]) {
            bad << "subadditivity " << int(a) << "," << int(b) << " t=" << t << " s=" << s;
            return bad.str();
          }
        }
      }
      const auto l = L(a, b), r = R(a, b);
      for (int t = 1; t <= deviation_horizon; ++t) {
        const auto u = static_cast<std::size_t>(t);
        if (l && Rational(tr.left[u] + 1, t) > *l) {
          bad << "sandwich L " << int(a) << "," << int(b) << " t=" << t;
          return bad.str();
        }
        if (r && Rational(tr.right[u], t) < *r) {
          bad << "sandwich R " << int(a) << "," << int(b) << " t=" << t;
          return bad.str();
        }
      }
      // the deviation from the linear trend must not grow with time
      const int mid = deviation_horizon / 2;
      for (const auto& [edge, rate] : {std::pair{&tr.left, l}, std::pair{&tr.right, r}}) {
        if (!rate) continue;
        if (max_deviation(*edge, *rate, mid, deviation_horizon) >
            max_deviation(*edge, *rate, 0, mid)) {
          bad << "deviation grows " << int(a) << "," << int(b);
          return bad.str();
        }
      }
      if (l && r) {
        bool between = false;
        for (State c : q) between = between || (std::min(a, b) < c && c < std::max(a, b));
        if (*l > *r || (!between && *l != *r)) {
          bad << "L <= R with equality when adjacent " << int(a) << "," << int(b);
          return bad.str();
        }
      }
      const auto rl = value(mirrored, b, a, Edge::kRight);
      if (l && rl && *l != -*rl) {
        bad << "reflection " << int(a) << "," << int(b);
        return bad.str();
      }
    }
  }

  for (State a : q) {
    for (State b : q) {
      for (State c : q) {
        if (!(a < b && b < c)) continue;
        // raising the larger side
        if (L(a, b) && L(a, c) && *L(a, b) < *L(a, c)) bad << "L_ab >= L_ac ";
        if (R(b, a) && R(c, a) && *R(b, a) > *R(c, a)) bad << "R_ba <= R_ca ";
        // raising the smaller side
        if (R(a, c) && R(b, c) && *R(a, c) < *R(b, c)) bad << "R_ac >= R_bc ";
        if (L(c, a) && L(c, b) && *L(c, a) > *L(c, b)) bad << "L_ca <= L_cb ";
        if (!bad.str().empty()) {
          bad << int(a) << "<" << int(b) << "<" << int(c);
          return bad.str();
        }
      }
    }
  }

  if (table.all_exact()) {
    for (State a : q) {
      for (State b : q) {
        if (a >= b) continue;
        bool found = false;
        for (State c : q) found = found || (a < c && c <= b && *L(c, a) == *R(b, a));
        if (!found) {
          bad << "border guard " << int(a) << "," << int(b);
          return bad.str();
        }
      }
    }
  }
  return bad.str();
}

}  // namespace test
