#include <algorithm>
#include <random>

#include "doctest.h"
#include "mca/rule.hpp"

using namespace mca;

namespace {

// Written out from the case list, independently of the library's builtin.
int ternary_oracle(int a, int b, int c) {
  if (a == 0 && b <= 1 && c <= 1) return 0;
  if (b == 2 && c <= 1) return 1;
  if (a + b >= c && c == 2) return 2;
  return b;
}

Configuration random_config(std::mt19937_64& rng, int states, std::int64_t lo, int width) {
  std::uniform_int_distribution<int> pick(0, states - 1);
  Configuration c = Configuration::constant(lo, lo + width - 1, 0);
  for (auto& s : c.cells) s = static_cast<State>(pick(rng));
  return c;
}

LocalRule random_monotone(std::mt19937_64& rng, int states, int radius) {
  const int w = 2 * radius + 1;
  std::vector<int> weight(static_cast<std::size_t>(w));
  std::uniform_int_distribution<int> pick(0, 2);
  for (auto& x : weight) x = pick(rng);
  weight[static_cast<std::size_t>(radius)] = std::max(1, weight[static_cast<std::size_t>(radius)]);
  LocalRule shape(states, radius, std::vector<State>(*LocalRule::table_size(states, radius), 0));
  std::vector<State> table(shape.table().size());
  int total = 0;
  for (int x : weight) total += x;
  for (std::size_t k = 0; k < table.size(); ++k) {
    const auto word = shape.neighborhood_of(k);
    int sum = 0;
    for (int j = 0; j < w; ++j) sum += weight[static_cast<std::size_t>(j)] * word[static_cast<std::size_t>(j)];
    table[k] = static_cast<State>(sum / total);  // floor of a weighted mean
  }
  return LocalRule(states, radius, std::move(table));
}

Configuration island(std::int64_t lo, std::int64_t hi, std::int64_t from, std::int64_t to,
                     State s) {
  Configuration c = Configuration::constant(lo, hi, 0);
  for (std::int64_t i = from; i <= to; ++i) c.cells[static_cast<std::size_t>(i - lo)] = s;
  return c;
}

}  // namespace

TEST_SUITE("rule_core") {
  TEST_CASE("galperin3 table matches the case list") {
    const LocalRule f = builtin_rule("galperin3");
    CHECK(f.state_count() == 3);
    CHECK(f.radius() == 1);
    REQUIRE(f.table().size() == 27);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          const std::vector<State> w{State(a), State(b), State(c)};
          CHECK(int(f(w)) == ternary_oracle(a, b, c));
        }
  }

  TEST_CASE("parse identity and builtin files") {
    const LocalRule id = parse_rule("ca-rule v1\nstates 2\nradius 0\ntable 0 1\n");
    CHECK(id.table() == std::vector<State>{0, 1});
    const LocalRule dec = parse_rule("# comment\nca-rule v1\nbuiltin decrement 3\n");
    CHECK(dec.state_count() == 4);
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        const std::vector<State> w{0, State(b), State(c)};
        CHECK(int(dec(w)) == ((b > 0 && c == 0) ? b - 1 : b));
      }
    CHECK(parse_rule(format_rule(builtin_rule("bidir3"))) == builtin_rule("bidir3"));
    CHECK(load_rule("builtin:decrement:2").state_count() == 3);
  }

  TEST_CASE("parse errors carry positions") {
    auto line_of = [](const char* text) {
      try {
        parse_rule(text);
      } catch (const RuleParseError& e) {
        return e.line();
      }
      return -1;
    };
    CHECK(line_of("ca-rule v2\n") == 1);
    CHECK(line_of("ca-rule v1\nstates 2\nradius 0\ntable 0 1 1\n") == 4);
    CHECK(line_of("ca-rule v1\nstates 2\nradius 0\ntable 0\n") == 4);
    CHECK(line_of("ca-rule v1\nstates 2\nradius 0\ntable 0 2\n") == 4);
    CHECK(line_of("ca-rule v1\n\nbuiltin nosuch\n") == 3);
    CHECK(line_of("ca-rule v1\nfrobnicate\n") == 2);
    CHECK_THROWS_AS(load_rule("builtin:nosuch"), RuleError);
  }

  TEST_CASE("apply examples") {
    const LocalRule f = builtin_rule("galperin3");
    const Configuration x = island(-5, 15, 0, 9, 2);
    Configuration expect = island(-5, 15, 0, 8, 2);
    expect.cells[static_cast<std::size_t>(9 + 5)] = 1;
    CHECK(apply(f, x) == expect);
    CHECK(apply_power(f, x, 20) == Configuration::constant(-5, 15, 0));
    CHECK(apply_power(f, x, 0) == x);

    const LocalRule d = builtin_rule("decrement", 3);
    Configuration y = island(-3, 3, 0, 0, 3);
    CHECK(apply(d, y).at(0) == 2);
    CHECK(apply_power(d, y, 3) == Configuration::constant(-3, 3, 0));

    const LocalRule id(2, 0, {0, 1});
    std::mt19937_64 rng(3);
    const Configuration z = random_config(rng, 2, -4, 9);
    CHECK(apply(id, z) == z);

    // 0 is not quiescent for the constant-1 rule
    CHECK_THROWS_AS(apply(LocalRule(2, 0, {1, 1}), Configuration::constant(0, 3, 0)), RuleError);
  }

  TEST_CASE("shift equivariance and constant configurations") {
    std::mt19937_64 rng(11);
    for (const auto& name : builtin_names()) {
      const LocalRule f = builtin_rule(name);
      for (int rep = 0; rep < 20; ++rep) {
        Configuration x = random_config(rng, f.state_count(), -7, 15);
        // pad with zeros so the window edges do not matter
        Configuration padded = Configuration::constant(-20, 20, 0);
        for (std::int64_t i = x.lo; i <= x.hi(); ++i) padded.cells[static_cast<std::size_t>(i + 20)] = x.at(i);
        Configuration shifted = padded;
        shifted.lo += 13;
        const Configuration a = apply(f, padded);
        Configuration b = apply(f, shifted);
        b.lo -= 13;
        CHECK(a == b);
      }
      for (State q : quiescent_states(f)) {
        const Configuration c = Configuration::constant(-3, 3, q);
        CHECK(apply(f, c) == c);
      }
    }
  }

  TEST_CASE("monotone rules preserve order on random pairs") {
    std::mt19937_64 rng(5);
    for (const auto& name : builtin_names()) {
      const LocalRule f = builtin_rule(name);
      REQUIRE(is_monotone(f));
      std::uniform_int_distribution<int> pick(0, f.max_state());
      for (int rep = 0; rep < 1000 / 5; ++rep) {
        Configuration x = Configuration::constant(-6, 6, 0);
        Configuration y = x;
        for (std::size_t k = 0; k < x.cells.size(); ++k) {
          int a = pick(rng), b = pick(rng);
          if (a > b) std::swap(a, b);
          x.cells[k] = State(a);
          y.cells[k] = State(b);
        }
        const auto fx = apply(f, x), fy = apply(f, y);
        for (std::size_t k = 0; k < fx.cells.size(); ++k) CHECK(fx.cells[k] <= fy.cells[k]);
      }
    }
  }

  TEST_CASE("monotonicity verdicts") {
    CHECK(is_monotone(LocalRule(2, 0, {0, 1})));
    // (b + 1) mod 3 is not monotone
    std::vector<State> table(27);
    for (std::size_t k = 0; k < 27; ++k) table[k] = State(((k / 3) % 3 + 1) % 3);
    const LocalRule cyc(3, 1, table);
    const auto v = is_monotone(cyc);
    REQUIRE_FALSE(v);
    REQUIRE(v.witness);
    const auto& w = *v.witness;
    CHECK(cyc(w.lower) > cyc(w.upper));
    int diff = 0;
    for (std::size_t k = 0; k < w.lower.size(); ++k) {
      CHECK(w.lower[k] <= w.upper[k]);
      diff += w.upper[k] - w.lower[k];
    }
    CHECK(diff == 1);
    // reflect and invert keep the verdict
    CHECK_FALSE(is_monotone(reflect(cyc)));
    CHECK_FALSE(is_monotone(invert(cyc)));
    for (const auto& name : builtin_names()) {
      CHECK(is_monotone(reflect(builtin_rule(name))));
      CHECK(is_monotone(invert(builtin_rule(name))));
    }
  }

  TEST_CASE("quiescent states") {
    CHECK(quiescent_states(builtin_rule("galperin3")) == std::vector<State>{0, 1, 2});
    CHECK(quiescent_states(builtin_rule("decrement", 3)) == std::vector<State>{0, 1, 2, 3});
    CHECK(quiescent_states(LocalRule(3, 0, {0, 1, 2})) == std::vector<State>{0, 1, 2});
  }

  TEST_CASE("reflect invert restrict") {
    const LocalRule f = builtin_rule("galperin3");
    CHECK(reflect(reflect(f)) == f);
    CHECK(invert(invert(f)) == f);
    const LocalRule rf = reflect(f);
    for (auto w : {std::vector<State>{0, 1, 2}, std::vector<State>{2, 2, 0}, std::vector<State>{1, 0, 2}}) {
      std::vector<State> rev(w.rbegin(), w.rend());
      CHECK(rf(w) == f(rev));
    }
    // simulation of the reflection equals the mirrored simulation
    std::mt19937_64 rng(2);
    Configuration x = Configuration::constant(-10, 10, 0);
    std::uniform_int_distribution<int> pick(0, 2);
    for (std::int64_t i = -4; i <= 4; ++i) x.cells[static_cast<std::size_t>(i + 10)] = State(pick(rng));
    Configuration mx = x;
    std::reverse(mx.cells.begin(), mx.cells.end());
    Configuration a = apply_power(rf, mx, 3);
    std::reverse(a.cells.begin(), a.cells.end());
    CHECK(a == apply_power(f, x, 3));

    const LocalRule b = builtin_rule("bidir3");
    CHECK(invert(reflect(b)) == b);

    const LocalRule m = invert(builtin_rule("min2"));
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        for (int s = 0; s < 2; ++s) {
          const std::vector<State> w{State(p), State(q), State(s)};
          CHECK(int(m(w)) == std::max(q, s));
        }

    const LocalRule w23 = restrict_states(builtin_rule("wrapped4"), 2, 3);
    CHECK(w23.state_count() == 2);
    CHECK(restrict_states(f, 0, 2) == f);
    const LocalRule g01 = restrict_states(f, 0, 1);
    CHECK(g01.state_count() == 2);
    CHECK_THROWS_AS(restrict_states(LocalRule(3, 0, {0, 0, 2}), 1, 2), RuleError);
  }

  TEST_CASE("compose_power agrees with iteration") {
    const LocalRule f = builtin_rule("galperin3");
    CHECK(compose_power(f, 1) == f);
    const LocalRule f2 = compose_power(f, 2);
    CHECK(f2.radius() == 2);
    CHECK(f2.table().size() == 243);
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 200; ++rep) {
      const Configuration x = random_config(rng, 3, 0, 5);
      CHECK(f2(x.cells) == apply_shrinking(f, apply_shrinking(f, x.cells))[0]);
    }
    const LocalRule b = builtin_rule("bidir3");
    const LocalRule b3 = compose_power(b, 3);
    for (int rep = 0; rep < 50; ++rep) {
      Configuration x = Configuration::constant(-20, 20, 0);
      std::uniform_int_distribution<int> pick(0, 2);
      for (std::int64_t i = -8; i <= 8; ++i) x.cells[static_cast<std::size_t>(i + 20)] = State(pick(rng));
      CHECK(apply(b3, x) == apply_power(b, x, 3));
    }
    CHECK_THROWS_AS(compose_power(builtin_rule("wrapped4"), 20, 1 << 20), RuleError);
  }

  TEST_CASE("random monotone rules stay monotone under transforms") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 20; ++rep) {
      const LocalRule f = random_monotone(rng, 3, 1);
      CHECK(is_monotone(f).monotone == is_monotone(reflect(f)).monotone);
      CHECK(is_monotone(f).monotone == is_monotone(invert(f)).monotone);
    }
  }
}
