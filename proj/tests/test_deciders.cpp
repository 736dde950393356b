#include <random>

#include "doctest.h"
#include "mca/deciders.hpp"
#include "test_support.hpp"

using namespace mca;

namespace {

// A binary eroder wipes out a long island within linear time; a non-eroder
// keeps it alive.
bool island_dies(const LocalRule& f) {
  const int n = 40;
  Configuration x = Configuration::constant(-300, 300, 0);
  for (int i = 0; i < n; ++i) x.cells[static_cast<std::size_t>(i + 300)] = 1;
  for (int t = 0; t < 100; ++t) x = apply(f, x);
  return x == Configuration::constant(-300, 300, 0);
}

std::vector<LocalRule> binary_radius1() {
  std::vector<LocalRule> out;
  for (int mask = 0; mask < 256; ++mask) {
    std::vector<State> table(8);
    for (int k = 0; k < 8; ++k) table[static_cast<std::size_t>(k)] = State(mask >> k & 1);
    LocalRule f(2, 1, table);
    if (is_monotone(f) && is_quiescent(f, 0) && is_quiescent(f, 1)) out.push_back(f);
  }
  return out;
}

}  // namespace

TEST_SUITE("deciders") {
  TEST_CASE("shrinking") {
    const Verdict m = is_shrinking(builtin_rule("min2"), 0, 1);
    CHECK(m.answer == Answer::kYes);
    REQUIRE(m.forcing);
    CHECK(m.forcing->level == 1);
    CHECK(revalidate_shrinking(builtin_rule("min2"), 0, 1, m));
    const LocalRule g = builtin_rule("galperin3");
    CHECK(is_shrinking(g, 0, 2).answer == Answer::kNo);
    CHECK(is_shrinking(g, 1, 2).answer == Answer::kNo);
    CHECK(is_shrinking(g, 0, 1).answer == Answer::kYes);
    CHECK_THROWS(is_shrinking(g, 2, 1));
  }

  TEST_CASE("eroder and stable eroder verdicts") {
    const LocalRule g = builtin_rule("galperin3");
    CHECK(is_eroder(g).answer == Answer::kYes);
    CHECK(is_stable_eroder(g).answer == Answer::kNo);
    const LocalRule b = builtin_rule("bidir3");
    CHECK(is_eroder(b).answer == Answer::kYes);
    CHECK(is_eroder(reflect(invert(b))).answer == Answer::kYes);
    CHECK(is_stable_eroder(b).answer == Answer::kNo);
    const LocalRule w = builtin_rule("wrapped4");
    CHECK(is_eroder(w).answer == Answer::kYes);
    CHECK(is_stable_eroder(w).answer == Answer::kNo);
    const Verdict w23 = is_stable_eroder(restrict_states(w, 2, 3));
    CHECK(w23.answer == Answer::kYes);
    const Verdict m = is_stable_eroder(builtin_rule("min2"));
    CHECK(m.answer == Answer::kYes);
    CHECK(m.chain == std::vector<State>{0, 1});
    CHECK(is_eroder(LocalRule(2, 0, {0, 1})).answer == Answer::kNo);
    CHECK(is_eroder(builtin_rule("decrement", 3)).answer == Answer::kYes);
    CHECK(is_stable_eroder(builtin_rule("decrement", 3)).answer == Answer::kYes);
  }

  TEST_CASE("certificates revalidate") {
    std::vector<LocalRule> rules;
    for (const auto& name : builtin_names()) rules.push_back(builtin_rule(name));
    rules.push_back(restrict_states(builtin_rule("wrapped4"), 2, 3));
    for (const LocalRule& f : rules) {
      const Verdict s = is_stable_eroder(f);
      CHECK(s.answer != Answer::kUnknown);
      CHECK(revalidate_stable(f, s));
      const auto q = quiescent_states(f);
      for (State a : q)
        for (State b : q) {
          if (a >= b) continue;
          const Verdict v = is_shrinking(f, a, b);
          if (v.answer != Answer::kUnknown) CHECK(revalidate_shrinking(f, a, b, v));
        }
    }
    // a tampered chain fails
    Verdict fake = is_stable_eroder(builtin_rule("min2"));
    fake.chain = {0};
    CHECK_FALSE(revalidate_stable(builtin_rule("min2"), fake));
  }

  TEST_CASE("stable implies eroder and the inverse is no eroder") {
    std::vector<LocalRule> rules{builtin_rule("min2"), builtin_rule("decrement", 3)};
    std::mt19937_64 rng(8);
    for (int k = 0; k < 40; ++k) rules.push_back(test::random_monotone_quiescent(rng, 3, 1));
    int stable = 0;
    for (const LocalRule& f : rules) {
      const Verdict s = is_stable_eroder(f);
      const Verdict e = is_eroder(f);
      if (s.answer == Answer::kYes) {
        ++stable;
        CHECK(e.answer == Answer::kYes);
        CHECK(is_eroder(invert(f)).answer == Answer::kNo);
      }
      if (e.answer == Answer::kNo) CHECK(s.answer == Answer::kNo);
    }
    CHECK(stable >= 3);
  }

  TEST_CASE("binary equivalence, exhaustive radius 1") {
    int eroders = 0;
    for (const LocalRule& f : binary_radius1()) {
      const BinaryReport r = binary_equivalence_check(f);
      CHECK(r.agree);
      CHECK(r.eroder != Answer::kUnknown);
      CHECK((r.eroder == Answer::kYes) == island_dies(f));
      eroders += r.eroder == Answer::kYes;
    }
    CHECK(eroders > 0);
    const BinaryReport m = binary_equivalence_check(builtin_rule("min2"));
    CHECK(m.eroder == Answer::kYes);
    CHECK(m.stable == Answer::kYes);
    CHECK(m.shrinking == Answer::kYes);
    CHECK(m.tau_empty == Answer::kYes);
    const BinaryReport id = binary_equivalence_check(LocalRule(2, 0, {0, 1}));
    CHECK(id.eroder == Answer::kNo);
    CHECK(id.stable == Answer::kNo);
    CHECK(id.shrinking == Answer::kNo);
    CHECK(id.tau_empty == Answer::kNo);
  }
}
