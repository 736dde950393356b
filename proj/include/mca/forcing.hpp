#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mca/rule.hpp"

namespace mca {

using CellSet = std::vector<std::int64_t>;  // sorted, distinct

inline constexpr std::size_t kDefaultForcingBudget = std::size_t{1} << 22;

struct ForcingFamily {
  State a = 0;
  State b = 0;
  int level = 0;
  std::vector<CellSet> sets;  // by size, then lexicographic
  bool complete = true;
  std::size_t evaluations = 0;
};

// V is a,b-forcing at level k iff the configuration holding a on V and b
// elsewhere sends the origin to a state <= a after k steps. Monotonicity
// makes this single configuration the worst case.
bool is_forcing(const LocalRule& rule, const CellSet& cells, State a, State b, int level);

ForcingFamily minimal_forcing_sets(const LocalRule& rule, State a, State b, int level,
                                   std::size_t budget = kDefaultForcingBudget);

// Intersection of the convex hulls of all minimal forcing sets at level k,
// computed from the shortest forcing prefix and suffix of the level window.
// nullopt means the intersection is empty.
std::optional<std::pair<std::int64_t, std::int64_t>> tau(const LocalRule& rule, State a, State b,
                                                         int level);

struct ShrinkingCertificate {
  int level = 0;
  CellSet left;   // U
  CellSet right;  // V, with max U < min V
};

std::optional<ShrinkingCertificate> shrinking_certificate(const LocalRule& rule, State a, State b,
                                                          int k_max = 8);
bool check_certificate(const LocalRule& rule, State a, State b, const ShrinkingCertificate& cert);

// Drops elements greedily (in increasing order) while the set stays forcing.
CellSet minimize_forcing(const LocalRule& rule, CellSet cells, State a, State b, int level);

CellSet sum_forcing(const CellSet& u, const CellSet& v);

}  // namespace mca
