#include "mca/forcing.hpp"

#include <algorithm>

namespace mca {

namespace {

void require_forcing_pair(const LocalRule& rule, State a, State b, int level) {
  if (!(a < b)) throw RuleError("forcing pairs need a < b");
  if (!is_quiescent(rule, a) || !is_quiescent(rule, b)) {
    throw RuleError("forcing pairs need quiescent states");
  }
  if (level < 1) throw RuleError("forcing level must be at least 1");
}

// Evaluates the extremal configuration given as a mask over [-kr, kr].
bool forcing_mask(const LocalRule& rule, const std::vector<char>& mask, State a, State b,
                  int level) {
  std::vector<State> word(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) word[i] = mask[i] ? a : b;
  for (int s = 0; s < level; ++s) word = apply_shrinking(rule, word);
  return word.front() <= a;
}

}  // namespace

bool is_forcing(const LocalRule& rule, const CellSet& cells, State a, State b, int level) {
  require_forcing_pair(rule, a, b, level);
  const std::int64_t reach = static_cast<std::int64_t>(level) * rule.radius();
  std::vector<char> mask(static_cast<std::size_t>(2 * reach + 1), 0);
  for (std::int64_t v : cells) {
    if (v < -reach || v > reach) {
      throw RuleError("cell " + std::to_string(v) + " outside the level window [" +
                      std::to_string(-reach) + "," + std::to_string(reach) + "]");
    }
    mask[static_cast<std::size_t>(v + reach)] = 1;
  }
  return forcing_mask(rule, mask, a, b, level);
}

// Depth-first search over the window positions in increasing order. A branch
// that excludes a position is cut when even taking every later position would
// not force; a branch stops growing as soon as it forces. Every minimal set is
// reached along the path that includes exactly its elements, and every node
// visited has a forcing leaf below it.
ForcingFamily minimal_forcing_sets(const LocalRule& rule, State a, State b, int level,
                                   std::size_t budget) {
  require_forcing_pair(rule, a, b, level);
  ForcingFamily family;
  family.a = a;
  family.b = b;
  family.level = level;
  const std::int64_t reach = static_cast<std::int64_t>(level) * rule.radius();
  const std::size_t n = static_cast<std::size_t>(2 * reach + 1);

  auto test = [&](const std::vector<char>& mask) {
    ++family.evaluations;
    return forcing_mask(rule, mask, a, b, level);
  };
  auto exhausted = [&] {
    if (family.evaluations < budget) return false;
    family.complete = false;
    return true;
  };

  std::vector<char> chosen(n, 0);
  std::vector<std::vector<char>> leaves;
  // chosen so far plus every position from `from` on
  auto optimistic = [&](std::size_t from) {
    std::vector<char> m = chosen;
    std::fill(m.begin() + static_cast<std::ptrdiff_t>(from), m.end(), 1);
    return m;
  };

  auto dfs = [&](auto&& self, std::size_t pos) -> void {
    if (exhausted()) return;
    if (test(chosen)) {
      leaves.push_back(chosen);
      return;
    }
    if (pos == n) return;
    chosen[pos] = 1;
    self(self, pos + 1);
    chosen[pos] = 0;
    if (exhausted()) return;
    if (test(optimistic(pos + 1))) self(self, pos + 1);
  };
  if (test(optimistic(0))) dfs(dfs, 0);

  for (auto& leaf : leaves) {
    bool minimal = true;
    for (std::size_t i = 0; i < n && minimal; ++i) {
      if (!leaf[i]) continue;
      leaf[i] = 0;
      if (test(leaf)) minimal = false;
      leaf[i] = 1;
    }
    if (!minimal) continue;
    CellSet set;
    for (std::size_t i = 0; i < n; ++i) {
      if (leaf[i]) set.push_back(static_cast<std::int64_t>(i) - reach);
    }
    family.sets.push_back(std::move(set));
  }
  std::sort(family.sets.begin(), family.sets.end(), [](const CellSet& x, const CellSet& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  family.sets.erase(std::unique(family.sets.begin(), family.sets.end()), family.sets.end());
  return family;
}

namespace {

// Smallest j with [-kr, j] forcing and largest j with [j, kr] forcing.
std::pair<std::int64_t, std::int64_t> forcing_prefix_suffix(const LocalRule& rule, State a,
                                                            State b, int level) {
  const std::int64_t reach = static_cast<std::int64_t>(level) * rule.radius();
  const std::size_t n = static_cast<std::size_t>(2 * reach + 1);
  std::vector<char> mask(n, 0);
  std::int64_t prefix = reach;
  for (std::size_t i = 0; i < n; ++i) {
    mask[i] = 1;
    if (forcing_mask(rule, mask, a, b, level)) {
      prefix = static_cast<std::int64_t>(i) - reach;
      break;
    }
  }
  std::fill(mask.begin(), mask.end(), 0);
  std::int64_t suffix = -reach;
  for (std::size_t i = n; i-- > 0;) {
    mask[i] = 1;
    if (forcing_mask(rule, mask, a, b, level)) {
      suffix = static_cast<std::int64_t>(i) - reach;
      break;
    }
  }
  return {prefix, suffix};
}

}  // namespace

std::optional<std::pair<std::int64_t, std::int64_t>> tau(const LocalRule& rule, State a, State b,
                                                         int level) {
  require_forcing_pair(rule, a, b, level);
  auto [prefix, suffix] = forcing_prefix_suffix(rule, a, b, level);
  if (suffix > prefix) return std::nullopt;
  return std::pair{suffix, prefix};
}

CellSet minimize_forcing(const LocalRule& rule, CellSet cells, State a, State b, int level) {
  for (std::size_t i = 0; i < cells.size();) {
    CellSet without = cells;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
    if (is_forcing(rule, without, a, b, level)) {
      cells = std::move(without);
    } else {
      ++i;
    }
  }
  return cells;
}

std::optional<ShrinkingCertificate> shrinking_certificate(const LocalRule& rule, State a, State b,
                                                          int k_max) {
  for (int k = 1; k <= k_max; ++k) {
    require_forcing_pair(rule, a, b, k);
    auto [prefix, suffix] = forcing_prefix_suffix(rule, a, b, k);
    if (prefix >= suffix) continue;
    const std::int64_t reach = static_cast<std::int64_t>(k) * rule.radius();
    CellSet u, v;
    for (std::int64_t i = -reach; i <= prefix; ++i) u.push_back(i);
    for (std::int64_t i = suffix; i <= reach; ++i) v.push_back(i);
    return ShrinkingCertificate{k, minimize_forcing(rule, std::move(u), a, b, k),
                                minimize_forcing(rule, std::move(v), a, b, k)};
  }
  return std::nullopt;
}

bool check_certificate(const LocalRule& rule, State a, State b, const ShrinkingCertificate& cert) {
  if (cert.left.empty() || cert.right.empty()) return false;
  if (!(cert.left.back() < cert.right.front())) return false;
  return is_forcing(rule, cert.left, a, b, cert.level) &&
         is_forcing(rule, cert.right, a, b, cert.level);
}

CellSet sum_forcing(const CellSet& u, const CellSet& v) {
  CellSet out;
  for (std::int64_t x : u) {
    for (std::int64_t y : v) out.push_back(x + y);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace mca
