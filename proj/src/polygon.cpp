#include "mca/polygon.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mca {

const char* to_string(Direction d) {
  switch (d) {
    case Direction::kLeft:
      return "left";
    case Direction::kRight:
      return "right";
    case Direction::kCenter:
      return "center";
    case Direction::kBack:
      return "back";
    case Direction::kNone:
      break;
  }
  return "none";
}

int LevelData::level_of(State s) const {
  for (int n = 1; n <= count(); ++n) {
    if (level(n).low < s && s <= level(n).high) return n;
  }
  return 0;
}

Direction LevelData::classify(int n, std::int64_t di, std::int64_t dt) const {
  const Level& lv = level(n);
  const std::int64_t r = radius;
  if (dt == -1 && -r <= di && di <= lv.u) return Direction::kLeft;
  if (dt == 1 && -r <= di && di <= -lv.v) return Direction::kRight;
  if (dt == 0 && 0 < di && di <= 2 * r) return Direction::kCenter;
  if (dt == 0 && -2 * r <= di && di < 0) return Direction::kBack;
  return Direction::kNone;
}

std::vector<Cell> LevelData::moves(int n, Direction d) const {
  const Level& lv = level(n);
  const std::int64_t r = radius;
  std::vector<Cell> out;
  switch (d) {
    case Direction::kLeft:
      for (std::int64_t i = -r; i <= lv.u; ++i) out.push_back({i, -1});
      break;
    case Direction::kRight:
      for (std::int64_t i = -r; i <= -lv.v; ++i) out.push_back({i, 1});
      break;
    case Direction::kCenter:
      for (std::int64_t i = 1; i <= 2 * r; ++i) out.push_back({i, 0});
      break;
    case Direction::kBack:
      for (std::int64_t i = -2 * r; i <= -1; ++i) out.push_back({i, 0});
      break;
    case Direction::kNone:
      break;
  }
  return out;
}

namespace {

// Level-1 forcing set of the p-th power from a level-k set of the rule:
// the (p/k)-fold sum, then pruned.
CellSet lift(const LocalRule& rule, const CellSet& set, State a, State b, int k, int power) {
  CellSet acc = set;
  for (int q = 1; q < power / k; ++q) acc = sum_forcing(acc, set);
  return minimize_forcing(rule, std::move(acc), a, b, power);
}

}  // namespace

LevelData build_level_data(const LocalRule& rule, const std::vector<State>& chain, int k_max) {
  if (chain.size() < 2 || chain.front() != 0 || chain.back() != rule.max_state()) {
    throw RuleError("a chain runs from 0 to m");
  }
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    if (!(chain[k] < chain[k + 1])) throw RuleError("chain states must increase");
  }
  std::vector<ShrinkingCertificate> certs;
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    auto cert = shrinking_certificate(rule, chain[k], chain[k + 1], k_max);
    if (!cert) {
      throw RuleError("no shrinking certificate for " + std::to_string(chain[k]) + "," +
                      std::to_string(chain[k + 1]) + " up to level " + std::to_string(k_max));
    }
    certs.push_back(*cert);
  }

  LevelData data{rule, chain, 1, 0, {}};
  for (const auto& c : certs) data.power = std::lcm(data.power, c.level);
  data.radius = data.power * rule.radius();

  const int count = static_cast<int>(certs.size());
  data.levels.resize(certs.size());
  for (int n = 1; n <= count; ++n) {
    Level& lv = data.levels[static_cast<std::size_t>(n - 1)];
    const ShrinkingCertificate& cert = certs[static_cast<std::size_t>(n - 1)];
    lv.low = chain[static_cast<std::size_t>(n - 1)];
    lv.high = chain[static_cast<std::size_t>(n)];
    lv.u_set = lift(rule, cert.left, lv.low, lv.high, cert.level, data.power);
    lv.v_set = lift(rule, cert.right, lv.low, lv.high, cert.level, data.power);
    lv.u = lv.u_set.back();
    lv.v = lv.v_set.front();
    if (!(lv.u < lv.v)) throw std::logic_error("lifted forcing sets overlap");

    // M(i, t) = i + t (u + v) / 2 is positive on centre moves and negative on
    // the other three sets.
    const Rational slope = Rational(lv.u + lv.v, 2);
    std::optional<Rational> best;
    for (Direction d : {Direction::kLeft, Direction::kRight, Direction::kCenter, Direction::kBack}) {
      for (const Cell& m : data.moves(n, d)) {
        const Rational value = Rational(m.i) + Rational(m.t) * slope;
        if ((d == Direction::kCenter) != (value > 0) || value == 0) {
          throw std::logic_error("move set has the wrong sign");
        }
        const Rational mag = value > 0 ? value : -value;
        const Rational tight = min(mag, Rational(1) / mag);
        best = best ? min(*best, tight) : tight;
      }
    }
    lv.delta_star = *best;
    lv.delta = Rational(1) / (Rational(2) + Rational(2) / (lv.delta_star * lv.delta_star));
  }
  // k below is the chain length, one more than the number of levels
  const std::int64_t k = static_cast<std::int64_t>(chain.size());
  Rational beta = 1;
  for (int n = count; n >= 1; --n) {
    Level& lv = data.levels[static_cast<std::size_t>(n - 1)];
    beta = lv.delta * beta / Rational(2 * data.radius * k + 2);
    lv.beta = beta;
  }
  return data;
}

NoisyTrajectory power_trajectory(const LocalRule& rule, const NoisyTrajectory& trajectory,
                                 int power, const SimConfig& config) {
  if (power < 1) throw std::invalid_argument("power must be positive");
  if (power == 1) return trajectory;
  NoisyTrajectory out = trajectory;
  out.horizon = trajectory.horizon / power;
  out.rows.clear();
  out.sampled.clear();
  out.errors.clear();
  for (int s = 0; s <= out.horizon; ++s) out.rows.push_back(trajectory.rows[static_cast<std::size_t>(s * power)]);
  for (int s = 1; s <= out.horizon; ++s) {
    std::vector<State> image = out.rows[static_cast<std::size_t>(s - 1)];
    for (int k = 0; k < power; ++k) image = noiseless_step(rule, config, image);
    std::vector<char> err(image.size());
    for (std::size_t x = 0; x < image.size(); ++x) err[x] = out.rows[static_cast<std::size_t>(s)][x] != image[x];
    out.sampled.push_back(err);
    out.errors.push_back(std::move(err));
  }
  return out;
}

namespace {

// Read-only view of the (power) trajectory shared by construction and checks.
struct Field {
  const LevelData& data;
  const NoisyTrajectory& traj;
  Cell root;
  std::int64_t r;

  bool in_w(const Cell& c) const {
    if (c.t < 0 || c.t > root.t) return false;
    const std::int64_t di = c.i > root.i ? c.i - root.i : root.i - c.i;
    return di <= r * (root.t - c.t) && traj.contains(c.i, static_cast<int>(c.t));
  }
  int level(const Cell& c) const {
    if (!traj.contains(c.i, static_cast<int>(c.t))) return 0;
    return data.level_of(traj.at(c.i, static_cast<int>(c.t)));
  }
  bool error(const Cell& c) const {
    return traj.contains(c.i, static_cast<int>(c.t)) && traj.error(c.i, static_cast<int>(c.t));
  }

  // Highest level first, then nearest, then the left one.
  std::optional<std::pair<Cell, int>> support(const Cell& w, int n) const {
    for (int level_hi = data.count(); level_hi > n; --level_hi) {
      const std::int64_t reach = level_hi * r;
      for (std::int64_t d = 0; d <= reach; ++d) {
        for (std::int64_t j : {-d, d}) {
          const Cell c{w.i + j, w.t - 1};
          if (in_w(c) && level(c) == level_hi) return std::pair{c, level_hi};
          if (d == 0) break;
        }
      }
    }
    return std::nullopt;
  }

  std::optional<std::pair<Cell, Cell>> triangle(const Cycle& region, const Cell& w, int n) const {
    const Level& lv = data.level(n);
    for (auto j = lv.u_set.rbegin(); j != lv.u_set.rend(); ++j) {
      for (std::int64_t k : lv.v_set) {
        const Cell left{w.i + *j, w.t - 1}, right{w.i + k, w.t - 1};
        if (triangle_in_region(region, w, left, right)) return std::pair{left, right};
      }
    }
    return std::nullopt;
  }

  PolygonVertex classify(const Cycle& region, const Cell& w, int n) const {
    PolygonVertex v;
    v.at = w;
    if (auto s = support(w, n)) {
      v.support = s->first;
      v.support_level = s->second;
    }
    if (error(w)) {
      v.type = 2;
    } else if (v.support) {
      v.type = 1;
    } else if (auto tri = triangle(region, w, n)) {
      v.type = 3;
      v.parents = tri;
    }
    return v;
  }
};

struct Draft {
  Cycle border;
  std::vector<Cycle> primitives;
};

void check_moves(const LevelData& data, int n, const Cycle& border) {
  if (border.size() < 2) return;
  for (std::size_t k = 0; k < border.size(); ++k) {
    const Cell& a = border[k];
    const Cell& b = border[(k + 1) % border.size()];
    if (data.classify(n, b.i - a.i, b.t - a.t) == Direction::kNone) {
      throw std::logic_error("merged border has a step (" + std::to_string(b.i - a.i) + "," +
                             std::to_string(b.t - a.t) + ") outside the move sets");
    }
  }
}

bool covers(const Cycle& outer, const Cycle& inner) {
  if (inner.size() == 1) return in_region(outer, Point(inner[0]));
  for (std::size_t k = 0; k < inner.size(); ++k) {
    if (!segment_in_region(outer, inner[k], inner[(k + 1) % inner.size()])) return false;
  }
  return true;
}

// Builds Q(C) at level n by resolving violations until none is left.
std::vector<Draft> build_level(const Field& field, int n, const std::vector<Cell>& seeds,
                               std::size_t& steps, std::size_t max_steps) {
  std::vector<Draft> q;
  for (const Cell& c : seeds) q.push_back({{c}, {{c}}});
  const std::int64_t r = field.r;
  auto tick = [&] {
    if (++steps > max_steps) throw std::runtime_error("polygon construction exceeded its step cap");
  };

  for (;;) {
    // violation 3: merge the first intersecting pair
    bool merged = false;
    for (std::size_t a = 0; a < q.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < q.size() && !merged; ++b) {
        if (!regions_intersect(q[a].border, q[b].border)) continue;
        Cycle joined = outer_border({q[a].border, q[b].border});
        check_moves(field.data, n, joined);
        if (!covers(joined, q[a].border) || !covers(joined, q[b].border)) {
          throw std::logic_error("merged polygon does not contain its parts");
        }
        q[a].border = std::move(joined);
        q[a].primitives.insert(q[a].primitives.end(), q[b].primitives.begin(),
                               q[b].primitives.end());
        q.erase(q.begin() + static_cast<std::ptrdiff_t>(b));
        merged = true;
        tick();
      }
    }
    if (merged) continue;

    // violation 2: close same-row pairs within 2r
    std::vector<Cycle> added;
    for (const Draft& d : q) {
      std::set<Cell> cells(d.border.begin(), d.border.end());
      for (const Cell& v : cells) {
        for (const Cell& w : cells) {
          if (w.t != v.t || !(0 < v.i - w.i && v.i - w.i <= 2 * r)) continue;
          if (segment_in_region(d.border, v, w)) continue;
          added.push_back({v, w});
        }
      }
    }
    if (!added.empty()) {
      for (Cycle& seg : added) {
        q.push_back({seg, {seg}});
        tick();
      }
      continue;
    }

    // violation 1: untyped vertices get their triangle
    for (const Draft& d : q) {
      std::set<Cell> cells(d.border.begin(), d.border.end());
      for (const Cell& w : cells) {
        if (field.classify(d.border, w, n).type != 0) continue;
        const Level& lv = field.data.level(n);
        std::optional<std::int64_t> jl, jr;
        for (std::int64_t j : lv.u_set) {
          if (field.level({w.i + j, w.t - 1}) == n) jl = j;
        }
        for (auto j = lv.v_set.rbegin(); j != lv.v_set.rend(); ++j) {
          if (field.level({w.i + *j, w.t - 1}) == n) jr = *j;
        }
        if (!jl || !jr) {
          throw std::runtime_error("vertex (" + std::to_string(w.i) + "," + std::to_string(w.t) +
                                   ") has no type and no forcing witness");
        }
        added.push_back({w, {w.i + *jl, w.t - 1}, {w.i + *jr, w.t - 1}});
      }
    }
    if (added.empty()) break;
    for (Cycle& tri : added) {
      q.push_back({tri, {tri}});
      tick();
    }
  }
  return q;
}

}  // namespace

PolygonSystem construct_system(const LevelData& data, const NoisyTrajectory& trajectory,
                               const SimConfig& config, const ConstructParams& params) {
  const NoisyTrajectory traj = power_trajectory(data.rule, trajectory, data.power, config);
  PolygonSystem sys;
  sys.power = data.power;
  sys.radius = data.radius;
  sys.horizon = traj.horizon;
  sys.root = params.target.value_or(Cell{0, traj.horizon});
  Field field{data, traj, sys.root, data.radius};
  if (!traj.contains(sys.root.i, static_cast<int>(sys.root.t))) {
    throw std::invalid_argument("target lies outside the trajectory");
  }
  sys.root_level = field.level(sys.root);
  if (sys.root_level == 0) throw std::invalid_argument("target cell holds state 0");

  sys.support_sets[sys.root_level] = {sys.root};
  int next_id = 0;
  for (int n = sys.root_level; n <= data.count(); ++n) {
    auto found = sys.support_sets.find(n);
    if (found == sys.support_sets.end() || found->second.empty()) continue;
    std::vector<Cell>& seeds = found->second;
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

    for (Draft& d : build_level(field, n, seeds, sys.stats.steps, params.max_steps)) {
      SpaceTimePolygon poly;
      poly.level = n;
      poly.id = next_id++;
      poly.border = std::move(d.border);
      poly.primitives = std::move(d.primitives);
      for (const Cell& w : poly.border) {
        PolygonVertex v = field.classify(poly.border, w, n);
        if (v.type == 0) throw std::logic_error("construction left an untyped vertex");
        if (v.support) sys.support_sets[v.support_level].push_back(*v.support);
        poly.vertices.push_back(v);
      }
      sys.polygons.push_back(std::move(poly));
    }
  }

  std::set<Cell> distinct;
  for (const auto& p : sys.polygons) {
    sys.stats.vertices += p.vertices.size();
    for (const auto& v : p.vertices) {
      ++sys.stats.type_counts[v.type];
      distinct.insert(v.at);
    }
  }
  sys.stats.distinct = distinct.size();
  return sys;
}

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

std::string cell_str(const Cell& c) {
  return "(" + std::to_string(c.i) + "," + std::to_string(c.t) + ")";
}

class Checks {
 public:
  explicit Checks(std::vector<CheckResult>& out) : out_(out) {}
  CheckResult& get(const std::string& name) {
    for (auto& c : out_) {
      if (c.name == name) return c;
    }
    out_.push_back({name, true, ""});
    return out_.back();
  }
  void pass(const std::string& name) { get(name); }
  void fail(const std::string& name, const std::string& detail) {
    CheckResult& c = get(name);
    if (c.passed) c.detail = detail;
    c.passed = false;
  }

 private:
  std::vector<CheckResult>& out_;
};

bool same_cyclic(const Cycle& a, const Cycle& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  for (std::size_t s = 0; s < b.size(); ++s) {
    bool all = true;
    for (std::size_t k = 0; k < a.size() && all; ++k) all = a[k] == b[(s + k) % b.size()];
    if (all) return true;
  }
  return false;
}

}  // namespace

VerifyReport verify_system(const PolygonSystem& system, const NoisyTrajectory& trajectory,
                           const SimConfig& config, const LevelData& data) {
  const NoisyTrajectory traj = power_trajectory(data.rule, trajectory, data.power, config);
  Field field{data, traj, system.root, data.radius};
  const std::int64_t r = data.radius;
  VerifyReport report;
  Checks checks(report.checks);
  for (const char* name :
       {"root", "nonempty", "simple_ccw", "within_w", "edge_moves", "row_segments", "vertex_states",
        "vertex_types", "type2_on_errors", "border_size", "level_disjoint", "vertex_separation",
        "border_disjoint", "not_inside", "covers_support_sets", "top_vertices_supported",
        "close_to_border", "linear_bound", "encode_roundtrip"}) {
    checks.pass(name);
  }

  if (!traj.contains(system.root.i, static_cast<int>(system.root.t)) ||
      field.level(system.root) != system.root_level || system.root_level == 0) {
    checks.fail("root", "root " + cell_str(system.root) + " is not in its level band");
  }

  for (const SpaceTimePolygon& p : system.polygons) {
    const int n = p.level;
    const std::string tag = "polygon " + std::to_string(p.id);
    if (p.border.empty() || p.vertices.size() != p.border.size()) {
      checks.fail("nonempty", tag);
      continue;
    }
    if (p.border.size() >= 2) {
      std::set<Cell> unique(p.border.begin(), p.border.end());
      const bool simple = unique.size() >= 2 && same_cyclic(outer_border({p.border}), p.border);
      if (!simple || signed_area2(p.border) < 0) checks.fail("simple_ccw", tag);
    }
    std::size_t good = 0;
    for (std::size_t k = 0; k < p.border.size(); ++k) {
      const Cell& w = p.border[k];
      const PolygonVertex& v = p.vertices[k];
      if (!field.in_w(w)) checks.fail("within_w", tag + " " + cell_str(w));
      if (p.border.size() >= 2) {
        const Cell& nx = p.border[(k + 1) % p.border.size()];
        if (data.classify(n, nx.i - w.i, nx.t - w.t) == Direction::kNone) {
          checks.fail("edge_moves", tag + " " + cell_str(w) + "->" + cell_str(nx));
        }
      }
      if (field.level(w) != n) checks.fail("vertex_states", tag + " " + cell_str(w));

      // recompute the claimed type from scratch
      const auto best = field.support(w, n);
      const bool cond2 = field.error(w);
      bool valid = v.at == w;
      switch (v.type) {
        case 2:
          valid = valid && cond2;
          if (!cond2) checks.fail("type2_on_errors", tag + " " + cell_str(w));
          break;
        case 1:
          valid = valid && v.support && best && field.in_w(*v.support) &&
                  v.support->t == w.t - 1 && field.level(*v.support) == v.support_level &&
                  v.support_level == best->second &&
                  std::abs(v.support->i - w.i) <= v.support_level * r;
          break;
        case 3: {
          bool ok = v.parents.has_value();
          if (ok) {
            const auto& [left, right] = *v.parents;
            const Level& lv = data.level(n);
            ok = left.t == w.t - 1 && right.t == w.t - 1 &&
                 std::binary_search(lv.u_set.begin(), lv.u_set.end(), left.i - w.i) &&
                 std::binary_search(lv.v_set.begin(), lv.v_set.end(), right.i - w.i) &&
                 triangle_in_region(p.border, w, left, right);
          }
          valid = valid && ok;
          break;
        }
        default:
          valid = false;
      }
      if (!valid) checks.fail("vertex_types", tag + " " + cell_str(w) + " type " + std::to_string(v.type));
      if (cond2 || best) ++good;
    }
    // condition (d)
    std::set<Cell> cells(p.border.begin(), p.border.end());
    for (const Cell& a : cells) {
      for (const Cell& b : cells) {
        if (a.t == b.t && 0 < a.i - b.i && a.i - b.i <= 2 * r && !segment_in_region(p.border, a, b)) {
          checks.fail("row_segments", tag + " " + cell_str(a) + "-" + cell_str(b));
        }
      }
    }
    const double frac = static_cast<double>(good) / static_cast<double>(p.border.size());
    report.type12_fraction_min = std::min(report.type12_fraction_min, frac);
    if (Rational(static_cast<std::int64_t>(good)) <
        data.level(n).delta * Rational(static_cast<std::int64_t>(p.border.size()))) {
      checks.fail("border_size", tag + " has " + std::to_string(good) + " of " +
                                     std::to_string(p.border.size()));
    }
  }

  // pairs of polygons
  for (std::size_t a = 0; a < system.polygons.size(); ++a) {
    for (std::size_t b = a + 1; b < system.polygons.size(); ++b) {
      const SpaceTimePolygon* hi = &system.polygons[a];
      const SpaceTimePolygon* lo = &system.polygons[b];
      if (hi->level == lo->level) {
        if (regions_intersect(hi->border, lo->border)) {
          checks.fail("level_disjoint", std::to_string(hi->id) + "," + std::to_string(lo->id));
        }
        continue;
      }
      if (hi->level < lo->level) std::swap(hi, lo);
      const std::string tag = std::to_string(hi->id) + "/" + std::to_string(lo->id);
      for (const Cell& w : hi->border) {
        for (const Cell& x : lo->border) {
          if (w.t == x.t && std::abs(w.i - x.i) <= r) checks.fail("vertex_separation", tag);
        }
      }
      if (borders_meet(hi->border, lo->border)) checks.fail("border_disjoint", tag);
      for (const Cell& x : lo->border) {
        if (in_region(hi->border, x)) checks.fail("not_inside", tag + " " + cell_str(x));
      }
    }
  }

  // support sets
  for (const auto& [n, cells] : system.support_sets) {
    for (const Cell& c : cells) {
      const SpaceTimePolygon* home = nullptr;
      for (const auto& p : system.polygons) {
        if (p.level == n && in_region(p.border, c)) home = &p;
      }
      if (!home) {
        checks.fail("covers_support_sets", "level " + std::to_string(n) + " " + cell_str(c));
        continue;
      }
      bool near = false;
      for (const Cell& w : home->border) {
        near = near || (std::abs(w.i - c.i) <= n * r && std::abs(w.t - c.t) <= 1);
      }
      if (!near) checks.fail("close_to_border", cell_str(c));
    }
  }
  for (const auto& p : system.polygons) {
    std::int64_t top = p.border.front().t;
    for (const Cell& w : p.border) top = std::max(top, w.t);
    const auto it = system.support_sets.find(p.level);
    for (const Cell& w : p.border) {
      if (w.t != top) continue;
      if (it == system.support_sets.end() ||
          std::find(it->second.begin(), it->second.end(), w) == it->second.end()) {
        checks.fail("top_vertices_supported", "polygon " + std::to_string(p.id) + " " + cell_str(w));
      }
    }
  }

  // global share of type 2 over distinct border cells
  std::set<Cell> all, errors;
  for (const auto& p : system.polygons) {
    for (const Cell& w : p.border) {
      all.insert(w);
      if (field.error(w)) errors.insert(w);
    }
  }
  if (!all.empty()) {
    report.type2_fraction = static_cast<double>(errors.size()) / static_cast<double>(all.size());
    const Rational beta = data.level(system.root_level).beta;
    if (Rational(static_cast<std::int64_t>(errors.size())) <
        beta * Rational(static_cast<std::int64_t>(all.size()))) {
      checks.fail("linear_bound", std::to_string(errors.size()) + " of " + std::to_string(all.size()));
    }
  }

  try {
    const Walk walk = encode_system(system);
    const auto [di, dt] = walk_steps(walk);
    const std::int64_t k = static_cast<std::int64_t>(data.chain.size());
    if (decode_system(walk) != border_cells(system)) {
      checks.fail("encode_roundtrip", "decoded cells differ");
    } else if (walk.cells.size() > static_cast<std::size_t>(2 * k * r) * all.size()) {
      checks.fail("encode_roundtrip", "walk length " + std::to_string(walk.cells.size()));
    } else if (di > k * r || dt > 1) {
      checks.fail("encode_roundtrip", "walk step too long");
    }
  } catch (const std::exception& e) {
    checks.fail("encode_roundtrip", e.what());
  }
  return report;
}

Walk encode_system(const PolygonSystem& system) {
  Walk walk;
  if (system.polygons.empty()) return walk;
  std::map<Cell, const PolygonVertex*> info;
  std::map<Cell, int> level;
  for (const auto& p : system.polygons) {
    for (const auto& v : p.vertices) {
      info.emplace(v.at, &v);
      level.emplace(v.at, p.level);
    }
  }
  auto rotated = [](const Cycle& c, const Cell& start) {
    const auto at = std::find(c.begin(), c.end(), start);
    Cycle out(at, c.end());
    out.insert(out.end(), c.begin(), at);
    return out;
  };
  // the base: highest cell of the border that is a support point, leftmost on ties
  auto base_of = [&](const SpaceTimePolygon& p) -> std::optional<Cell> {
    const auto it = system.support_sets.find(p.level);
    if (it == system.support_sets.end()) return std::nullopt;
    std::optional<Cell> best;
    for (const Cell& w : p.border) {
      if (std::find(it->second.begin(), it->second.end(), w) == it->second.end()) continue;
      if (!best || w.t > best->t || (w.t == best->t && w.i < best->i)) best = w;
    }
    return best;
  };

  std::vector<char> done(system.polygons.size(), 0);
  for (std::size_t k = 0; k < system.polygons.size(); ++k) {
    const auto& p = system.polygons[k];
    if (p.level == system.root_level &&
        std::find(p.border.begin(), p.border.end(), system.root) != p.border.end()) {
      walk.cells = rotated(p.border, system.root);
      done[k] = 1;
      break;
    }
  }
  if (walk.cells.empty()) throw std::logic_error("root is not a border vertex");

  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t k = 0; k < system.polygons.size(); ++k) {
      if (done[k]) continue;
      const auto& p = system.polygons[k];
      const auto base = base_of(p);
      if (!base) continue;
      // first walk entry whose support is the base
      for (std::size_t pos = 0; pos < walk.cells.size(); ++pos) {
        const PolygonVertex* v = info.at(walk.cells[pos]);
        if (!v->support || *v->support != *base || v->support_level != p.level) continue;
        Cycle detour{walk.cells[pos]};
        for (const Cell& c : rotated(p.border, *base)) detour.push_back(c);
        detour.push_back(*base);
        detour.push_back(walk.cells[pos]);
        walk.cells.erase(walk.cells.begin() + static_cast<std::ptrdiff_t>(pos));
        walk.cells.insert(walk.cells.begin() + static_cast<std::ptrdiff_t>(pos), detour.begin(),
                          detour.end());
        done[k] = 1;
        progress = true;
        break;
      }
    }
  }
  if (std::find(done.begin(), done.end(), 0) != done.end()) {
    throw std::logic_error("some polygon has no base reachable from the root");
  }
  for (const Cell& c : walk.cells) walk.levels.push_back(level.at(c));
  return walk;
}

std::map<int, std::set<Cell>> decode_system(const Walk& walk) {
  if (walk.cells.size() != walk.levels.size()) throw std::invalid_argument("malformed walk");
  std::map<int, std::set<Cell>> out;
  for (std::size_t k = 0; k < walk.cells.size(); ++k) {
    if (walk.levels[k] < 1) throw std::invalid_argument("malformed walk level");
    out[walk.levels[k]].insert(walk.cells[k]);
  }
  return out;
}

std::map<int, std::set<Cell>> border_cells(const PolygonSystem& system) {
  std::map<int, std::set<Cell>> out;
  for (const auto& p : system.polygons) out[p.level].insert(p.border.begin(), p.border.end());
  return out;
}

std::pair<std::int64_t, std::int64_t> walk_steps(const Walk& walk) {
  std::int64_t di = 0, dt = 0;
  const auto& c = walk.cells;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Cell& a = c[k];
    const Cell& b = c[(k + 1) % c.size()];
    di = std::max(di, std::abs(b.i - a.i));
    dt = std::max(dt, std::abs(b.t - a.t));
  }
  return {di, dt};
}

std::string format_system(const PolygonSystem& system) {
  std::ostringstream out;
  out << "ca-polygons v1\n";
  out << "root " << system.root.i << ' ' << system.root.t << ' ' << system.root_level << '\n';
  out << "horizon " << system.horizon << '\n';
  out << "power " << system.power << '\n';
  out << "radius " << system.radius << '\n';
  for (const auto& [n, cells] : system.support_sets) {
    for (const Cell& c : cells) out << "support " << n << ' ' << c.i << ' ' << c.t << '\n';
  }
  for (const auto& p : system.polygons) {
    out << "polygon " << p.level << ' ' << p.id << '\n';
    for (const auto& v : p.vertices) {
      out << "v " << v.at.i << ' ' << v.at.t << ' ' << v.type;
      if (v.support) out << " s " << v.support->i << ' ' << v.support->t << ' ' << v.support_level;
      if (v.parents) {
        out << " c " << v.parents->first.i << ' ' << v.parents->first.t << ' '
            << v.parents->second.i << ' ' << v.parents->second.t;
      }
      out << '\n';
    }
    for (const Cycle& prim : p.primitives) {
      out << "p";
      for (const Cell& c : prim) out << ' ' << c.i << ' ' << c.t;
      out << '\n';
    }
    out << "end\n";
  }
  out << "stats " << system.stats.vertices << ' ' << system.stats.distinct << ' '
      << system.stats.type_counts[1] << ' ' << system.stats.type_counts[2] << ' '
      << system.stats.type_counts[3] << ' ' << system.stats.steps << '\n';
  return out.str();
}

PolygonSystem parse_system(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("polygon dump line " + std::to_string(line_no) + ": " + why);
  };
  PolygonSystem sys;
  SpaceTimePolygon* open = nullptr;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (!header) {
      std::string version;
      ls >> version;
      if (key != "ca-polygons" || version != "v1") fail("expected 'ca-polygons v1'");
      header = true;
      continue;
    }
    bool ok = true;
    if (key == "root") {
      ok = static_cast<bool>(ls >> sys.root.i >> sys.root.t >> sys.root_level);
    } else if (key == "horizon") {
      ok = static_cast<bool>(ls >> sys.horizon);
    } else if (key == "power") {
      ok = static_cast<bool>(ls >> sys.power);
    } else if (key == "radius") {
      ok = static_cast<bool>(ls >> sys.radius);
    } else if (key == "support") {
      int n;
      Cell c;
      ok = static_cast<bool>(ls >> n >> c.i >> c.t);
      if (ok) sys.support_sets[n].push_back(c);
    } else if (key == "polygon") {
      if (open) fail("polygon before 'end'");
      sys.polygons.emplace_back();
      open = &sys.polygons.back();
      ok = static_cast<bool>(ls >> open->level >> open->id);
    } else if (key == "v") {
      if (!open) fail("vertex outside a polygon");
      PolygonVertex v;
      ok = static_cast<bool>(ls >> v.at.i >> v.at.t >> v.type);
      std::string tag;
      while (ok && ls >> tag) {
        if (tag == "s") {
          Cell s;
          ok = static_cast<bool>(ls >> s.i >> s.t >> v.support_level);
          v.support = s;
        } else if (tag == "c") {
          Cell a, b;
          ok = static_cast<bool>(ls >> a.i >> a.t >> b.i >> b.t);
          v.parents = std::pair{a, b};
        } else {
          fail("unknown vertex tag '" + tag + "'");
        }
      }
      open->border.push_back(v.at);
      open->vertices.push_back(v);
    } else if (key == "p") {
      if (!open) fail("primitive outside a polygon");
      Cycle prim;
      Cell c;
      while (ls >> c.i >> c.t) prim.push_back(c);
      if (prim.empty() || prim.size() > 3) fail("primitives have 1 to 3 points");
      open->primitives.push_back(prim);
    } else if (key == "end") {
      if (!open) fail("'end' without polygon");
      open = nullptr;
    } else if (key == "stats") {
      auto& s = sys.stats;
      ok = static_cast<bool>(ls >> s.vertices >> s.distinct >> s.type_counts[1] >>
                             s.type_counts[2] >> s.type_counts[3] >> s.steps);
    } else {
      fail("unknown record '" + key + "'");
    }
    if (!ok) fail("malformed '" + key + "' record");
  }
  if (!header) fail("empty dump");
  if (open) fail("unterminated polygon");
  return sys;
}

}  // namespace mca
