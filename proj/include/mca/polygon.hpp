#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mca/forcing.hpp"
#include "mca/geometry.hpp"
#include "mca/noise.hpp"

namespace mca {

enum class Direction { kNone, kLeft, kRight, kCenter, kBack };
const char* to_string(Direction d);

// One level n of a stability chain: the band S_n = (low, high] and the
// forcing sets of the power rule at level 1.
struct Level {
  State low = 0;
  State high = 0;
  CellSet u_set;
  CellSet v_set;
  std::int64_t u = 0;  // max u_set
  std::int64_t v = 0;  // min v_set
  Rational delta_star;  // sup of d with d < M < 1/d on centre moves, -1/d < M < -d elsewhere
  Rational delta;       // (2 + 2 / delta_star^2)^-1
  Rational beta;
};

struct LevelData {
  LocalRule rule;             // the original rule
  std::vector<State> chain;   // 0 = a_1 < ... < a_k = m
  int power = 1;              // lcm of the certificate levels
  int radius = 0;             // radius of the power rule
  std::vector<Level> levels;  // levels[n-1] for n = 1..k-1

  int count() const { return static_cast<int>(levels.size()); }
  const Level& level(int n) const { return levels[static_cast<std::size_t>(n - 1)]; }
  // n with state in S_n, or 0 when state <= a_1.
  int level_of(State s) const;
  // Which of the four move sets contains (di, dt) at level n.
  Direction classify(int n, std::int64_t di, std::int64_t dt) const;
  std::vector<Cell> moves(int n, Direction d) const;
};

// Each chain edge needs a shrinking certificate up to k_max.
LevelData build_level_data(const LocalRule& rule, const std::vector<State>& chain, int k_max = 8);

// Subsamples every `power` steps and recomputes errors against the power rule.
NoisyTrajectory power_trajectory(const LocalRule& rule, const NoisyTrajectory& trajectory,
                                 int power, const SimConfig& config);

struct PolygonVertex {
  Cell at;
  int type = 0;                  // 1, 2 or 3; 0 while untyped
  std::optional<Cell> support;   // present whenever condition 1 holds
  int support_level = 0;
  std::optional<std::pair<Cell, Cell>> parents;  // type 3
};

struct SpaceTimePolygon {
  int level = 0;
  int id = 0;
  Cycle border;                       // X, counterclockwise
  std::vector<PolygonVertex> vertices;  // parallel to border
  std::vector<Cycle> primitives;      // dots, segments and triangles merged in
};

struct PolygonStats {
  std::size_t vertices = 0;  // |X| summed with repeats
  std::size_t distinct = 0;  // H, distinct border cells over all levels
  std::size_t type_counts[4] = {0, 0, 0, 0};
  std::size_t steps = 0;  // construction steps taken
};

struct PolygonSystem {
  Cell root;
  int root_level = 0;
  int horizon = 0;  // in steps of the power rule
  int power = 1;
  int radius = 0;
  std::map<int, std::vector<Cell>> support_sets;  // C_n
  std::vector<SpaceTimePolygon> polygons;
  PolygonStats stats;
};

struct ConstructParams {
  std::optional<Cell> target;  // defaults to (0, T) in power time
  std::size_t max_steps = 200000;
};

// Builds the leveled witness system for a nonzero target cell.
PolygonSystem construct_system(const LevelData& data, const NoisyTrajectory& trajectory,
                               const SimConfig& config, const ConstructParams& params = {});

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;  // first offending item
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  double type12_fraction_min = 1.0;  // worst per-polygon share of types 1 and 2
  double type2_fraction = 0.0;       // over distinct border cells
  bool ok() const;
};

VerifyReport verify_system(const PolygonSystem& system, const NoisyTrajectory& trajectory,
                           const SimConfig& config, const LevelData& data);

// The spliced vertex walk of the counting argument.
struct Walk {
  std::vector<Cell> cells;
  std::vector<int> levels;
};

Walk encode_system(const PolygonSystem& system);
// Border cells per level.
std::map<int, std::set<Cell>> decode_system(const Walk& walk);
std::map<int, std::set<Cell>> border_cells(const PolygonSystem& system);
// Largest |di| and |dt| between consecutive walk entries.
std::pair<std::int64_t, std::int64_t> walk_steps(const Walk& walk);

std::string format_system(const PolygonSystem& system);
PolygonSystem parse_system(std::string_view text);

}  // namespace mca
