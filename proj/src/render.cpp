#include "mca/render.hpp"

#include <sstream>

namespace mca {

std::string render_pgm(const std::vector<std::vector<State>>& rows, int max_state,
                       const std::set<std::pair<std::size_t, std::size_t>>& marks) {
  const std::size_t width = rows.empty() ? 0 : rows.front().size();
  const int m = max_state < 1 ? 1 : max_state;
  std::ostringstream out;
  out << "P2\n" << width << ' ' << rows.size() << "\n255\n";
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t x = 0; x < width; ++x) {
      const int value = marks.count({x, t}) ? 255 : 255 * static_cast<int>(rows[t][x]) / m;
      if (x) out << ' ';
      out << value;
    }
    out << '\n';
  }
  return out.str();
}

std::set<std::pair<std::size_t, std::size_t>> overlay_marks(const PolygonSystem& system,
                                                            const NoisyTrajectory& trajectory) {
  std::set<std::pair<std::size_t, std::size_t>> marks;
  for (const auto& p : system.polygons) {
    for (const Cell& c : p.border) {
      const std::int64_t t = c.t * system.power;
      if (!trajectory.contains(c.i, static_cast<int>(t))) continue;
      marks.insert({static_cast<std::size_t>(c.i - trajectory.lo), static_cast<std::size_t>(t)});
    }
  }
  return marks;
}

NoisyTrajectory run_deterministic(const LocalRule& rule, const SimConfig& config,
                                  const Configuration& initial) {
  NoiseModel none;
  none.kind = NoiseKind::kIndependentMax;
  none.epsilon = 0.0;
  return run_noisy(rule, none, config, initial);
}

}  // namespace mca
