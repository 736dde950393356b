#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mca/noise.hpp"
#include "mca/polygon.hpp"

namespace mca {

// Plain PGM ("P2"): one image row per time step, time 0 at the top, pixel
// floor(255 * state / m). Marked (column, row) pixels are drawn at 255.
std::string render_pgm(const std::vector<std::vector<State>>& rows, int max_state,
                       const std::set<std::pair<std::size_t, std::size_t>>& marks = {});

// Border cells of a polygon system as (column, row) pixels of a trajectory
// image; power-time rows are scaled back to steps of the rule.
std::set<std::pair<std::size_t, std::size_t>> overlay_marks(const PolygonSystem& system,
                                                            const NoisyTrajectory& trajectory);

// A noiseless run recorded in trajectory form (no errors).
NoisyTrajectory run_deterministic(const LocalRule& rule, const SimConfig& config,
                                  const Configuration& initial);

}  // namespace mca
