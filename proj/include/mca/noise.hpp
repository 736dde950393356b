#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mca/rule.hpp"

namespace mca {

// Counter-based randomness -----------------------------------------------------

// The splitmix64 output finalizer.
constexpr std::uint64_t splitmix_finalize(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// prf = fin(seed ^ fin(trial) ^ fin(t * 2654435769 + i)), all mod 2^64.
constexpr std::uint64_t prf(std::uint64_t seed, std::uint64_t trial, std::int64_t t,
                            std::int64_t i) {
  const std::uint64_t cell =
      static_cast<std::uint64_t>(t) * 2654435769ULL + static_cast<std::uint64_t>(i);
  return splitmix_finalize(seed ^ splitmix_finalize(trial) ^ splitmix_finalize(cell));
}

// Stream used for the replacement state of custom noise.
inline constexpr std::uint64_t kReplacementStream = 0x9E3779B97F4A7C15ULL;

// floor(eps * 2^64); eps >= 1 yields nullopt, meaning every cell is hit.
std::optional<std::uint64_t> error_threshold(double epsilon);

// Noise models -----------------------------------------------------------------

enum class NoiseKind { kIndependentMax, kIndependentSet, kCustom };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kIndependentMax;
  double epsilon = 0.0;
  State target = 0;
  std::vector<double> distribution;  // custom: replacement law over {0..m}

  // "max:<a>", "set:<a>" or "custom:<p0>,<p1>,...".
  static NoiseModel parse(std::string_view text, double epsilon);
  std::string describe() const;
  void validate(const LocalRule& rule) const;
};

enum class BoundaryKind { kPeriodic, kFixed };

struct SimConfig {
  int width = 256;
  BoundaryKind boundary = BoundaryKind::kPeriodic;
  State boundary_state = 0;  // fixed boundaries only
  int horizon = 100;
  std::uint64_t seed = 1;
  int trials = 1;
  int workers = 1;
  std::optional<std::int64_t> lo;  // leftmost coordinate; default -width/2

  std::int64_t first() const { return lo.value_or(-static_cast<std::int64_t>(width / 2)); }
  void validate(const LocalRule& rule) const;
};

// A recorded space-time grid. Row t holds times t = 0..T over coordinates
// lo .. lo+W-1. sampled[t-1] marks the PRF hits when producing row t; errors[t-1]
// marks cells of row t that differ from the noiseless image of row t-1.
struct NoisyTrajectory {
  std::int64_t lo = 0;
  int width = 0;
  int horizon = 0;
  int state_count = 2;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::vector<std::vector<State>> rows;
  std::vector<std::vector<char>> sampled;
  std::vector<std::vector<char>> errors;

  bool contains(std::int64_t i, int t) const {
    return t >= 0 && t <= horizon && i >= lo && i < lo + width;
  }
  State at(std::int64_t i, int t) const { return rows[t][static_cast<std::size_t>(i - lo)]; }
  bool error(std::int64_t i, int t) const {
    return t >= 1 && errors[t - 1][static_cast<std::size_t>(i - lo)] != 0;
  }
};

NoisyTrajectory run_noisy(const LocalRule& rule, const NoiseModel& model, const SimConfig& config,
                          const Configuration& initial, std::uint64_t trial = 0);

// One noiseless step of row `row` under the configured boundary.
std::vector<State> noiseless_step(const LocalRule& rule, const SimConfig& config,
                                  const std::vector<State>& row);

std::string format_trajectory(const NoisyTrajectory& trajectory);
NoisyTrajectory parse_trajectory(std::string_view text);

// Experiments -----------------------------------------------------------------

struct Estimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t samples = 0;
};

Estimate wilson_interval(std::uint64_t hits, std::uint64_t n, double z = 1.959963984540054);

// Per-time frequency of state 0 at the origin, starting from all 0.
std::vector<Estimate> density_zero(const LocalRule& rule, const NoiseModel& model,
                                   const SimConfig& config);

// Fraction of nonzero cells over times [from, T] and all columns, starting
// from all 0. The interval comes from the spread of per-trial means.
Estimate tail_density_nonzero(const LocalRule& rule, const NoiseModel& model,
                              const SimConfig& config, int from);

struct SurvivalRow {
  int n = 0;
  Estimate survival;          // tracked cell holds omega at every t <= T
  Estimate holds_at_horizon;  // tracked cell holds omega at t = T
};

// Starts from 0^inf omega^N . omega^N 0^inf and counts the trials in which
// the cell floor(t * (L_{0,w} + R_{w,0}) / 2) holds omega for all t <= T.
// The width is sized automatically; config.width and config.lo are ignored.
std::vector<SurvivalRow> island_survival(const LocalRule& rule, State omega,
                                         const std::vector<int>& sizes, const NoiseModel& model,
                                         const SimConfig& config);

// Total-variation distance between the origin marginals of runs started from
// all 0 and from all m, with independent error sets.
std::vector<double> ergodicity_probe(const LocalRule& rule, const NoiseModel& model,
                                     const SimConfig& config);

}  // namespace mca
