#include "mca/noise.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "mca/parallel.hpp"
#include "mca/stepdyn.hpp"

namespace mca {

std::optional<std::uint64_t> error_threshold(double epsilon) {
  if (epsilon >= 1.0) return std::nullopt;
  if (epsilon <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ldexp(epsilon, 64));
}

NoiseModel NoiseModel::parse(std::string_view text, double epsilon) {
  NoiseModel model;
  model.epsilon = epsilon;
  const auto colon = text.find(':');
  const std::string kind(text.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? "" : std::string(text.substr(colon + 1));
  auto state_arg = [&]() -> State {
    try {
      std::size_t used = 0;
      const int v = std::stoi(arg, &used);
      if (used != arg.size() || v < 0 || v > 255) throw std::invalid_argument("range");
      return static_cast<State>(v);
    } catch (const std::logic_error&) {
      throw RuleError("noise '" + std::string(text) + "' needs a state argument");
    }
  };
  if (kind == "max") {
    model.kind = NoiseKind::kIndependentMax;
    model.target = state_arg();
  } else if (kind == "set") {
    model.kind = NoiseKind::kIndependentSet;
    model.target = state_arg();
  } else if (kind == "custom") {
    model.kind = NoiseKind::kCustom;
    std::stringstream in(arg);
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        model.distribution.push_back(std::stod(item));
      } catch (const std::logic_error&) {
        throw RuleError("bad probability '" + item + "' in noise '" + std::string(text) + "'");
      }
    }
    if (model.distribution.empty()) throw RuleError("custom noise needs a distribution");
  } else {
    throw RuleError("unknown noise kind '" + kind + "' (expected max, set or custom)");
  }
  return model;
}

std::string NoiseModel::describe() const {
  std::ostringstream out;
  switch (kind) {
    case NoiseKind::kIndependentMax:
      out << "max:" << int(target);
      break;
    case NoiseKind::kIndependentSet:
      out << "set:" << int(target);
      break;
    case NoiseKind::kCustom:
      out << "custom:";
      for (std::size_t i = 0; i < distribution.size(); ++i) out << (i ? "," : "") << distribution[i];
      break;
  }
  return out.str();
}

void NoiseModel::validate(const LocalRule& rule) const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw RuleError("epsilon must lie in [0,1]");
  if (kind == NoiseKind::kCustom) {
    if (distribution.size() != static_cast<std::size_t>(rule.state_count())) {
      throw RuleError("custom distribution needs one weight per state");
    }
    double total = 0.0;
    for (double p : distribution) {
      if (!(p >= 0.0)) throw RuleError("custom distribution has a negative weight");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw RuleError("custom distribution must sum to 1");
  } else if (target > rule.max_state()) {
    throw RuleError("noise target state out of range");
  }
}

void SimConfig::validate(const LocalRule& rule) const {
  if (width < rule.width()) throw RuleError("width must be at least 2r+1");
  if (horizon < 1) throw RuleError("horizon must be at least 1");
  if (trials < 1) throw RuleError("trials must be at least 1");
  if (boundary == BoundaryKind::kFixed && !is_quiescent(rule, boundary_state)) {
    throw RuleError("fixed boundary state must be quiescent");
  }
}

std::vector<State> noiseless_step(const LocalRule& rule, const SimConfig& config,
                                  const std::vector<State>& row) {
  const std::size_t r = static_cast<std::size_t>(rule.radius());
  std::vector<State> padded;
  padded.reserve(row.size() + 2 * r);
  if (config.boundary == BoundaryKind::kPeriodic) {
    for (std::size_t k = 0; k < r; ++k) padded.push_back(row[(row.size() - r + k) % row.size()]);
    padded.insert(padded.end(), row.begin(), row.end());
    for (std::size_t k = 0; k < r; ++k) padded.push_back(row[k % row.size()]);
  } else {
    padded.insert(padded.end(), r, config.boundary_state);
    padded.insert(padded.end(), row.begin(), row.end());
    padded.insert(padded.end(), r, config.boundary_state);
  }
  return apply_shrinking(rule, padded);
}

namespace {

// Runs one trial, handing every row (and its masks for t >= 1) to `visit`.
using RowVisitor = std::function<void(int t, const std::vector<State>& row,
                                      const std::vector<char>* sampled,
                                      const std::vector<char>* errors)>;

void simulate(const LocalRule& rule, const NoiseModel& model, const SimConfig& config,
              std::vector<State> row, std::uint64_t trial, const RowVisitor& visit) {
  const auto threshold = error_threshold(model.epsilon);
  const std::int64_t lo = config.first();
  std::vector<char> sampled(row.size()), errors(row.size());
  visit(0, row, nullptr, nullptr);
  for (int t = 1; t <= config.horizon; ++t) {
    const std::vector<State> image = noiseless_step(rule, config, row);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::int64_t i = lo + static_cast<std::int64_t>(c);
      const bool hit = !threshold || (*threshold > 0 && prf(config.seed, trial, t, i) < *threshold);
      State next = image[c];
      if (hit) {
        switch (model.kind) {
          case NoiseKind::kIndependentMax:
            next = std::max(model.target, next);
            break;
          case NoiseKind::kIndependentSet:
            next = model.target;
            break;
          case NoiseKind::kCustom: {
            const double u =
                static_cast<double>(prf(config.seed ^ kReplacementStream, trial, t, i) >> 11) *
                0x1.0p-53;
            double acc = 0.0;
            next = static_cast<State>(model.distribution.size() - 1);
            for (std::size_t s = 0; s < model.distribution.size(); ++s) {
              acc += model.distribution[s];
              if (u < acc) {
                next = static_cast<State>(s);
                break;
              }
            }
            break;
          }
        }
      }
      sampled[c] = hit;
      errors[c] = next != image[c];
      row[c] = next;
    }
    visit(t, row, &sampled, &errors);
  }
}

std::vector<State> initial_row(const SimConfig& config, const Configuration& initial) {
  std::vector<State> row(static_cast<std::size_t>(config.width));
  const std::int64_t lo = config.first();
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = initial.at(lo + static_cast<std::int64_t>(c));
  return row;
}

void check_inputs(const LocalRule& rule, const NoiseModel& model, const SimConfig& config) {
  if (!is_monotone(rule)) throw RuleError("rule is not monotone");
  model.validate(rule);
  config.validate(rule);
}

std::size_t origin_column(const SimConfig& config) {
  const std::int64_t c = -config.first();
  if (c < 0 || c >= config.width) throw RuleError("origin lies outside the simulated window");
  return static_cast<std::size_t>(c);
}

}  // namespace

NoisyTrajectory run_noisy(const LocalRule& rule, const NoiseModel& model, const SimConfig& config,
                          const Configuration& initial, std::uint64_t trial) {
  check_inputs(rule, model, config);
  for (State s : initial.cells) {
    if (s >= rule.state_count()) throw RuleError("initial state out of range");
  }
  NoisyTrajectory out;
  out.lo = config.first();
  out.width = config.width;
  out.horizon = config.horizon;
  out.state_count = rule.state_count();
  out.seed = config.seed;
  out.trial = trial;
  out.rows.reserve(static_cast<std::size_t>(config.horizon) + 1);
  simulate(rule, model, config, initial_row(config, initial), trial,
           [&](int, const std::vector<State>& row, const std::vector<char>* sampled,
               const std::vector<char>* errors) {
             out.rows.push_back(row);
             if (sampled) {
               out.sampled.push_back(*sampled);
               out.errors.push_back(*errors);
             }
           });
  return out;
}

std::string format_trajectory(const NoisyTrajectory& tr) {
  std::ostringstream out;
  out << "ca-traj v1\nstates " << tr.state_count << "\nwidth " << tr.width << "\nlo " << tr.lo
      << "\nsteps " << tr.horizon << "\nseed " << tr.seed << "\ntrial " << tr.trial << "\nrows\n";
  const bool digits = tr.state_count <= 10;
  for (const auto& row : tr.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (digits) {
        out << char('0' + row[c]);
      } else {
        out << (c ? " " : "") << int(row[c]);
      }
    }
    out << '\n';
  }
  out << "errors\n";
  for (const auto& row : tr.errors) {
    for (char e : row) out << (e ? '1' : '0');
    out << '\n';
  }
  return out.str();
}

NoisyTrajectory parse_trajectory(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  auto next = [&]() -> std::string& {
    if (!std::getline(in, line)) throw RuleParseError(line_no + 1, 1, "unexpected end of trajectory");
    ++line_no;
    return line;
  };
  if (next() != "ca-traj v1") throw RuleParseError(line_no, 1, "missing header 'ca-traj v1'");
  NoisyTrajectory tr;
  auto field = [&](const char* key) -> std::string {
    std::istringstream ls(next());
    std::string k, v;
    ls >> k >> v;
    if (k != key || v.empty()) {
      throw RuleParseError(line_no, 1, std::string("expected '") + key + " <value>'");
    }
    return v;
  };
  try {
    tr.state_count = std::stoi(field("states"));
    tr.width = std::stoi(field("width"));
    tr.lo = std::stoll(field("lo"));
    tr.horizon = std::stoi(field("steps"));
    tr.seed = std::stoull(field("seed"));
    tr.trial = std::stoull(field("trial"));
  } catch (const std::logic_error&) {
    throw RuleParseError(line_no, 1, "malformed number");
  }
  if (tr.width < 1 || tr.horizon < 0 || tr.state_count < 2 || tr.state_count > 256) {
    throw RuleParseError(line_no, 1, "dimensions out of range");
  }
  if (next() != "rows") throw RuleParseError(line_no, 1, "expected 'rows'");
  const bool digits = tr.state_count <= 10;
  for (int t = 0; t <= tr.horizon; ++t) {
    const std::string& l = next();
    std::vector<State> row;
    if (digits) {
      for (char ch : l) {
        if (ch < '0' || ch >= '0' + tr.state_count) {
          throw RuleParseError(line_no, static_cast<int>(row.size()) + 1, "bad state digit");
        }
        row.push_back(static_cast<State>(ch - '0'));
      }
    } else {
      std::istringstream ls(l);
      int v;
      while (ls >> v) {
        if (v < 0 || v >= tr.state_count) throw RuleParseError(line_no, 1, "state out of range");
        row.push_back(static_cast<State>(v));
      }
    }
    if (static_cast<int>(row.size()) != tr.width) throw RuleParseError(line_no, 1, "row width mismatch");
    tr.rows.push_back(std::move(row));
  }
  if (next() != "errors") throw RuleParseError(line_no, 1, "expected 'errors'");
  for (int t = 1; t <= tr.horizon; ++t) {
    const std::string& l = next();
    if (static_cast<int>(l.size()) != tr.width) throw RuleParseError(line_no, 1, "error row width mismatch");
    std::vector<char> row;
    for (char ch : l) {
      if (ch != '0' && ch != '1') throw RuleParseError(line_no, 1, "error rows hold 0/1");
      row.push_back(ch == '1');
    }
    tr.errors.push_back(std::move(row));
  }
  return tr;
}

Estimate wilson_interval(std::uint64_t hits, std::uint64_t n, double z) {
  Estimate e;
  e.samples = n;
  if (n == 0) return e;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
  e.value = p;
  e.ci_low = std::max(0.0, centre - half);
  e.ci_high = std::min(1.0, centre + half);
  return e;
}

std::vector<Estimate> density_zero(const LocalRule& rule, const NoiseModel& model,
                                   const SimConfig& config) {
  check_inputs(rule, model, config);
  const std::size_t origin = origin_column(config);
  const std::size_t times = static_cast<std::size_t>(config.horizon) + 1;
  std::vector<std::vector<char>> zero(static_cast<std::size_t>(config.trials));
  parallel_for(zero.size(), config.workers, [&](std::size_t k) {
    zero[k].resize(times);
    simulate(rule, model, config, std::vector<State>(static_cast<std::size_t>(config.width), 0), k,
             [&](int t, const std::vector<State>& row, const std::vector<char>*,
                 const std::vector<char>*) { zero[k][static_cast<std::size_t>(t)] = row[origin] == 0; });
  });
  std::vector<Estimate> out;
  for (std::size_t t = 0; t < times; ++t) {
    std::uint64_t hits = 0;
    for (const auto& z : zero) hits += static_cast<std::uint64_t>(z[t]);
    out.push_back(wilson_interval(hits, zero.size()));
  }
  return out;
}

Estimate tail_density_nonzero(const LocalRule& rule, const NoiseModel& model,
                              const SimConfig& config, int from) {
  check_inputs(rule, model, config);
  if (from < 0 || from > config.horizon) throw RuleError("tail start outside [0, T]");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(config.trials));
  parallel_for(counts.size(), config.workers, [&](std::size_t k) {
    simulate(rule, model, config, std::vector<State>(static_cast<std::size_t>(config.width), 0), k,
             [&](int t, const std::vector<State>& row, const std::vector<char>*,
                 const std::vector<char>*) {
               if (t < from) return;
               for (State s : row) counts[k] += s != 0;
             });
  });
  const double per_trial = static_cast<double>(config.width) * (config.horizon - from + 1);
  std::vector<double> means;
  for (std::uint64_t c : counts) means.push_back(static_cast<double>(c) / per_trial);
  const double n = static_cast<double>(means.size());
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / n;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var = means.size() > 1 ? var / (n - 1) : 0.0;
  const double half = 1.959963984540054 * std::sqrt(var / n);
  Estimate e;
  e.value = mean;
  e.ci_low = std::max(0.0, mean - half);
  e.ci_high = std::min(1.0, mean + half);
  e.samples = static_cast<std::uint64_t>(per_trial * n);
  return e;
}

std::vector<SurvivalRow> island_survival(const LocalRule& rule, State omega,
                                         const std::vector<int>& sizes, const NoiseModel& model,
                                         const SimConfig& config) {
  if (omega == 0 || !is_quiescent(rule, omega)) throw RuleError("omega must be a nonzero quiescent state");
  if (!is_quiescent(rule, 0)) throw RuleError("state 0 must be quiescent");
  const RateEstimate left = rate(rule, 0, omega).left;
  const RateEstimate right = rate(rule, omega, 0).right;
  if (!left.exact() || !right.exact()) {
    throw RuleError("island tracking needs exact rates L_{0,w} and R_{w,0}");
  }
  const Rational drift = (left.lower + right.lower) / Rational(2);
  std::vector<SurvivalRow> out;
  for (int n : sizes) {
    if (n < 1) throw RuleError("island half-size must be positive");
    SimConfig cfg = config;
    cfg.boundary = BoundaryKind::kFixed;
    cfg.boundary_state = 0;
    const std::int64_t reach = n + static_cast<std::int64_t>(rule.radius()) * config.horizon + 2;
    cfg.lo = -reach;
    cfg.width = static_cast<int>(2 * reach);
    check_inputs(rule, model, cfg);
    Configuration init{-n, std::vector<State>(static_cast<std::size_t>(2 * n), omega), 0, 0};
    std::vector<char> alive(static_cast<std::size_t>(cfg.trials), 1);
    std::vector<char> last(alive.size(), 0);
    parallel_for(alive.size(), cfg.workers, [&](std::size_t k) {
      simulate(rule, model, cfg, initial_row(cfg, init), k,
               [&](int t, const std::vector<State>& row, const std::vector<char>*,
                   const std::vector<char>*) {
                 const std::int64_t i = (drift * Rational(t)).floor();
                 const std::int64_t c = i - *cfg.lo;
                 const bool held = c >= 0 && c < cfg.width && row[static_cast<std::size_t>(c)] == omega;
                 if (!held) alive[k] = 0;
                 if (t == cfg.horizon) last[k] = held;
               });
    });
    const auto hits = static_cast<std::uint64_t>(std::count(alive.begin(), alive.end(), 1));
    const auto held = static_cast<std::uint64_t>(std::count(last.begin(), last.end(), 1));
    out.push_back({n, wilson_interval(hits, alive.size()), wilson_interval(held, last.size())});
  }
  return out;
}

std::vector<double> ergodicity_probe(const LocalRule& rule, const NoiseModel& model,
                                     const SimConfig& config) {
  check_inputs(rule, model, config);
  const std::size_t origin = origin_column(config);
  const std::size_t times = static_cast<std::size_t>(config.horizon) + 1;
  const std::size_t states = static_cast<std::size_t>(rule.state_count());
  const State top = static_cast<State>(rule.max_state());
  SimConfig bottom_cfg = config, top_cfg = config;
  if (config.boundary == BoundaryKind::kFixed) {
    bottom_cfg.boundary_state = 0;
    top_cfg.boundary_state = top;
    top_cfg.validate(rule);
    bottom_cfg.validate(rule);
  }
  // origin states per trial; bottom runs use trial 2k, top runs 2k+1
  std::vector<std::vector<State>> low(static_cast<std::size_t>(config.trials)), high(low.size());
  parallel_for(low.size(), config.workers, [&](std::size_t k) {
    low[k].resize(times);
    high[k].resize(times);
    simulate(rule, model, bottom_cfg, std::vector<State>(static_cast<std::size_t>(config.width), 0),
             2 * k, [&](int t, const std::vector<State>& row, const std::vector<char>*,
                        const std::vector<char>*) { low[k][static_cast<std::size_t>(t)] = row[origin]; });
    simulate(rule, model, top_cfg, std::vector<State>(static_cast<std::size_t>(config.width), top),
             2 * k + 1, [&](int t, const std::vector<State>& row, const std::vector<char>*,
                            const std::vector<char>*) { high[k][static_cast<std::size_t>(t)] = row[origin]; });
  });
  std::vector<double> out;
  const double n = static_cast<double>(low.size());
  for (std::size_t t = 0; t < times; ++t) {
    std::vector<double> p(states, 0.0), q(states, 0.0);
    for (std::size_t k = 0; k < low.size(); ++k) {
      p[low[k][t]] += 1.0 / n;
      q[high[k][t]] += 1.0 / n;
    }
    double tv = 0.0;
    for (std::size_t s = 0; s < states; ++s) tv += std::abs(p[s] - q[s]);
    out.push_back(tv / 2);
  }
  return out;
}

}  // namespace mca
