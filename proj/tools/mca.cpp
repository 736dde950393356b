// Command-line front end. Reports are tab-separated lines on stdout;
// diagnostics go to stderr. Exit codes: 0 ok, 1 usage, 2 computation error,
// 3 when a decider answers unknown.

#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mca/deciders.hpp"
#include "mca/forcing.hpp"
#include "mca/noise.hpp"
#include "mca/polygon.hpp"
#include "mca/render.hpp"
#include "mca/rule.hpp"
#include "mca/stepdyn.hpp"

namespace {

using namespace mca;

constexpr int kUsage = 1;
constexpr int kComputation = 2;
constexpr int kUnknown = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

int to_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("malformed " + what + " '" + text + "'");
  }
}

std::vector<int> int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) out.push_back(to_int(part, what));
  return out;
}

std::string join(const std::vector<State>& states, const char* sep) {
  std::string out;
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (k) out += sep;
    out += std::to_string(states[k]);
  }
  return out;
}

std::string set_text(const CellSet& set) {
  std::string out = "{";
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(set[k]);
  }
  return out + "}";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + out_path + "'");
  out << text;
}

struct Options {
  std::string rule = "";
  std::string pair;
  int k_max = 0;
  int horizon = 0;
  int width = 0;
  double eps = 0.0;
  std::uint64_t seed = 1;
  int trials = 0;
  int trial = -1;
  int denominator_bound = 64;
  int window = 256;
  int workers = 1;
  std::string out;
  std::string init = "zero";
  std::string noise;
  std::string boundary = "periodic";
  std::string chain;
  std::string sizes = "4,16,64";
  int omega = -1;
  int every = 10;
  std::size_t budget = kDefaultForcingBudget;
  std::string trajectory;
  std::string overlay;
};

LocalRule load(const Options& o) {
  try {
    return load_rule(o.rule);
  } catch (const std::exception& e) {
    throw UsageError(std::string("rule: ") + e.what());
  }
}

std::pair<State, State> parse_pair(const LocalRule& rule, const std::string& text) {
  const auto v = int_list(text, "pair");
  if (v.size() != 2) throw UsageError("--pair takes a,b");
  for (int s : v) {
    if (s < 0 || s > rule.max_state()) throw UsageError("pair state out of range");
  }
  return {static_cast<State>(v[0]), static_cast<State>(v[1])};
}

NoiseModel parse_noise(const LocalRule& rule, const Options& o, const std::string& fallback) {
  try {
    NoiseModel model = NoiseModel::parse(o.noise.empty() ? fallback : o.noise, o.eps);
    model.validate(rule);
    return model;
  } catch (const std::exception& e) {
    throw UsageError(std::string("noise: ") + e.what());
  }
}

SimConfig sim_config(const LocalRule& rule, const Options& o) {
  SimConfig cfg;
  cfg.width = o.width;
  cfg.horizon = o.horizon;
  cfg.seed = o.seed;
  cfg.trials = o.trials;
  cfg.workers = o.workers;
  if (o.boundary == "periodic") {
    cfg.boundary = BoundaryKind::kPeriodic;
  } else if (o.boundary.rfind("fixed:", 0) == 0) {
    cfg.boundary = BoundaryKind::kFixed;
    cfg.boundary_state = static_cast<State>(to_int(o.boundary.substr(6), "boundary state"));
  } else {
    throw UsageError("--boundary is 'periodic' or 'fixed:<a>'");
  }
  try {
    cfg.validate(rule);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

// "zero", "const:<a>" or "island:<a>x<n>" (state a on cells 0..n-1 over 0).
Configuration parse_init(const LocalRule& rule, const std::string& text, const SimConfig& cfg) {
  const std::int64_t lo = cfg.first();
  const std::int64_t hi = lo + cfg.width - 1;
  auto state = [&](const std::string& s) {
    const int v = to_int(s, "init state");
    if (v < 0 || v > rule.max_state()) throw UsageError("init state out of range");
    return static_cast<State>(v);
  };
  if (text == "zero") return Configuration::constant(lo, hi, 0);
  if (text.rfind("const:", 0) == 0) return Configuration::constant(lo, hi, state(text.substr(6)));
  if (text.rfind("island:", 0) == 0) {
    const auto parts = split(text.substr(7), 'x');
    if (parts.size() != 2) throw UsageError("--init island:<a>x<n>");
    const State a = state(parts[0]);
    const int n = to_int(parts[1], "island length");
    if (n < 1 || n > hi + 1) throw UsageError("island does not fit the window");
    Configuration c = Configuration::constant(lo, hi, 0);
    for (int i = 0; i < n; ++i) c.cells[static_cast<std::size_t>(i - lo)] = a;
    return c;
  }
  throw UsageError("unknown --init '" + text + "'");
}

RateParams rate_params(const Options& o) {
  RateParams p;
  p.max_time = o.horizon;
  p.denominator_bound = o.denominator_bound;
  p.confirm_window = o.window;
  if (o.horizon < 1 || p.denominator_bound < 1) throw UsageError("--T and --denominator-bound must be positive");
  if (p.confirm_window < 2) throw UsageError("--window must be at least 2");
  return p;
}

// Subcommands ---------------------------------------------------------------

int cmd_check(const Options& o) {
  const LocalRule rule = load(o);
  std::cout << "states\t" << rule.state_count() << "\nradius\t" << rule.radius() << '\n';
  const auto mono = is_monotone(rule);
  if (mono) {
    std::cout << "monotone\tyes\n";
  } else {
    std::cout << "monotone\tno\t" << join(mono.witness->lower, ",") << '\t'
              << join(mono.witness->upper, ",") << '\n';
  }
  std::cout << "quiescent\t" << join(quiescent_states(rule), ",") << '\n';
  return 0;
}

void print_rate(State a, State b, const RatePair& p) {
  for (const RateEstimate* e : {&p.left, &p.right}) {
    std::cout << "rate\t" << int{a} << '\t' << int{b} << '\t' << (e == &p.left ? "L" : "R") << '\t'
              << e->render() << '\t' << to_string(e->status) << '\n';
  }
}

int cmd_rates(const Options& o) {
  const LocalRule rule = load(o);
  const RateParams params = rate_params(o);
  if (!o.pair.empty()) {
    const auto [a, b] = parse_pair(rule, o.pair);
    print_rate(a, b, rate(rule, a, b, params));
    return 0;
  }
  const RateTable table = rate_table(rule, params, o.workers);
  for (const auto& [ab, p] : table.entries()) print_rate(ab.first, ab.second, p);
  return 0;
}

int cmd_forcing(const Options& o) {
  const LocalRule rule = load(o);
  if (o.pair.empty()) throw UsageError("forcing needs --pair a,b");
  const auto [a, b] = parse_pair(rule, o.pair);
  if (o.k_max < 1) throw UsageError("--k-max must be positive");
  for (int k = 1; k <= o.k_max; ++k) {
    const ForcingFamily family = minimal_forcing_sets(rule, a, b, k, o.budget);
    for (const CellSet& set : family.sets) {
      std::cout << "forcing\t" << int{a} << '\t' << int{b} << '\t' << k << '\t' << set_text(set) << '\n';
    }
    std::cout << "family\t" << int{a} << '\t' << int{b} << '\t' << k << '\t' << family.sets.size() << '\t'
              << (family.complete ? "complete" : "partial") << '\t' << family.evaluations << '\n';
    const auto t = tau(rule, a, b, k);
    std::cout << "tau\t" << int{a} << '\t' << int{b} << '\t' << k << '\t'
              << (t ? "[" + std::to_string(t->first) + "," + std::to_string(t->second) + "]"
                    : std::string("empty"))
              << '\n';
  }
  return 0;
}

int cmd_decide(const Options& o) {
  const LocalRule rule = load(o);
  DecideParams params;
  params.rates = rate_params(o);
  params.k_max = o.k_max;
  params.workers = o.workers;
  if (params.k_max < 1) throw UsageError("--k-max must be positive");
  if (!is_monotone(rule)) throw UsageError("rule is not monotone");
  const RateTable table = rate_table(rule, params.rates, params.workers);
  const Verdict eroder = is_eroder(rule, params, &table);
  const Verdict stable = is_stable_eroder(rule, params, &table);
  std::cout << "eroder\t" << to_string(eroder.answer) << '\n';
  std::cout << "stable\t" << to_string(stable.answer) << '\n';
  if (!stable.chain.empty()) std::cout << "chain\t" << join(stable.chain, "<") << '\n';
  for (const Verdict* v : {&eroder, &stable}) {
    if (!v->note.empty()) std::cout << "note\t" << (v == &eroder ? "eroder" : "stable") << '\t' << v->note << '\n';
  }
  return eroder.answer == Answer::kUnknown || stable.answer == Answer::kUnknown ? kUnknown : 0;
}

int cmd_simulate(const Options& o) {
  const LocalRule rule = load(o);
  const SimConfig cfg = sim_config(rule, o);
  const NoiseModel model = parse_noise(rule, o, "max:" + std::to_string(rule.max_state()));
  const Configuration init = parse_init(rule, o.init, cfg);
  const auto trial = static_cast<std::uint64_t>(o.trial < 0 ? 0 : o.trial);
  emit(format_trajectory(run_noisy(rule, model, cfg, init, trial)), o.out);
  return 0;
}

int cmd_survival(const Options& o) {
  const LocalRule rule = load(o);
  const State omega = static_cast<State>(o.omega < 0 ? rule.max_state() : o.omega);
  if (omega > rule.max_state()) throw UsageError("--omega out of range");
  Options with = o;
  with.width = 64;  // placeholder; the survival runner sizes its own window
  const SimConfig cfg = sim_config(rule, with);
  const NoiseModel model = parse_noise(rule, o, "max:" + std::to_string(omega));
  const auto sizes = int_list(o.sizes, "size");
  for (const SurvivalRow& row : island_survival(rule, omega, sizes, model, cfg)) {
    std::cout << "survival\t" << row.n << '\t' << fixed(row.survival.value) << '\t'
              << fixed(row.survival.ci_low) << '\t' << fixed(row.survival.ci_high) << '\t'
              << fixed(row.holds_at_horizon.value) << '\t' << fixed(row.holds_at_horizon.ci_low)
              << '\t' << fixed(row.holds_at_horizon.ci_high) << '\n';
  }
  return 0;
}

int cmd_probe(const Options& o) {
  const LocalRule rule = load(o);
  const SimConfig cfg = sim_config(rule, o);
  const NoiseModel model = parse_noise(rule, o, "max:" + std::to_string(rule.max_state()));
  if (o.every < 1) throw UsageError("--every must be positive");
  const auto tv = ergodicity_probe(rule, model, cfg);
  for (std::size_t t = 0; t < tv.size(); ++t) {
    if (t % static_cast<std::size_t>(o.every) == 0 || t + 1 == tv.size()) {
      std::cout << "probe\t" << t << '\t' << fixed(tv[t]) << '\n';
    }
  }
  return 0;
}

int cmd_polygon(const Options& o) {
  const LocalRule rule = load(o);
  SimConfig cfg = sim_config(rule, o);
  std::vector<State> chain;
  if (!o.chain.empty()) {
    for (int s : int_list(o.chain, "chain state")) chain.push_back(static_cast<State>(s));
  } else {
    DecideParams params;
    params.workers = o.workers;
    const Verdict stable = is_stable_eroder(rule, params);
    if (stable.answer != Answer::kYes) {
      std::cerr << "mca: no stability chain (stable " << to_string(stable.answer) << ")\n";
      return stable.answer == Answer::kUnknown ? kUnknown : kComputation;
    }
    chain = stable.chain;
  }
  const LevelData data = build_level_data(rule, chain, o.k_max);

  NoisyTrajectory traj;
  if (!o.trajectory.empty()) {
    traj = parse_trajectory(read_file(o.trajectory));
    // the recording fixes the window and the horizon
    cfg.width = traj.width;
    cfg.lo = traj.lo;
    cfg.horizon = traj.horizon;
    cfg.seed = traj.seed;
  } else {
    const NoiseModel model = parse_noise(rule, o, "max:" + std::to_string(rule.max_state()));
    const Configuration init = parse_init(rule, o.init, cfg);
    // first trial whose target cell is nonzero, unless one is named
    const int from = o.trial < 0 ? 0 : o.trial;
    const int to = o.trial < 0 ? from + std::max(o.trials, 1) : from + 1;
    bool found = false;
    for (int k = from; k < to && !found; ++k) {
      traj = run_noisy(rule, model, cfg, init, static_cast<std::uint64_t>(k));
      const int t = traj.horizon - traj.horizon % data.power;
      found = traj.contains(0, t) && traj.at(0, t) != 0;
    }
    if (!found) {
      std::cerr << "mca: no trial with a nonzero target cell\n";
      return kComputation;
    }
  }
  const PolygonSystem sys = construct_system(data, traj, cfg);
  const VerifyReport report = verify_system(sys, traj, cfg, data);
  const std::string dump = format_system(sys);
  if (!o.out.empty()) emit(dump, o.out);
  std::cout << "trial\t" << traj.trial << '\n';
  std::cout << "polygons\t" << sys.polygons.size() << "\nvertices\t" << sys.stats.vertices
            << "\ndistinct\t" << sys.stats.distinct << '\n';
  for (const CheckResult& c : report.checks) {
    std::cout << "check\t" << c.name << '\t' << (c.passed ? "pass" : "fail");
    if (!c.passed) std::cout << '\t' << c.detail;
    std::cout << '\n';
  }
  if (o.out.empty()) std::cout << dump;
  return report.ok() ? 0 : kComputation;
}

int cmd_render(const Options& o) {
  const LocalRule rule = load(o);
  NoisyTrajectory traj;
  if (!o.trajectory.empty()) {
    traj = parse_trajectory(read_file(o.trajectory));
  } else {
    Options with = o;
    if (with.width <= 0) {
      // room for the light cone on both sides of the initial pattern
      std::int64_t n = 1;
      if (o.init.rfind("island:", 0) == 0) {
        const auto parts = split(o.init.substr(7), 'x');
        if (parts.size() == 2) n = to_int(parts[1], "island length");
      }
      with.width = static_cast<int>(2 * (n + static_cast<std::int64_t>(rule.radius()) * o.horizon + 1));
    }
    if (with.boundary == "periodic") with.boundary = "fixed:0";
    with.trials = 1;
    const SimConfig cfg = sim_config(rule, with);
    traj = run_deterministic(rule, cfg, parse_init(rule, o.init, cfg));
  }
  std::set<std::pair<std::size_t, std::size_t>> marks;
  if (!o.overlay.empty()) marks = overlay_marks(parse_system(read_file(o.overlay)), traj);
  emit(render_pgm(traj.rows, traj.state_count - 1, marks), o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analysis of one-dimensional monotone cellular automata"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  // CLI11 writes defaults into the bound variable at declaration time, so
  // every subcommand needs its own copy.
  std::deque<Options> store;
  Options* cur = nullptr;
  auto fresh = [&]() -> Options& {
    cur = &store.emplace_back();
    return *cur;
  };
  int code = 0;

  auto rule_flag = [&](CLI::App* sub) {
    Options& o = *cur;
    sub->add_option("--rule", o.rule, "builtin:<name>[:param] or a rule file")->required();
    sub->add_option("--workers", o.workers, "Worker threads")->default_val(1)->check(CLI::PositiveNumber);
  };
  auto rate_flags = [&](CLI::App* sub) {
    Options& o = *cur;
    sub->add_option("--T", o.horizon, "Step-evolution horizon")->default_val(4096);
    sub->add_option("--denominator-bound", o.denominator_bound, "Largest period tried")->default_val(64);
    sub->add_option("--window", o.window, "Confirmation window")->default_val(256);
  };
  auto sim_flags = [&](CLI::App* sub, int width, int horizon, double eps, int trials) {
    Options& o = *cur;
    sub->add_option("--width", o.width, "Window width")->default_val(width);
    sub->add_option("--T", o.horizon, "Time steps")->default_val(horizon);
    sub->add_option("--eps", o.eps, "Error rate")->default_val(eps)->check(CLI::Range(0.0, 1.0));
    sub->add_option("--noise", o.noise, "max:<a>, set:<a> or custom:<p0>,..,<pm> (default max:m)");
    sub->add_option("--seed", o.seed, "Seed")->default_val(1);
    sub->add_option("--trials", o.trials, "Trials")->default_val(trials);
    sub->add_option("--boundary", o.boundary, "periodic or fixed:<a>")->default_val("periodic");
  };

  {
    Options& o = fresh();
    (void)o;
  auto* check = app.add_subcommand("check", "Validate a rule and list its quiescent states");
  rule_flag(check);
  check->callback([&code, &o] { code = cmd_check(o); });
  }

  {
    Options& o = fresh();
    (void)o;
  auto* rates = app.add_subcommand("rates", "Edge rates of every ordered quiescent pair");
  rule_flag(rates);
  rate_flags(rates);
  rates->add_option("--pair", o.pair, "Only the pair a,b");
  rates->callback([&code, &o] { code = cmd_rates(o); });
  }

  {
    Options& o = fresh();
    (void)o;
  auto* forcing = app.add_subcommand("forcing", "Minimal forcing sets and tau per level");
  rule_flag(forcing);
  forcing->add_option("--pair", o.pair, "States a,b with a < b")->required();
  forcing->add_option("--k-max", o.k_max, "Highest level")->default_val(4);
  forcing->add_option("--budget", o.budget, "Forcing evaluations per level")->default_val(kDefaultForcingBudget);
  forcing->callback([&code, &o] { code = cmd_forcing(o); });
  }

  {
    Options& o = fresh();
    (void)o;
  auto* decide = app.add_subcommand("decide", "Eroder and stable-eroder verdicts");
  rule_flag(decide);
  rate_flags(decide);
  decide->add_option("--k-max", o.k_max, "Highest forcing level tried")->default_val(8);
  decide->callback([&code, &o] { code = cmd_decide(o); });
  }

  {
    Options& o = fresh();
    (void)o;
  auto* simulate = app.add_subcommand("simulate", "Record one noisy trajectory");
  rule_flag(simulate);
  sim_flags(simulate, 256, 100, 0.0, 1);
  simulate->add_option("--trial", o.trial, "Trial index")->default_val(0);
  simulate->add_option("--init", o.init, "zero, const:<a> or island:<a>x<n>")->default_val("zero");
  simulate->add_option("--out", o.out, "Output file (default stdout)");
  simulate->callback([&code, &o] { code = cmd_simulate(o); });
  }

  {
    Options& o = fresh();
    (void)o;
  auto* survival = app.add_subcommand("survival", "Island survival under noise");
  rule_flag(survival);
  sim_flags(survival, 64, 500, 0.05, 200);
  // the island runs on a fixed-0 window sized to its light cone
  survival->get_option("--width")->description("Ignored; the window fits the light cone");
  survival->get_option("--boundary")->description("Ignored; always fixed:0");
  survival->add_option("--omega", o.omega, "Island state (default m)");
  survival->add_option("--sizes", o.sizes, "Island half-sizes")->default_val("4,16,64");
  survival->callback([&code, &o] { code = cmd_survival(o); });
  }

  {
    Options& o = fresh();
    (void)o;
  auto* probe = app.add_subcommand("probe", "Distance between runs from all 0 and all m");
  rule_flag(probe);
  sim_flags(probe, 64, 200, 0.05, 500);
  probe->add_option("--every", o.every, "Print every k-th time")->default_val(10);
  probe->callback([&code, &o] { code = cmd_probe(o); });
  }

  {
    Options& o = fresh();
    (void)o;
  auto* polygon = app.add_subcommand("polygon", "Build and verify a polygon witness system");
  rule_flag(polygon);
  sim_flags(polygon, 160, 40, 0.1, 1000);
  polygon->add_option("--trial", o.trial, "Trial index (default: first with a nonzero target)");
  polygon->add_option("--init", o.init, "zero, const:<a> or island:<a>x<n>")->default_val("zero");
  polygon->add_option("--chain", o.chain, "Stability chain (default: from the decider)");
  polygon->add_option("--k-max", o.k_max, "Highest forcing level tried")->default_val(8);
  polygon->add_option("--trajectory", o.trajectory, "Use a recorded trajectory");
  polygon->add_option("--out", o.out, "Write the system dump here");
  polygon->callback([&code, &o] { code = cmd_polygon(o); });
  }

  {
    Options& o = fresh();
    (void)o;
  auto* render = app.add_subcommand("render", "Space-time diagram as plain PGM");
  rule_flag(render);
  render->add_option("--init", o.init, "zero, const:<a> or island:<a>x<n>")->default_val("zero");
  render->add_option("--steps,--T", o.horizon, "Time steps")->default_val(20);
  render->add_option("--width", o.width, "Window width (default: fits the light cone)")->default_val(0);
  render->add_option("--boundary", o.boundary, "periodic or fixed:<a>")->default_val("fixed:0");
  render->add_option("--trajectory", o.trajectory, "Render a recorded trajectory instead");
  render->add_option("--overlay", o.overlay, "Mark border vertices from a polygon dump");
  render->add_option("--out", o.out, "Output file (default stdout)");
  render->callback([&code, &o] { code = cmd_render(o); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  } catch (const UsageError& e) {
    std::cerr << "mca: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "mca: " << e.what() << '\n';
    return kComputation;
  }
  return code;
}
