// Golden-file tests for the command-line tool. Each line of cases.txt names a
// case, its exit code and its arguments; stdout must match <name>.out byte for
// byte. Run with MCA_UPDATE_GOLDEN=1 to rewrite the expected files.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mca/noise.hpp"
#include "mca/polygon.hpp"

namespace {

const std::string kGolden = MCA_GOLDEN_DIR;

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(MCA_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  // usage lines name the binary; keep goldens independent of the build tree
  const std::string path = MCA_CLI_PATH;
  for (std::size_t p; (p = r.out.find(path)) != std::string::npos;) r.out.replace(p, path.size(), "mca");
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string substitute(std::string args) {
  const std::string key = "{golden}";
  for (std::size_t p; (p = args.find(key)) != std::string::npos;) args.replace(p, key.size(), kGolden);
  return args;
}

struct Case {
  std::string name;
  int code = 0;
  std::string args;
};

std::vector<Case> cases() {
  std::ifstream in(kGolden + "/cases.txt");
  std::vector<Case> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Case c;
    std::string code;
    std::getline(ss, c.name, '\t');
    std::getline(ss, code, '\t');
    std::getline(ss, c.args);
    c.code = std::stoi(code);
    out.push_back(c);
  }
  return out;
}

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / ("mca_cli_" + stem + "_" + std::to_string(::getpid()))).string();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("golden outputs") {
    const auto all = cases();
    REQUIRE(all.size() > 30);
    const bool update = std::getenv("MCA_UPDATE_GOLDEN") != nullptr;
    for (const Case& c : all) {
      CAPTURE(c.name);
      const Run r = run_cli(substitute(c.args));
      CHECK(r.code == c.code);
      const std::string path = kGolden + "/" + c.name + ".out";
      if (update) {
        std::ofstream(path, std::ios::binary) << r.out;
        continue;
      }
      REQUIRE(std::filesystem::exists(path));
      CHECK(r.out == slurp(path));
    }
  }

  TEST_CASE("every subcommand has a golden case") {
    const char* subs[] = {"check", "rates", "forcing", "decide", "simulate",
                          "survival", "probe", "polygon", "render"};
    const auto all = cases();
    for (const char* s : subs) {
      bool seen = false;
      for (const Case& c : all) seen = seen || (c.code == 0 && c.args.rfind(s, 0) == 0);
      CAPTURE(s);
      CHECK(seen);
    }
    for (int code : {0, 1, 2, 3}) {
      bool seen = false;
      for (const Case& c : all) seen = seen || c.code == code;
      CHECK(seen);
    }
  }

  TEST_CASE("--out writes what stdout would show") {
    const std::string args = "simulate --rule builtin:min2 --width 16 --T 8 --eps 0.2 --seed 3";
    const std::string file = temp_path("sim");
    CHECK(run_cli(args + " --out " + file).out.empty());
    CHECK(slurp(file) == run_cli(args).out);
    std::filesystem::remove(file);
  }

  TEST_CASE("worker count does not change any output") {
    const char* runs[] = {
        "rates --rule builtin:wrapped4",
        "simulate --rule builtin:galperin3 --width 40 --T 30 --eps 0.1",
        "survival --rule builtin:galperin3 --sizes 2,4 --T 20 --trials 30",
        "probe --rule builtin:min2 --width 16 --T 20 --trials 30 --noise custom:0.5,0.5",
    };
    for (const char* args : runs) {
      CAPTURE(args);
      const Run one = run_cli(std::string(args) + " --workers 1");
      CHECK(one.code == 0);
      CHECK(run_cli(std::string(args) + " --workers 4").out == one.out);
      CHECK(run_cli(std::string(args) + " --workers 16").out == one.out);
    }
  }

  TEST_CASE("recorded trajectory, polygon dump and picture agree") {
    const std::string traj = slurp(kGolden + "/min2_traj.txt");
    const mca::NoisyTrajectory tr = mca::parse_trajectory(traj);
    CHECK(mca::format_trajectory(tr) == traj);

    // the dump written by the tool matches the committed fixture
    const std::string sys = temp_path("sys");
    CHECK(run_cli("polygon --rule builtin:min2 --trajectory " + kGolden + "/min2_traj.txt --out " + sys).code == 0);
    CHECK(slurp(sys) == slurp(kGolden + "/min2_sys.txt"));
    std::filesystem::remove(sys);

    // the plain picture of the recording: one row per time, grey level per state
    std::istringstream pgm(run_cli("render --rule builtin:min2 --trajectory " + kGolden + "/min2_traj.txt").out);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    pgm >> magic >> w >> h >> maxval;
    CHECK(magic == "P2");
    CHECK(maxval == 255);
    REQUIRE(static_cast<std::size_t>(h) == tr.rows.size());
    REQUIRE(static_cast<std::size_t>(w) == tr.rows[0].size());
    bool match = true;
    for (const auto& row : tr.rows)
      for (mca::State s : row) {
        int px = -1;
        pgm >> px;
        match = match && px == 255 * s / (tr.state_count - 1);
      }
    CHECK(match);
  }
}
