#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "vecproc/cli.hpp"

using namespace vecproc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("vecproc_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2") {
    CHECK(run({}) == kExitInvalid);
    CHECK(run({"no-such-command"}) == kExitInvalid);
    CHECK(run({"cover", "--bogus", "1"}) == kExitInvalid);
    CHECK(run({"cover", "--delta", "-1", "--out", scratch("neg").string()}) == kExitInvalid);
    CHECK(run({"cover", "--delta", "abc", "--out", scratch("abc").string()}) == kExitInvalid);
    CHECK(run({"cover", "--input", "/nonexistent/points.csv", "--out", scratch("missing").string()}) == kExitInvalid);
  }

  TEST_CASE("cover writes tables and a manifest") {
    const auto out = scratch("cover");
    CHECK(run({"cover", "--points", "8", "--clouds", "3", "--delta", "0.2,0.4", "--out", out.string()}) == kExitOk);
    CHECK(fs::exists(out / "cover.csv"));
    const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(m["command"] == "cover");
    CHECK(m["all_ok"] == true);
    CHECK(m["outputs"].size() == 2);
    const auto csv = slurp(out / "cover.csv");
    CHECK(csv.rfind("cloud,delta,points,greedy", 0) == 0);
  }

  TEST_CASE("cover reads a point file") {
    const auto dir = scratch("input");
    fs::create_directories(dir);
    std::ofstream(dir / "pts.csv") << "x,y\n0,0\n1,0\n0,1\n5,5\n";
    CHECK(run({"cover", "--input", (dir / "pts.csv").string(), "--delta", "1.5", "--out", (dir / "run").string()}) ==
          kExitOk);
  }

  TEST_CASE("same seed, different thread counts, same bytes") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    CHECK(run({"concentration", "--check", "hoeffding-hilbert", "--n", "20", "--dy", "3", "--reps", "20000",
               "--threads", "1", "--out", a.string()}) == kExitOk);
    CHECK(run({"concentration", "--check", "hoeffding-hilbert", "--n", "20", "--dy", "3", "--reps", "20000",
               "--threads", "4", "--out", b.string()}) == kExitOk);
    CHECK(slurp(a / "tail.csv") == slurp(b / "tail.csv"));
  }

  TEST_CASE("environment seed overrides the flag") {
    const auto a = scratch("env_a"), b = scratch("env_b");
    ::setenv("VECPROC_SEED", "42", 1);
    CHECK(run({"concentration", "--check", "hoeffding-real", "--n", "10", "--reps", "20000", "--seed", "1", "--out",
               a.string()}) == kExitOk);
    ::unsetenv("VECPROC_SEED");
    CHECK(run({"concentration", "--check", "hoeffding-real", "--n", "10", "--reps", "20000", "--seed", "42", "--out",
               b.string()}) == kExitOk);
    CHECK(slurp(a / "tail.csv") == slurp(b / "tail.csv"));
    const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
    CHECK(m["seed"] == 42);
  }

  TEST_CASE("default output directory") {
    const auto cwd = fs::current_path();
    const auto dir = scratch("default_out");
    fs::create_directories(dir);
    fs::current_path(dir);
    CHECK(run({"concentration", "--check", "mgf", "--seed", "9"}) == kExitOk);
    CHECK(fs::exists(dir / "runs" / "concentration-9" / "mgf.csv"));
    fs::current_path(cwd);
  }

  TEST_CASE("demo reports the exact sums") {
    const auto out = scratch("demo");
    const int code = run({"demo-counterexample", "--out", out.string()});
    // the rotated sum differs from the quoted value, so a check fails
    CHECK(code == kExitCheckFailed);
    const auto j = nlohmann::json::parse(slurp(out / "counterexample.json"));
    CHECK(j["standard"]["pattern_sum"].get<double>() == doctest::Approx(2.0));
    CHECK(j["dependent"] == true);
  }

  TEST_CASE("small runs of every other subcommand") {
    CHECK(run({"smooth-cover", "--members", "30", "--delta", "0.2", "--b-samples", "32", "--out",
               scratch("smooth").string()}) == kExitOk);
    CHECK(run({"dimension", "--shape", "line", "--points", "300", "--expect", "0.8,1.2", "--out",
               scratch("dim").string()}) == kExitOk);
    CHECK(run({"bounds", "--variant", "box", "--contraction", "--out", scratch("bounds").string()}) == kExitOk);
    CHECK(run({"symmetrize", "--members", "5", "--n", "40", "--reps", "1000", "--out", scratch("sym").string()}) ==
          kExitOk);
    CHECK(run({"chain", "--members", "8", "--n", "40", "--reps", "2000", "--out", scratch("chain").string()}) ==
          kExitOk);
    CHECK(run({"gc", "--members", "5", "--n", "25,400", "--reps", "50", "--out", scratch("gc").string()}) == kExitOk);
    CHECK(run({"erm", "--n", "100", "--reps", "20", "--sign-draws", "16", "--out", scratch("erm").string()}) ==
          kExitOk);
    CHECK(run({"rademacher", "--members", "5", "--n", "6", "--dy", "2", "--out", scratch("rad").string()}) == kExitOk);
    CHECK(run({"regress", "--n", "64,512", "--reps", "20", "--out", scratch("reg").string()}) != kExitInvalid);
    CHECK(run({"regress", "--t", "0.1", "--out", scratch("reg_bad").string()}) == kExitInvalid);
  }
}
