// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance [--only K] [--workdir DIR]

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vecproc/cli.hpp"
#include "vecproc/concentration.hpp"
#include "vecproc/covering.hpp"
#include "vecproc/dimension.hpp"
#include "vecproc/empirical_process.hpp"
#include "vecproc/entropy_bounds.hpp"
#include "vecproc/parallel.hpp"
#include "vecproc/rademacher.hpp"
#include "vecproc/regression.hpp"
#include "vecproc/rng.hpp"

using namespace vecproc;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240517;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void fail(Outcome& o, const std::string& why) {
  o.pass = false;
  o.detail += (o.detail.empty() ? "" : "; ") + why;
}

void note(Outcome& o, const std::string& what) { o.detail += (o.detail.empty() ? "" : "; ") + what; }

// 1 ---------------------------------------------------------------------------
Outcome counterexample() {
  Outcome o;
  const auto d = basis_dependence_demo();
  const double want_rot = 5.0 * std::sqrt(2.0);
  note(o, "standard=" + fmt("%.12g", d.standard.pattern_sum) + " rotated=" + fmt("%.12g", d.rotated.pattern_sum) +
              " (quoted 2 and " + fmt("%.12g", want_rot) + ")");
  if (std::abs(d.standard.pattern_sum - 2.0) > 1e-9) fail(o, "standard sum off");
  if (std::abs(d.rotated.pattern_sum - want_rot) > 1e-9) fail(o, "rotated sum is not 5 sqrt 2");
  if (d.standard.normalized == d.rotated.normalized) fail(o, "normalized values equal");
  if (std::abs(d.norm_standard - d.norm_rotated) > 1e-12) fail(o, "norm form depends on basis");
  return o;
}

// 2 ---------------------------------------------------------------------------
Outcome hoeffding() {
  Outcome o;
  const std::vector<double> c(50, 1.0);
  for (std::size_t dy : {1, 5, 20}) {
    const auto r = hoeffding_hilbert_check(dy, c, {0.5, 1, 2, 4}, 100000, derive_seed(kSeed, dy));
    double worst = -1.0;
    for (std::size_t k = 0; k < r.freqs.size(); ++k) worst = std::max(worst, r.freqs[k] - r.bounds[k]);
    note(o, "dY=" + std::to_string(dy) + " max(freq-bound)=" + fmt("%.4g", worst));
    if (!r.all_ok()) fail(o, "tail above bound for dY=" + std::to_string(dy));
  }
  return o;
}

// 3 ---------------------------------------------------------------------------
Outcome gaussian() {
  Outcome o;
  const std::vector<std::pair<std::string, CovarianceSpectrum>> spectra{
      {"geometric", CovarianceSpectrum::geometric(30)},
      {"uniform", CovarianceSpectrum::uniform(10)},
      {"single", CovarianceSpectrum::single()}};
  for (const auto& [name, s] : spectra) {
    for (const auto& r : gaussian_mgf_check(s, {0.1, 0.25, 0.4})) {
      if (!r.ok) fail(o, "mgf bound fails for " + name);
      if (name == "single" && std::abs(r.product - r.bound) > 1e-12) fail(o, "single-mode equality off");
    }
    const auto t = gaussian_tail_check(s, {1, 2, 3}, 100000, derive_seed(kSeed, name.size()));
    if (!t.all_ok()) fail(o, "tail above bound for " + name);
  }
  if (o.pass) note(o, "mgf and tails within bounds for 3 spectra");
  return o;
}

// 4 ---------------------------------------------------------------------------
Outcome covering_oracle() {
  Outcome o;
  Rng rng(kSeed, 4);
  std::size_t checked = 0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 1 + rng.below(10);
    std::vector<std::vector<double>> rows(n, std::vector<double>(2));
    for (auto& r : rows) {
      for (auto& v : r) v = rng.uniform();
    }
    const auto cloud = PointCloud::euclidean(rows);
    for (double d : {0.05, 0.1, 0.2, 0.35, 0.6}) {
      const auto g = greedy_cover(cloud, d);
      const auto ex = exact_cover_number(cloud, d);
      const auto pk = max_packing_number(cloud, d);
      const auto half = exact_cover_number(cloud, d / 2.0);
      ++checked;
      if (!cover_is_valid(cloud, g)) fail(o, "invalid greedy cover");
      if (ex > g.size()) fail(o, "exact cover larger than greedy");
      if (!(ex <= pk && pk <= half)) fail(o, "packing sandwich broken");
    }
  }
  note(o, std::to_string(checked) + " (cloud, delta) pairs");
  return o;
}

// 5 ---------------------------------------------------------------------------
Outcome smooth_cover() {
  Outcome o;
  const auto cls = generate_finite_dim_ball_class(1, 2, 2, 1.0, 200, kSeed);
  for (double delta : {0.1, 0.05}) {
    const auto sc = build_smooth_cover(cls, delta, 256, kSeed);
    const auto v = verify_cover_validity(cls, sc);
    BoundParams bp;
    bp.d = 1;
    bp.m = 2;
    bp.k_b = 1.0;
    bp.variant = AssouadVariant{9.0, 2.0};
    bp.delta = delta;
    const double bound = bound_assouad(bp);
    const double lo = std::log(static_cast<double>(sc.occupied_cells));
    note(o, "delta=" + fmt("%g", delta) + " cells=" + std::to_string(sc.occupied_cells) + " max_ratio=" +
                fmt("%.6f", v.max_ratio) + " log_cells=" + fmt("%.3f", lo) + " bound=" + fmt("%.1f", bound));
    if (v.max_ratio > 1.0 + 1e-9) fail(o, "same-signature pair farther than delta");
    if (lo > bound) fail(o, "occupied cells exceed the bound");
  }
  return o;
}

// 6 ---------------------------------------------------------------------------
std::size_t brute_cover(const PointCloud& c, double r) {
  const std::size_t n = c.size();
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
      bool all = true;
      for (std::size_t i = 0; i < n && all; ++i) {
        bool hit = false;
        for (std::size_t j = 0; j < n && !hit; ++j) hit = ((mask >> j) & 1U) && c.distance(i, j) <= r;
        all = hit;
      }
      if (all) return k;
    }
  }
  return n;
}

Outcome dimension() {
  Outcome o;
  Rng rng(kSeed, 6);
  std::vector<std::vector<double>> line, square;
  for (int i = 0; i < 1024; ++i) {
    const double t = rng.uniform();
    line.push_back({t / 3.0, 2.0 * t / 3.0, 2.0 * t / 3.0});
  }
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) square.push_back({(i + 0.5) / 64.0, (j + 0.5) / 64.0});
  }
  const auto lc = PointCloud::euclidean(line);
  const auto sq = PointCloud::euclidean(square);
  // fixed fit windows, 8 log-spaced radii each
  auto window = [](double lo, double hi) {
    std::vector<double> g;
    for (int k = 0; k < 8; ++k) g.push_back(hi * std::pow(lo / hi, k / 7.0));
    return g;
  };
  const double ls = box_dimension_estimate(lc, window(0.01, 0.1)).slope;
  const double ss = box_dimension_estimate(sq, window(0.03, 0.2)).slope;
  note(o, "line slope=" + fmt("%.4f", ls) + " square slope=" + fmt("%.4f", ss));
  if (ls < 0.9 || ls > 1.1) fail(o, "line slope out of range");
  if (ss < 1.8 || ss > 2.2) fail(o, "square slope out of range");

  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({rng.uniform(), rng.uniform()});
  const auto cloud = PointCloud::euclidean(pts);
  std::size_t exact = 0;
  for (double m : {1.0, 4.0, 16.0}) {
    const auto rep = homogeneity_check(cloud, m, 2.0, 200, derive_seed(kSeed, static_cast<std::uint64_t>(m)));
    for (const auto& t : rep.trials) {
      if (!t.exact) continue;
      ++exact;
      std::vector<std::size_t> local;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (cloud.distance(t.center, i) <= t.big_r) local.push_back(i);
      }
      const auto brute = brute_cover(cloud.subset(local), t.small_r);
      const bool verdict = static_cast<double>(brute) <= t.bound;
      if (brute != t.measured || verdict != t.ok) fail(o, "homogeneity verdict differs from brute force");
    }
  }
  note(o, std::to_string(exact) + " exact local balls compared");
  if (exact == 0) fail(o, "no local ball small enough for the exact comparison");
  return o;
}

// 7 ---------------------------------------------------------------------------
Outcome symmetrization() {
  Outcome o;
  const auto cls = generate_finite_dim_ball_class(1, 2, 3, 1.0, 20, kSeed);
  const auto r = symmetrization_check(cls, 200, 2000, derive_seed(kSeed, 7));
  note(o, "E dev=" + fmt("%.5f", r.mean_deviation) + " E ghost=" + fmt("%.5f", r.mean_ghost) +
              " 2 E sigma=" + fmt("%.5f", 2.0 * r.mean_sigma));
  if (!r.ok_ghost) fail(o, "ghost-sample inequality");
  if (!r.ok_sigma) fail(o, "Rademacher inequality");
  return o;
}

// 8 ---------------------------------------------------------------------------
Outcome chaining() {
  Outcome o;
  const auto cls = generate_finite_dim_ball_class(1, 2, 3, 1.0, 20, kSeed);
  const auto s = evaluate_on(cls, EmpiricalDesign::uniform(100, 1, derive_seed(kSeed, 8)));
  const auto plan = build_chaining_plan(s, default_chain_depth(100));
  const auto rad = chaining_tail_check(s, plan, {0.5, 1, 2}, 10000, derive_seed(kSeed, 81));
  const auto gau = gaussian_chaining_check(s, plan, CovarianceSpectrum::geometric(3), {0.5, 1, 2}, 10000,
                                           derive_seed(kSeed, 82));
  note(o, "S=" + std::to_string(plan.depth) + " J_n=" + fmt("%.4f", plan.j_n) + " max link ratio=" +
              fmt("%.4f", plan.max_link_ratio));
  if (!plan.links_ok) fail(o, "chain link longer than its radius");
  if (!rad.all_ok()) fail(o, "Rademacher chained tail");
  if (!gau.all_ok()) fail(o, "Gaussian chained tail");
  return o;
}

// 9 ---------------------------------------------------------------------------
Outcome regression() {
  Outcome o;
  RateConfig c;
  c.n_grid = {64, 256, 1024, 4096};
  c.reps = 200;
  c.seed = derive_seed(kSeed, 9);
  const auto fit = rate_experiment(c);
  note(o, "slope=" + fmt("%.4f", fit.slope));
  for (const auto& r : fit.rows) {
    note(o, "n=" + std::to_string(r.n) + " median=" + fmt("%.4f", r.median_error) + " exceed=" +
                fmt("%.3f", r.coverage_freq));
  }
  if (!fit.basic_ok()) fail(o, "basic inequality violated");
  if (!fit.coverage_ok()) fail(o, "coverage above bound");
  if (std::abs(fit.slope + 1.0 / 3.0) > 0.15) fail(o, "slope outside -1/3 +- 0.15");
  return o;
}

// 10 --------------------------------------------------------------------------
Outcome contraction() {
  Outcome o;
  const auto cls = generate_finite_dim_ball_class(1, 1, 2, 1.0, 10, kSeed);
  const auto s = evaluate_on(cls, EmpiricalDesign::uniform(16, 1, derive_seed(kSeed, 10)));
  Rng rng(kSeed, 10);
  std::vector<HPoint> targets;
  for (int i = 0; i < 16; ++i) targets.push_back(HPoint{rng.uniform(-1, 1), rng.uniform(-1, 1)});
  std::vector<double> grid;
  for (int k = 0; k < 8; ++k) grid.push_back(0.8 * std::pow(0.6, k));
  const auto rep = lipschitz_contraction_check(s, 1.0, 1.0, targets, grid);
  if (!rep.all_ok) fail(o, "N(c delta, L o G) > N(delta, G)");
  std::size_t stated = 0, relaxed = 0;
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto c = generate_finite_dim_ball_class(1, 1, 2, 1.0, 15, derive_seed(kSeed, 100 + k));
    const auto sk = evaluate_on(c, EmpiricalDesign::uniform(16, 1, derive_seed(kSeed, 200 + k)));
    const auto r = rademacher_entropy_bound_check(sk, 5);
    stated += r.ok;
    relaxed += r.ok_log2;
    worst = std::max(worst, r.estimate.value / r.bound);
  }
  note(o, "entropy bound held on " + std::to_string(stated) + "/20 classes (" + std::to_string(relaxed) +
              "/20 with H >= log 2); max estimate/bound=" + fmt("%.3f", worst));
  if (stated != 20) fail(o, "Rademacher estimate above the entropy bound");
  return o;
}

// 11 --------------------------------------------------------------------------
std::map<std::string, std::string> csv_bodies(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

Outcome determinism(const fs::path& work) {
  Outcome o;
  const std::vector<std::vector<std::string>> commands{
      {"demo-counterexample"},
      {"concentration", "--check", "hoeffding-hilbert", "--n", "50", "--dy", "1", "--reps", "100000"},
      {"concentration", "--check", "hoeffding-hilbert", "--n", "50", "--dy", "5", "--reps", "100000"},
      {"concentration", "--check", "hoeffding-hilbert", "--n", "50", "--dy", "20", "--reps", "100000"},
      {"concentration", "--check", "mgf", "--spectrum", "geometric"},
      {"concentration", "--check", "gaussian-tail", "--spectrum", "geometric"},
      {"concentration", "--check", "gaussian-tail", "--spectrum", "uniform", "--modes", "10"},
      {"concentration", "--check", "gaussian-tail", "--spectrum", "single"},
      {"cover", "--points", "10", "--clouds", "200", "--delta", "0.05,0.1,0.2,0.35,0.6"},
      {"smooth-cover", "--members", "200", "--delta", "0.1,0.05"},
      {"dimension", "--shape", "line", "--points", "1024", "--hom-m", "4", "--hom-tau", "1"},
      {"dimension", "--shape", "square", "--side", "64"},
      {"symmetrize", "--members", "20", "--n", "200", "--reps", "2000"},
      {"chain", "--members", "20", "--n", "100", "--reps", "10000"},
      {"regress"},
      {"erm", "--reps", "100"},
      {"bounds", "--contraction"},
      {"rademacher", "--members", "15", "--n", "16", "--S", "5", "--dy", "2"},
  };
  std::size_t files = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::vector<fs::path> dirs;
    std::vector<int> codes;
    for (const char* threads : {"1", "4"}) {
      const auto dir = work / ("det" + std::to_string(c) + "_t" + threads);
      fs::remove_all(dir);
      auto args = commands[c];
      args.insert(args.end(), {"--seed", std::to_string(kSeed), "--threads", threads, "--out", dir.string()});
      codes.push_back(run(args));
      dirs.push_back(dir);
    }
    set_worker_count(0);
    const std::string name = commands[c][0] + (commands[c].size() > 2 ? " " + commands[c][2] : "");
    if (codes[0] != codes[1]) fail(o, name + ": exit codes differ");
    if (codes[0] != kExitOk && codes[0] != kExitCheckFailed) fail(o, name + ": exit " + std::to_string(codes[0]));
    const auto a = csv_bodies(dirs[0]), b = csv_bodies(dirs[1]);
    files += a.size();
    if (a.empty() || a != b) fail(o, name + ": CSV bodies differ between 1 and 4 threads");
  }
  note(o, std::to_string(commands.size()) + " runs, " + std::to_string(files) + " CSV files compared");
  return o;
}

struct Criterion {
  const char* name;
  double limit_seconds;
  std::function<Outcome()> body;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  fs::path work = fs::temp_directory_path() / "vecproc_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (a == "--workdir" && i + 1 < argc) {
      work = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--only K] [--workdir DIR]\n");
      return 2;
    }
  }
  fs::create_directories(work);
  const std::vector<Criterion> criteria{
      {"counterexample exactness", 1.0, counterexample},
      {"Hilbert Hoeffding tails", 60.0, hoeffding},
      {"Gaussian mgf and tails", 30.0, gaussian},
      {"covering oracle equivalence", 60.0, covering_oracle},
      {"constructive smooth cover", 300.0, smooth_cover},
      {"dimension estimation", 60.0, dimension},
      {"symmetrization", 120.0, symmetrization},
      {"chaining tails", 120.0, chaining},
      {"least-squares regression", 600.0, regression},
      {"Lipschitz contraction and entropy bound", 120.0, contraction},
      {"determinism across thread counts", 1e9, [&] { return determinism(work); }},
  };
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<std::size_t>(only) != k + 1) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > criteria[k].limit_seconds) fail(o, "runtime " + fmt("%.1f", secs) + " s over the limit");
    all = all && o.pass;
    std::printf("%s %2zu %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
