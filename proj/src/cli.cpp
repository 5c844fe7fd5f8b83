#include "vecproc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "vecproc/concentration.hpp"
#include "vecproc/covering.hpp"
#include "vecproc/dimension.hpp"
#include "vecproc/empirical_process.hpp"
#include "vecproc/entropy_bounds.hpp"
#include "vecproc/function_class.hpp"
#include "vecproc/parallel.hpp"
#include "vecproc/rademacher.hpp"
#include "vecproc/regression.hpp"
#include "vecproc/report.hpp"
#include "vecproc/rng.hpp"

namespace vecproc {

namespace {

using nlohmann::json;

std::vector<double> parse_doubles(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, end - pos);
    char* stop = nullptr;
    const double v = std::strtod(item.c_str(), &stop);
    if (item.empty() || stop != item.c_str() + item.size() || !std::isfinite(v)) {
      throw std::invalid_argument(flag + ": cannot parse '" + item + "' as a number");
    }
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> out;
  for (double v : parse_doubles(text, flag)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw std::invalid_argument(flag + ": expected positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

Cell na() { return std::string(); }

struct ClassOpts {
  std::string kind = "ball";
  int d = 1;
  int m = 2;
  std::size_t dy = 3;
  double kb = 1.0;
  std::size_t members = 20;
  int resolution = 0;
  std::size_t rank = 2;
  int out_dim = 1;
  int out_order = 1;
  int out_grid = 33;

  void add_to(CLI::App* app, std::size_t default_members) {
    members = default_members;
    app->add_option("--class", kind, "ball, span or smooth-output")->capture_default_str();
    app->add_option("--d", d, "input dimension")->capture_default_str();
    app->add_option("--m", m, "smoothness order")->capture_default_str();
    app->add_option("--dy", dy, "output dimension")->capture_default_str();
    app->add_option("--kb", kb, "bound K_B on derivative values")->capture_default_str();
    app->add_option("--members", members, "class size")->capture_default_str();
    app->add_option("--resolution", resolution, "grid nodes per axis (0 = automatic)")->capture_default_str();
    app->add_option("--rank", rank, "span dimension for --class span")->capture_default_str();
    app->add_option("--out-dim", out_dim, "output-function input dimension")->capture_default_str();
    app->add_option("--out-order", out_order, "output-function smoothness")->capture_default_str();
    app->add_option("--out-grid", out_grid, "output-function grid nodes per axis")->capture_default_str();
  }

  json params() const {
    json j;
    j["class"] = kind;
    j["d"] = d;
    j["m"] = m;
    j["dy"] = dy;
    j["kb"] = kb;
    j["members"] = members;
    j["resolution"] = resolution;
    if (kind == "span") j["rank"] = rank;
    if (kind == "smooth-output") {
      j["out_dim"] = out_dim;
      j["out_order"] = out_order;
      j["out_grid"] = out_grid;
    }
    return j;
  }

  FunctionClass make(std::uint64_t seed) const {
    GeneratorOptions g;
    g.resolution = resolution;
    if (kind == "ball") return generate_finite_dim_ball_class(d, m, dy, kb, members, seed, g);
    if (kind == "span") {
      if (rank == 0 || rank > dy) throw std::invalid_argument("--rank must lie in [1, dy]");
      std::vector<HPoint> psi;
      for (std::size_t k = 0; k < rank; ++k) psi.push_back(HPoint::unit(dy, k));
      return generate_span_class(d, m, psi, kb, members, seed, g);
    }
    if (kind == "smooth-output") return generate_smooth_output_class(d, m, out_dim, out_order, kb, out_grid, members, seed, g);
    throw std::invalid_argument("--class must be ball, span or smooth-output");
  }
};

// Streams derived from the run seed, one per purpose.
enum Stream : std::uint64_t { kClassStream = 1, kDesignStream = 2, kMcStream = 3, kExtraStream = 4 };

std::uint64_t stream_seed(std::uint64_t seed, Stream s) { return derive_seed(seed, s); }

struct Run {
  std::string command;
  std::uint64_t seed = 1;
  std::string out;
  json params;
  std::function<void(RunRecorder&)> body;
};

// ---------------------------------------------------------------------------

PointCloud random_cloud(std::size_t points, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows(points, std::vector<double>(dim));
  for (auto& r : rows) {
    for (auto& v : r) v = rng.uniform();
  }
  return PointCloud::euclidean(std::move(rows));
}

PointCloud shape_cloud(const std::string& shape, std::size_t points, std::size_t side, std::uint64_t seed) {
  std::vector<std::vector<double>> rows;
  if (shape == "line") {
    Rng rng(seed);
    for (std::size_t i = 0; i < points; ++i) {
      const double t = rng.uniform();
      rows.push_back({t / 3.0, 2.0 * t / 3.0, 2.0 * t / 3.0});
    }
  } else if (shape == "square") {
    for (std::size_t i = 0; i < side; ++i) {
      for (std::size_t j = 0; j < side; ++j) {
        rows.push_back({(static_cast<double>(i) + 0.5) / static_cast<double>(side),
                        (static_cast<double>(j) + 0.5) / static_cast<double>(side)});
      }
    }
  } else if (shape == "cube") {
    return random_cloud(points, 3, seed);
  } else {
    throw std::invalid_argument("--shape must be line, square or cube");
  }
  return PointCloud::euclidean(std::move(rows));
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"vecproc: numerical lab for empirical processes of Hilbert-valued functions"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = 0;
  app.add_option("--seed", seed, "base seed (VECPROC_SEED overrides)")->capture_default_str();
  app.add_option("--out", out, "output directory (default runs/<command>-<seed>)");
  app.add_option("--threads", threads, "worker cap (0 = all cores)")->capture_default_str();

  Run job;

  // cover ------------------------------------------------------------------
  auto* cover = app.add_subcommand("cover", "greedy and exact covers of a point cloud");
  std::string cover_input, cover_delta = "0.1,0.2,0.3,0.5";
  std::size_t cover_points = 10, cover_dim = 2, cover_clouds = 1;
  cover->add_option("--input", cover_input, "CSV file, one point per row");
  cover->add_option("--points", cover_points, "points per generated cloud")->capture_default_str();
  cover->add_option("--dim", cover_dim, "dimension of generated clouds")->capture_default_str();
  cover->add_option("--clouds", cover_clouds, "number of generated clouds")->capture_default_str();
  cover->add_option("--delta", cover_delta, "comma-separated radii")->capture_default_str();
  cover->callback([&] {
    job.command = "cover";
    job.params = {{"input", cover_input}, {"points", cover_points}, {"dim", cover_dim},
                  {"clouds", cover_clouds}, {"delta", cover_delta}};
    job.body = [&](RunRecorder& rec) {
      const auto deltas = parse_doubles(cover_delta, "--delta");
      for (double dl : deltas) {
        if (!(dl > 0.0)) throw std::invalid_argument("--delta must be positive");
      }
      std::vector<PointCloud> clouds;
      if (!cover_input.empty()) {
        clouds.push_back(read_point_csv(cover_input));
      } else {
        if (cover_points == 0 || cover_dim == 0) throw std::invalid_argument("--points and --dim must be positive");
        for (std::size_t c = 0; c < cover_clouds; ++c) {
          clouds.push_back(random_cloud(cover_points, cover_dim, derive_seed(stream_seed(job.seed, kDesignStream), c)));
        }
      }
      Csv table({"cloud", "delta", "points", "greedy", "greedy_valid", "exact", "packing", "exact_half", "oracle_ok"});
      Csv centers({"cloud", "delta", "rank", "index"});
      bool valid = true, oracle = true;
      for (std::size_t c = 0; c < clouds.size(); ++c) {
        const auto& cloud = clouds[c];
        for (double dl : deltas) {
          const auto g = greedy_cover(cloud, dl);
          const bool ok_valid = cover_is_valid(cloud, g);
          valid = valid && ok_valid;
          for (std::size_t r = 0; r < g.size(); ++r) {
            centers.row({static_cast<long long>(c), dl, static_cast<long long>(r),
                         static_cast<long long>(g.center_indices[r])});
          }
          if (cloud.size() <= kExactLimit) {
            const auto ex = exact_cover_number(cloud, dl);
            const auto pk = max_packing_number(cloud, dl);
            const auto half = exact_cover_number(cloud, dl / 2.0);
            const bool ok = ex <= g.size() && ex <= pk && pk <= half;
            oracle = oracle && ok;
            table.row({static_cast<long long>(c), dl, static_cast<long long>(cloud.size()),
                       static_cast<long long>(g.size()), ok_valid, static_cast<long long>(ex),
                       static_cast<long long>(pk), static_cast<long long>(half), ok});
          } else {
            table.row({static_cast<long long>(c), dl, static_cast<long long>(cloud.size()),
                       static_cast<long long>(g.size()), ok_valid, na(), na(), na(), na()});
          }
        }
      }
      rec.emit_csv("cover.csv", table);
      rec.emit_csv("centers.csv", centers);
      rec.check("greedy_valid", valid);
      rec.check("oracle_sandwich", oracle);
    };
  });

  // smooth-cover -----------------------------------------------------------
  auto* smooth = app.add_subcommand("smooth-cover", "constructive piecewise-polynomial cover of a smooth class");
  ClassOpts smooth_cls;
  smooth_cls.d = 1;
  smooth_cls.m = 2;
  smooth_cls.dy = 2;
  smooth_cls.add_to(smooth, 200);
  std::string smooth_delta = "0.1,0.05";
  std::size_t b_samples = 256;
  smooth->add_option("--delta", smooth_delta, "comma-separated radii in (0,1)")->capture_default_str();
  smooth->add_option("--b-samples", b_samples, "extra points of B per level cover")->capture_default_str();
  smooth->callback([&] {
    job.command = "smooth-cover";
    job.params = smooth_cls.params();
    job.params["delta"] = smooth_delta;
    job.params["b_samples"] = b_samples;
    job.body = [&](RunRecorder& rec) {
      if (smooth_cls.kind != "ball") throw std::invalid_argument("smooth-cover: only --class ball has known (M, tau)");
      const auto deltas = parse_doubles(smooth_delta, "--delta");
      const auto cls = smooth_cls.make(stream_seed(job.seed, kClassStream));
      // a ball in R^k is (3^k, k)-homogeneous
      const double tau = static_cast<double>(smooth_cls.dy);
      const double big_m = std::pow(3.0, tau);
      Csv table({"delta", "k1", "big_delta", "net_size", "occupied_cells", "log_occupied", "bound_assouad",
                 "pairs_checked", "max_ratio", "valid", "within_bound"});
      bool valid = true, within = true;
      for (double dl : deltas) {
        const auto sc = build_smooth_cover(cls, dl, b_samples, stream_seed(job.seed, kExtraStream));
        const auto v = verify_cover_validity(cls, sc);
        BoundParams bp;
        bp.d = smooth_cls.d;
        bp.m = smooth_cls.m;
        bp.k_b = smooth_cls.kb;
        bp.variant = AssouadVariant{big_m, tau};
        bp.delta = dl;
        const double bound = bound_assouad(bp);
        const double log_occ = std::log(static_cast<double>(sc.occupied_cells));
        const bool ok_v = v.max_ratio <= 1.0 + 1e-9;
        const bool ok_b = log_occ <= bound;
        valid = valid && ok_v;
        within = within && ok_b;
        table.row({dl, sc.plan.k1, sc.plan.big_delta, static_cast<long long>(sc.plan.net_size()),
                   static_cast<long long>(sc.occupied_cells), log_occ, bound, static_cast<long long>(v.pairs_checked),
                   v.max_ratio, ok_v, ok_b});
      }
      rec.emit_csv("smooth_cover.csv", table);
      rec.check("same_signature_within_delta", valid);
      rec.check("log_cells_within_assouad_bound", within);
    };
  });

  // dimension --------------------------------------------------------------
  auto* dim = app.add_subcommand("dimension", "box-counting slope and homogeneity checks");
  std::string dim_input, dim_shape = "line", dim_expect;
  std::size_t dim_points = 1024, dim_side = 64, dim_trials = 50, dim_grid = 8;
  double hom_m = 0.0, hom_tau = -1.0;
  dim->add_option("--input", dim_input, "CSV file, one point per row");
  dim->add_option("--shape", dim_shape, "generated sample: line, square or cube")->capture_default_str();
  dim->add_option("--points", dim_points, "points for line and cube")->capture_default_str();
  dim->add_option("--side", dim_side, "grid side for square")->capture_default_str();
  dim->add_option("--grid", dim_grid, "number of radii")->capture_default_str();
  dim->add_option("--expect", dim_expect, "lo,hi: check the fitted slope lies in [lo, hi]");
  dim->add_option("--hom-m", hom_m, "M for the homogeneity check (0 = skip)");
  dim->add_option("--hom-tau", hom_tau, "tau for the homogeneity check");
  dim->add_option("--trials", dim_trials, "homogeneity trials")->capture_default_str();
  dim->callback([&] {
    job.command = "dimension";
    job.params = {{"input", dim_input}, {"shape", dim_shape}, {"points", dim_points}, {"side", dim_side},
                  {"grid", dim_grid}, {"expect", dim_expect}, {"hom_m", hom_m}, {"hom_tau", hom_tau},
                  {"trials", dim_trials}};
    job.body = [&](RunRecorder& rec) {
      const PointCloud cloud = dim_input.empty()
                                   ? shape_cloud(dim_shape, dim_points, dim_side, stream_seed(job.seed, kDesignStream))
                                   : read_point_csv(dim_input);
      const auto fit = box_dimension_estimate(cloud, default_delta_grid(cloud, dim_grid));
      Csv box({"delta", "entropy"});
      for (std::size_t i = 0; i < fit.delta_grid.size(); ++i) box.row({fit.delta_grid[i], fit.entropies[i]});
      rec.emit_csv("box.csv", box);
      const auto est = assouad_estimate(cloud, stream_seed(job.seed, kMcStream));
      json summary = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"points", cloud.size()},
                      {"assouad_m", est.m}, {"assouad_tau", est.tau}, {"assouad_trials", est.trials}};
      if (!dim_expect.empty()) {
        const auto lohi = parse_doubles(dim_expect, "--expect");
        if (lohi.size() != 2) throw std::invalid_argument("--expect takes lo,hi");
        rec.check("slope_in_range", fit.slope >= lohi[0] && fit.slope <= lohi[1]);
      }
      if (hom_m > 0.0) {
        if (!(hom_tau >= 0.0)) throw std::invalid_argument("--hom-tau must be nonnegative");
        const auto h = homogeneity_check(cloud, hom_m, hom_tau, dim_trials, stream_seed(job.seed, kExtraStream));
        Csv trials({"center", "big_r", "small_r", "local_points", "measured", "exact", "bound", "ok"});
        for (const auto& t : h.trials) {
          trials.row({static_cast<long long>(t.center), t.big_r, t.small_r, static_cast<long long>(t.local_points),
                      static_cast<long long>(t.measured), t.exact, t.bound, t.ok});
        }
        rec.emit_csv("homogeneity.csv", trials);
        summary["homogeneity_all_ok"] = h.all_ok;
        rec.check("homogeneity", h.all_ok);
      }
      rec.emit_json("dimension.json", summary);
    };
  });

  // bounds -----------------------------------------------------------------
  auto* bounds = app.add_subcommand("bounds", "closed-form entropy bounds and the Lipschitz contraction");
  double b_bigm = 1.0, b_tau = 1.0, b_h = 2.0;
  std::string b_variant = "assouad", b_delta = "0.2,0.1,0.05,0.02,0.01";
  bool contraction = false;
  ClassOpts con_cls;
  std::size_t con_n = 16;
  double con_cap = 1.0, con_c = 1.0;
  bounds->add_option("--variant", b_variant, "assouad, box, exp or rkhs")->capture_default_str();
  bounds->add_option("--M", b_bigm, "homogeneity constant M")->capture_default_str();
  bounds->add_option("--tau", b_tau, "exponent tau")->capture_default_str();
  bounds->add_option("--kernel-h", b_h, "kernel smoothness for rkhs")->capture_default_str();
  bounds->add_option("--delta", b_delta, "comma-separated radii")->capture_default_str();
  bounds->add_flag("--contraction", contraction, "also run the covering contraction check on a class");
  con_cls.add_to(bounds, 10);
  bounds->add_option("--n", con_n, "design size for the contraction check")->capture_default_str();
  bounds->add_option("--cap", con_cap, "loss cap")->capture_default_str();
  bounds->add_option("--loss-c", con_c, "Lipschitz constant of the loss")->capture_default_str();
  bounds->callback([&] {
    job.command = "bounds";
    job.params = {{"d", con_cls.d}, {"m", con_cls.m}, {"kb", con_cls.kb}, {"variant", b_variant}, {"M", b_bigm}, {"tau", b_tau},
                  {"h", b_h}, {"delta", b_delta}, {"contraction", contraction}};
    if (contraction) {
      job.params["class"] = con_cls.params();
      job.params["n"] = con_n;
      job.params["cap"] = con_cap;
      job.params["loss_c"] = con_c;
    }
    job.body = [&](RunRecorder& rec) {
      BoundParams bp;
      bp.d = con_cls.d;
      bp.m = con_cls.m;
      bp.k_b = con_cls.kb;
      if (b_variant == "assouad") bp.variant = AssouadVariant{b_bigm, b_tau};
      else if (b_variant == "box") bp.variant = BoxVariant{b_tau};
      else if (b_variant == "exp") bp.variant = ExpVariant{b_bigm, b_tau};
      else if (b_variant == "rkhs") bp.variant = RkhsVariant{b_bigm, b_h};
      else throw std::invalid_argument("--variant must be assouad, box, exp or rkhs");
      // implied_k: the K in K delta^{-exponent} that matches the raw value at this delta
      Csv table({"variant", "delta", "net_count", "log_bound", "exponent", "implied_k"});
      for (double dl : parse_doubles(b_delta, "--delta")) {
        bp.delta = dl;
        const double raw = bound_value(bp), ex = bound_exponent(bp);
        table.row({variant_name(bp.variant), dl, net_count(con_cls.d, con_cls.m, con_cls.kb, dl), raw, ex,
                   raw * std::pow(dl, ex)});
      }
      rec.emit_csv("bounds.csv", table);
      if (contraction) {
        const auto cls = con_cls.make(stream_seed(job.seed, kClassStream));
        const auto design = EmpiricalDesign::uniform(con_n, cls.input_dim(), stream_seed(job.seed, kDesignStream));
        const auto sample = evaluate_on(cls, design);
        Rng rng(stream_seed(job.seed, kExtraStream));
        std::vector<HPoint> targets;
        for (std::size_t i = 0; i < con_n; ++i) {
          HPoint y(cls.dim_y());
          for (std::size_t k = 0; k < cls.dim_y(); ++k) y[k] = rng.uniform(-con_cls.kb, con_cls.kb);
          targets.push_back(y);
        }
        std::vector<double> grid;
        for (int k = 0; k < 8; ++k) grid.push_back(0.8 * std::pow(0.6, k));
        const auto rep = lipschitz_contraction_check(sample, con_c, con_cap, targets, grid);
        Csv c({"delta", "loss_cover", "class_cover", "ok"});
        for (const auto& r : rep.rows) {
          c.row({r.delta, static_cast<long long>(r.loss_cover), static_cast<long long>(r.class_cover), r.ok});
        }
        rec.emit_csv("contraction.csv", c);
        rec.check("contraction", rep.all_ok);
      }
    };
  });

  // concentration ----------------------------------------------------------
  auto* conc = app.add_subcommand("concentration", "Hoeffding and Gaussian concentration checks");
  std::string conc_check = "hoeffding-hilbert", conc_t = "0.5,1,2,4", conc_lambda = "0.1,0.25,0.4",
              conc_a = "1,2,3", conc_spectrum = "geometric";
  std::size_t conc_n = 50, conc_dy = 5, conc_reps = 100000, conc_modes = 30;
  double conc_c = 1.0;
  conc->add_option("--check", conc_check, "hoeffding-real, hoeffding-hilbert, cosh, mgf or gaussian-tail")
      ->capture_default_str();
  conc->add_option("--n", conc_n, "number of summands")->capture_default_str();
  conc->add_option("--dy", conc_dy, "output dimension")->capture_default_str();
  conc->add_option("--c", conc_c, "common bound c_i")->capture_default_str();
  conc->add_option("--t", conc_t, "comma-separated t values")->capture_default_str();
  conc->add_option("--lambda", conc_lambda, "comma-separated lambda values")->capture_default_str();
  conc->add_option("--a", conc_a, "comma-separated levels for gaussian-tail")->capture_default_str();
  conc->add_option("--spectrum", conc_spectrum, "geometric, uniform or single")->capture_default_str();
  conc->add_option("--modes", conc_modes, "number of modes")->capture_default_str();
  conc->add_option("--reps", conc_reps, "Monte Carlo replicates")->capture_default_str();
  conc->callback([&] {
    job.command = "concentration";
    job.params = {{"check", conc_check}, {"n", conc_n}, {"dy", conc_dy}, {"c", conc_c}, {"t", conc_t},
                  {"lambda", conc_lambda}, {"a", conc_a}, {"spectrum", conc_spectrum}, {"modes", conc_modes},
                  {"reps", conc_reps}};
    job.body = [&](RunRecorder& rec) {
      const auto mc_seed = stream_seed(job.seed, kMcStream);
      const auto spectrum = [&] {
        if (conc_spectrum == "geometric") return CovarianceSpectrum::geometric(conc_modes);
        if (conc_spectrum == "uniform") return CovarianceSpectrum::uniform(conc_modes);
        if (conc_spectrum == "single") return CovarianceSpectrum::single();
        throw std::invalid_argument("--spectrum must be geometric, uniform or single");
      };
      if (conc_n == 0) throw std::invalid_argument("--n must be positive");
      const std::vector<double> c(conc_n, conc_c);
      if (conc_check == "hoeffding-real" || conc_check == "hoeffding-hilbert") {
        const auto t = parse_doubles(conc_t, "--t");
        const auto r = conc_check == "hoeffding-real" ? hoeffding_real_check(c, t, conc_reps, mc_seed)
                                                      : hoeffding_hilbert_check(conc_dy, c, t, conc_reps, mc_seed);
        rec.emit_csv("tail.csv", tail_csv(r));
        rec.emit_json("tail.json", tail_json(r));
        rec.check("tail_bound", r.all_ok());
      } else if (conc_check == "cosh") {
        const auto r = cosh_moment_check(conc_dy, c, parse_doubles(conc_lambda, "--lambda"), conc_reps, mc_seed);
        Csv table({"lambda", "mean", "se", "bound", "inconclusive", "ok"});
        for (const auto& row : r.rows) table.row({row.lambda, row.mean, row.se, row.bound, row.inconclusive, row.ok});
        rec.emit_csv("cosh.csv", table);
        rec.check("cosh_moment", r.all_ok());
      } else if (conc_check == "mgf") {
        const auto rows = gaussian_mgf_check(spectrum(), parse_doubles(conc_lambda, "--lambda"));
        Csv table({"lambda", "product", "bound", "ok"});
        bool ok = true;
        for (const auto& row : rows) {
          table.row({row.lambda, row.product, row.bound, row.ok});
          ok = ok && row.ok;
        }
        rec.emit_csv("mgf.csv", table);
        rec.check("mgf_bound", ok);
      } else if (conc_check == "gaussian-tail") {
        const auto r = gaussian_tail_check(spectrum(), parse_doubles(conc_a, "--a"), conc_reps, mc_seed);
        rec.emit_csv("tail.csv", tail_csv(r));
        rec.emit_json("tail.json", tail_json(r));
        rec.check("tail_bound", r.all_ok());
      } else {
        throw std::invalid_argument("--check must be hoeffding-real, hoeffding-hilbert, cosh, mgf or gaussian-tail");
      }
    };
  });

  // symmetrize -------------------------------------------------------------
  auto* sym = app.add_subcommand("symmetrize", "ghost-sample and Rademacher symmetrization in expectation and tails");
  ClassOpts sym_cls;
  sym_cls.add_to(sym, 20);
  std::size_t sym_n = 200, sym_reps = 2000;
  std::string sym_a;
  sym->add_option("--n", sym_n, "sample size")->capture_default_str();
  sym->add_option("--reps", sym_reps, "replicates")->capture_default_str();
  sym->add_option("--a", sym_a, "comma-separated levels for the tail comparison");
  sym->callback([&] {
    job.command = "symmetrize";
    job.params = sym_cls.params();
    job.params["n"] = sym_n;
    job.params["reps"] = sym_reps;
    job.params["a"] = sym_a;
    job.body = [&](RunRecorder& rec) {
      const auto cls = sym_cls.make(stream_seed(job.seed, kClassStream));
      const auto a = sym_a.empty() ? std::vector<double>{} : parse_doubles(sym_a, "--a");
      const auto r = symmetrization_check(cls, sym_n, sym_reps, stream_seed(job.seed, kMcStream), a);
      Csv summary({"n", "reps", "mean_deviation", "mean_ghost", "mean_sigma", "se_ghost", "se_sigma", "ok_ghost",
                   "ok_sigma"});
      summary.row({static_cast<long long>(r.n), static_cast<long long>(r.reps), r.mean_deviation, r.mean_ghost,
                   r.mean_sigma, r.se_ghost, r.se_sigma, r.ok_ghost, r.ok_sigma});
      rec.emit_csv("symmetrization.csv", summary);
      if (!r.tails.empty()) {
        Csv tails({"a", "premise", "premise_ok", "p_deviation", "p_symmetrized", "se", "ok"});
        for (const auto& t : r.tails) tails.row({t.a, t.premise, t.premise_ok, t.p_deviation, t.p_symmetrized, t.se, t.ok});
        rec.emit_csv("tails.csv", tails);
      }
      rec.check("ghost_sample", r.ok_ghost);
      rec.check("rademacher", r.ok_sigma);
      rec.check("all", r.all_ok());
    };
  });

  // chain ------------------------------------------------------------------
  auto* chain = app.add_subcommand("chain", "chaining plan, entropy sum J_n and chained tail bounds");
  ClassOpts chain_cls;
  chain_cls.add_to(chain, 20);
  std::size_t chain_n = 100, chain_reps = 10000;
  int chain_s = 0;
  std::string chain_t = "0.5,1,2";
  chain->add_option("--n", chain_n, "design size")->capture_default_str();
  chain->add_option("--S", chain_s, "depth S (0 = ceil(log2 sqrt n) + 2)")->capture_default_str();
  chain->add_option("--t", chain_t, "comma-separated t values")->capture_default_str();
  chain->add_option("--reps", chain_reps, "replicates")->capture_default_str();
  chain->callback([&] {
    job.command = "chain";
    job.params = chain_cls.params();
    job.params["n"] = chain_n;
    job.params["S"] = chain_s;
    job.params["t"] = chain_t;
    job.params["reps"] = chain_reps;
    job.body = [&](RunRecorder& rec) {
      const auto cls = chain_cls.make(stream_seed(job.seed, kClassStream));
      const auto design = EmpiricalDesign::uniform(chain_n, cls.input_dim(), stream_seed(job.seed, kDesignStream));
      const auto sample = evaluate_on(cls, design);
      const int depth = chain_s > 0 ? chain_s : default_chain_depth(chain_n);
      const auto plan = build_chaining_plan(sample, depth);
      const auto t = parse_doubles(chain_t, "--t");
      json pj;
      pj["depth"] = plan.depth;
      pj["r_n"] = plan.r_n;
      pj["j_n"] = plan.j_n;
      pj["max_link_ratio"] = plan.max_link_ratio;
      pj["links_ok"] = plan.links_ok;
      pj["chains"] = plan.chains;
      Csv levels({"level", "radius", "count", "entropy", "centers"});
      for (std::size_t s = 0; s < plan.levels.size(); ++s) {
        const auto& l = plan.levels[s];
        std::string ids;
        for (auto c : l.centers) ids += (ids.empty() ? "" : " ") + std::to_string(c);
        levels.row({static_cast<long long>(s), l.radius, static_cast<long long>(l.count), l.entropy,
                    s == 0 ? std::string("zero") : ids});
      }
      rec.emit_json("plan.json", pj);
      rec.emit_csv("levels.csv", levels);
      const auto rad = chaining_tail_check(sample, plan, t, chain_reps, stream_seed(job.seed, kMcStream));
      // Gaussian noise with trace 1 spread over the output coordinates
      const auto noise = CovarianceSpectrum::geometric(cls.dim_y());
      const auto gau = gaussian_chaining_check(sample, plan, noise, t, chain_reps, stream_seed(job.seed, kExtraStream));
      rec.emit_csv("rademacher_tail.csv", tail_csv(rad));
      rec.emit_csv("gaussian_tail.csv", tail_csv(gau));
      rec.check("chain_links", plan.links_ok);
      rec.check("j_recomputed", std::abs(chaining_j(plan) - plan.j_n) <= 1e-12 * std::max(1.0, plan.j_n));
      rec.check("rademacher_tail", rad.all_ok());
      rec.check("gaussian_tail", gau.all_ok());
    };
  });

  // gc ---------------------------------------------------------------------
  auto* gc = app.add_subcommand("gc", "uniform deviation decay and equicontinuity curves");
  ClassOpts gc_cls;
  gc_cls.add_to(gc, 20);
  std::string gc_n = "50,100,200,400,800", gc_radius, gc_eq_n = "1000";
  std::size_t gc_reps = 200, gc_g0 = 0;
  gc->add_option("--n", gc_n, "comma-separated sample sizes")->capture_default_str();
  gc->add_option("--reps", gc_reps, "replicates")->capture_default_str();
  gc->add_option("--radius", gc_radius, "comma-separated radii for the equicontinuity table");
  gc->add_option("--g0", gc_g0, "centre member for the equicontinuity table")->capture_default_str();
  gc->add_option("--eq-n", gc_eq_n, "sample sizes for the equicontinuity table")->capture_default_str();
  gc->callback([&] {
    job.command = "gc";
    job.params = gc_cls.params();
    job.params["n"] = gc_n;
    job.params["reps"] = gc_reps;
    job.params["radius"] = gc_radius;
    job.params["g0"] = gc_g0;
    job.params["eq_n"] = gc_eq_n;
    job.body = [&](RunRecorder& rec) {
      const auto cls = gc_cls.make(stream_seed(job.seed, kClassStream));
      const auto curve = gc_decay_curve(cls, parse_counts(gc_n, "--n"), gc_reps, stream_seed(job.seed, kMcStream));
      Csv table({"n", "median", "q25", "q75"});
      for (const auto& r : curve.rows) table.row({static_cast<long long>(r.n), r.median, r.q25, r.q75});
      rec.emit_csv("gc.csv", table);
      rec.emit_json("gc.json", {{"monotone_fraction", curve.monotone_fraction}, {"decay_ratio", curve.decay_ratio}});
      rec.check("median_decreases", curve.rows.size() < 2 || curve.rows.back().median < curve.rows.front().median);
      if (!gc_radius.empty()) {
        const auto rows = equicontinuity_curve(cls, gc_g0, parse_doubles(gc_radius, "--radius"),
                                               parse_counts(gc_eq_n, "--eq-n"), gc_reps,
                                               stream_seed(job.seed, kExtraStream));
        Csv eq({"n", "radius", "members_in_ball", "median"});
        for (const auto& r : rows) eq.row({static_cast<long long>(r.n), r.radius, static_cast<long long>(r.members_in_ball), r.median});
        rec.emit_csv("equicontinuity.csv", eq);
      }
    };
  });

  // regress ----------------------------------------------------------------
  auto* reg = app.add_subcommand("regress", "fixed-design least squares rate experiment");
  RateConfig rate;
  std::string reg_n = "64,256,1024,4096", reg_noise = "0.5,0.3,0.2";
  reg->add_option("--n", reg_n, "comma-separated sample sizes")->capture_default_str();
  reg->add_option("--reps", rate.reps, "replicates per n")->capture_default_str();
  reg->add_option("--t", rate.t, "deviation level t >= 3/8")->capture_default_str();
  reg->add_option("--kb", rate.k_b, "K_B")->capture_default_str();
  reg->add_option("--noise", reg_noise, "noise covariance eigenvalues (trace 1, one per output coordinate)")
      ->capture_default_str();
  reg->callback([&] {
    job.command = "regress";
    job.params = {{"n", reg_n}, {"reps", rate.reps}, {"t", rate.t}, {"kb", rate.k_b}, {"noise", reg_noise}};
    job.body = [&](RunRecorder& rec) {
      rate.n_grid = parse_counts(reg_n, "--n");
      rate.noise_spectrum = parse_doubles(reg_noise, "--noise");
      rate.dim_y = rate.noise_spectrum.size();
      rate.seed = stream_seed(job.seed, kMcStream);
      const auto fit = rate_experiment(rate);
      Csv table({"n", "knots", "eps", "log_cardinality", "delta_n", "median_error", "q90_error", "g0_selected",
                 "exceed_freq", "exceed_se", "exceed_bound", "coverage_ok", "basic_violations"});
      for (const auto& r : fit.rows) {
        table.row({static_cast<long long>(r.n), static_cast<long long>(r.knots), r.eps, r.log_cardinality, r.delta_n,
                   r.median_error, r.q90_error, r.g0_selected, r.coverage_freq, r.coverage_se, r.coverage_bound,
                   r.coverage_ok, static_cast<long long>(r.basic_violations)});
      }
      rec.emit_csv("rate.csv", table);
      rec.emit_json("rate.json", {{"slope", fit.slope}, {"intercept", fit.intercept},
                                  {"theory_exponent", fit.theory_exponent}, {"t", fit.t}});
      rec.check("basic_inequality", fit.basic_ok());
      rec.check("coverage", fit.coverage_ok());
      rec.check("slope", std::abs(fit.slope - fit.theory_exponent) <= 0.15);
    };
  });

  // erm --------------------------------------------------------------------
  auto* erm = app.add_subcommand("erm", "bounded-loss ERM excess risk against the Rademacher bound");
  ErmConfig ecfg;
  std::string erm_n = "100,400,1600";
  erm->add_option("--n", erm_n, "comma-separated sample sizes")->capture_default_str();
  erm->add_option("--reps", ecfg.reps, "replicates per n")->capture_default_str();
  erm->add_option("--members", ecfg.members, "class size")->capture_default_str();
  erm->add_option("--dy", ecfg.dim_y, "output dimension")->capture_default_str();
  erm->add_option("--cap", ecfg.cap, "loss cap")->capture_default_str();
  erm->add_option("--noise-scale", ecfg.noise_scale, "size of the noise atoms")->capture_default_str();
  erm->add_option("--sign-draws", ecfg.sign_draws, "sign draws per Rademacher estimate")->capture_default_str();
  erm->add_option("--failure-prob", ecfg.failure_prob, "failure probability of the bound")->capture_default_str();
  erm->callback([&] {
    job.command = "erm";
    job.params = {{"n", erm_n}, {"reps", ecfg.reps}, {"members", ecfg.members}, {"dy", ecfg.dim_y},
                  {"cap", ecfg.cap}, {"noise_scale", ecfg.noise_scale}, {"sign_draws", ecfg.sign_draws},
                  {"failure_prob", ecfg.failure_prob}};
    job.body = [&](RunRecorder& rec) {
      ecfg.n_grid = parse_counts(erm_n, "--n");
      ecfg.seed = stream_seed(job.seed, kMcStream);
      const auto r = erm_lipschitz_experiment(ecfg);
      Csv table({"n", "median_excess", "q95_excess", "median_rademacher", "bound_at_median", "violation_freq",
                 "violation_se", "bound_ok", "decomposition_violations"});
      for (const auto& row : r.rows) {
        table.row({static_cast<long long>(row.n), row.median_excess, row.q95_excess, row.median_rademacher,
                   row.bound_at_median, row.violation_freq, row.violation_se, row.bound_ok,
                   static_cast<long long>(row.decomposition_violations)});
      }
      rec.emit_csv("erm.csv", table);
      Csv risks({"member", "risk"});
      for (std::size_t g = 0; g < r.risks.size(); ++g) risks.row({static_cast<long long>(g), r.risks[g]});
      rec.emit_csv("risks.csv", risks);
      rec.check("excess_risk_bound", r.all_ok());
    };
  });

  // rademacher -------------------------------------------------------------
  auto* rad = app.add_subcommand("rademacher", "norm-form and coordinate-wise Rademacher complexity");
  ClassOpts rad_cls;
  rad_cls.add_to(rad, 15);
  std::size_t rad_n = 16, rad_reps = 100000;
  std::string rad_mode = "auto";
  int rad_s = 5;
  rad->add_option("--n", rad_n, "design size")->capture_default_str();
  rad->add_option("--mode", rad_mode, "exact, mc or auto")->capture_default_str();
  rad->add_option("--reps", rad_reps, "Monte Carlo draws")->capture_default_str();
  rad->add_option("--S", rad_s, "chaining depth for the entropy bound")->capture_default_str();
  rad->callback([&] {
    job.command = "rademacher";
    job.params = rad_cls.params();
    job.params["n"] = rad_n;
    job.params["mode"] = rad_mode;
    job.params["reps"] = rad_reps;
    job.params["S"] = rad_s;
    job.body = [&](RunRecorder& rec) {
      const auto cls = rad_cls.make(stream_seed(job.seed, kClassStream));
      const auto design = EmpiricalDesign::uniform(rad_n, cls.input_dim(), stream_seed(job.seed, kDesignStream));
      const auto sample = evaluate_on(cls, design);
      const auto pick = [&](std::size_t signs) {
        if (rad_mode == "exact") return RademacherMode::exact;
        if (rad_mode == "mc") return RademacherMode::monte_carlo;
        if (rad_mode == "auto") return signs <= kMaxExactSigns ? RademacherMode::exact : RademacherMode::monte_carlo;
        throw std::invalid_argument("--mode must be exact, mc or auto");
      };
      const auto mc_seed = stream_seed(job.seed, kMcStream);
      // random orthonormal basis of Y
      Rng rng(stream_seed(job.seed, kExtraStream));
      std::vector<HPoint> vs;
      for (std::size_t k = 0; k < cls.dim_y(); ++k) {
        HPoint v(cls.dim_y());
        for (std::size_t j = 0; j < cls.dim_y(); ++j) v[j] = rng.normal();
        vs.push_back(v);
      }
      const auto basis = OrthonormalBasis::gram_schmidt(vs);
      const auto mode = pick(rad_n);
      const auto norm_std = norm_rademacher(sample, mode, rad_reps, mc_seed);
      const auto norm_rot = norm_rademacher(rotate(sample, basis), mode, rad_reps, mc_seed);
      const auto cmode = pick(rad_n * cls.dim_y());
      const auto coord_std = coordinatewise_rademacher(sample, OrthonormalBasis::identity(cls.dim_y()), cmode, rad_reps, mc_seed);
      const auto coord_rot = coordinatewise_rademacher(sample, basis, cmode, rad_reps, mc_seed);
      const auto eb = rademacher_entropy_bound_check(sample, rad_s, rad_reps, mc_seed);
      const auto mode_name = [](RademacherMode m) { return m == RademacherMode::exact ? "exact" : "monte_carlo"; };
      Csv table({"form", "basis", "mode", "value", "se"});
      table.row({std::string("norm"), std::string("standard"), std::string(mode_name(mode)), norm_std.value, norm_std.se});
      table.row({std::string("norm"), std::string("random"), std::string(mode_name(mode)), norm_rot.value, norm_rot.se});
      table.row({std::string("coordinatewise_normalized"), std::string("standard"), std::string(mode_name(cmode)),
                 coord_std.normalized, coord_std.se / static_cast<double>(rad_n)});
      table.row({std::string("coordinatewise_normalized"), std::string("random"), std::string(mode_name(cmode)),
                 coord_rot.normalized, coord_rot.se / static_cast<double>(rad_n)});
      rec.emit_csv("rademacher.csv", table);
      rec.emit_json("entropy_bound.json", {{"estimate", eb.estimate.value}, {"se", eb.estimate.se},
                                           {"depth", eb.depth}, {"r_n", eb.r_n}, {"j_n", eb.j_n},
                                           {"bound", eb.bound}, {"bound_log2", eb.bound_log2},
                                           {"ok", eb.ok}, {"ok_log2", eb.ok_log2}});
      rec.check("entropy_bound", eb.ok);
      if (mode == RademacherMode::exact) {
        rec.check("norm_basis_invariant", std::abs(norm_std.value - norm_rot.value) <= 1e-12);
      }
    };
  });

  // demo-counterexample ----------------------------------------------------
  auto* demo = app.add_subcommand("demo-counterexample", "basis dependence of the coordinate-wise complexity");
  demo->callback([&] {
    job.command = "demo-counterexample";
    job.params = json::object();
    job.body = [&](RunRecorder& rec) {
      const auto d = basis_dependence_demo();
      const auto side = [](const CoordinatewiseEstimate& e) {
        return json{{"pattern_sum", e.pattern_sum}, {"average", e.average}, {"normalized", e.normalized},
                    {"effective_signs", e.effective_signs}, {"signs", e.signs}};
      };
      json j;
      j["standard"] = side(d.standard);
      j["rotated"] = side(d.rotated);
      j["norm_standard"] = d.norm_standard;
      j["norm_rotated"] = d.norm_rotated;
      j["quoted_standard"] = d.quoted_standard;
      j["quoted_rotated"] = d.quoted_rotated;
      j["dependent"] = d.dependent;
      rec.emit_json("counterexample.json", j);
      Csv table({"basis", "pattern_sum", "average", "normalized", "effective_signs", "quoted"});
      table.row({std::string("standard"), d.standard.pattern_sum, d.standard.average, d.standard.normalized,
                 static_cast<long long>(d.standard.effective_signs), d.quoted_standard});
      table.row({std::string("rotated"), d.rotated.pattern_sum, d.rotated.average, d.rotated.normalized,
                 static_cast<long long>(d.rotated.effective_signs), d.quoted_rotated});
      rec.emit_csv("counterexample.csv", table);
      std::cout << j.dump(2) << "\n";
      rec.check("standard_matches_quoted", std::abs(d.standard.pattern_sum - d.quoted_standard) <= 1e-9);
      rec.check("rotated_matches_quoted", std::abs(d.rotated.pattern_sum - d.quoted_rotated) <= 1e-9);
      rec.check("norm_basis_invariant", std::abs(d.norm_standard - d.norm_rotated) <= 1e-12);
      rec.check("basis_dependent", d.dependent);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (const char* env = std::getenv("VECPROC_SEED"); env != nullptr && *env != '\0') {
      char* stop = nullptr;
      const unsigned long long v = std::strtoull(env, &stop, 10);
      if (*stop != '\0') throw std::invalid_argument("VECPROC_SEED must be an unsigned integer");
      seed = v;
    }
    set_worker_count(threads);
    job.seed = seed;
    if (out.empty()) out = "runs/" + job.command + "-" + std::to_string(seed);
    json params = job.params;
    params["seed"] = seed;
    params["threads"] = threads;
    RunRecorder rec(job.command, out, seed, params);
    job.body(rec);
    rec.finish();
    std::cerr << job.command << ": " << (rec.all_ok() ? "all checks passed" : "some checks FAILED") << " (" << out
              << ")\n";
    return rec.all_ok() ? kExitOk : kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace vecproc
