// Batch front-end for the decomposition pipeline: decompose a cube, score a
// result against ground truth, synthesize fixtures, and sweep the weight
// parameters. Every subcommand drops a manifest.json next to its outputs with
// the inputs, the effective configuration, and the wall time, so a run can be
// reproduced from the manifest alone.

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lriid/fixtures.hpp"
#include "lriid/metrics.hpp"
#include "lriid/png_io.hpp"
#include "lriid/solve.hpp"
#include "lriid/sweep.hpp"
#include "lriid/synth.hpp"

namespace {

constexpr const char* kVersion = "lriid 1.0.0";

using nlohmann::json;
namespace fs = std::filesystem;
using namespace lriid;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

void apply_thread_cap() {
  if (const char* env = std::getenv("LRIID_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
}

json solver_json(const SolverConfig& s) {
  return {{"lambda1", s.lambda1},
          {"lambda2", s.lambda2},
          {"lambda_data", s.lambda_data},
          {"cg_tol", s.cg_tol},
          {"outer_max_iter", s.outer_max_iter},
          {"inner_max_iter", s.inner_max_iter},
          {"grad_tol", s.grad_tol}};
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    json inputs, json config, json outputs, double started) {
  json m;
  m["version"] = kVersion;
  m["command"] = command;
  m["inputs"] = std::move(inputs);
  m["config"] = std::move(config);
  m["outputs"] = std::move(outputs);
  m["threads"] = omp_get_max_threads();
  m["wall_time_seconds"] = now_seconds() - started;
  std::ofstream os(out_dir / "manifest.json", std::ios::trunc);
  if (!os)
    throw std::runtime_error("manifest: cannot write " +
                             (out_dir / "manifest.json").string());
  os << m.dump(2) << "\n";
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ValidationError("out-dir: cannot create directory " + dir.string());
}

void save_pseudo_rgb_png(const SpectralCube& cube, const fs::path& path) {
  const auto response = make_default_response(cube.bands());
  save_png_rgb(path, cube.height(), cube.width(), pseudo_rgb(cube, response));
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeArgs {
  std::string input, illum, library, out_dir;
  double alpha = WeightParams{}.alpha;
  double beta = WeightParams{}.beta;
  SolverConfig solver;
  int rank = 8;
  int band_stride = 1;
};

int run_decompose(const DecomposeArgs& a) {
  const double t0 = now_seconds();
  SpectralCube cube = load_cube(a.input);
  if (a.band_stride > 1) cube = cube.subsample_bands(a.band_stride);
  auto [ill_wl, illum] = load_spectrum_csv(a.illum);
  ReflectanceLibrary lib = load_library_csv(a.library);
  if (a.band_stride > 1) {
    PixelSpectrum ill;
    ReflectanceLibrary sub;
    sub.bands = cube.bands();
    for (size_t k = 0; k < illum.size(); k += size_t(a.band_stride))
      ill.push_back(illum[k]);
    for (int i = 0; i < lib.count(); ++i)
      for (int k = 0; k < lib.bands; k += a.band_stride)
        sub.samples.push_back(lib.sample(i)[size_t(k)]);
    illum = std::move(ill);
    lib = std::move(sub);
  }

  DecomposeConfig cfg;
  cfg.weights = {a.alpha, a.beta};
  cfg.solver = a.solver;
  cfg.reflectance_rank = std::min(a.rank, cube.bands());

  ensure_out_dir(a.out_dir);
  DecomposeResult res = decompose(cube, illum, lib, cfg);

  const fs::path dir = a.out_dir;
  save_cube(res.shading, dir / "shading.msc");
  save_cube(res.reflectance, dir / "reflectance.msc");
  save_trace_csv(res.trace, dir / "trace.csv");
  save_pseudo_rgb_png(cube, dir / "input.png");
  save_pseudo_rgb_png(res.shading, dir / "shading.png");
  save_pseudo_rgb_png(res.reflectance, dir / "reflectance.png");

  json config = {{"alpha", a.alpha},
                 {"beta", a.beta},
                 {"rank", cfg.reflectance_rank},
                 {"band_stride", a.band_stride},
                 {"solver", solver_json(a.solver)}};
  write_manifest(dir, "decompose",
                 {{"input", a.input}, {"illum", a.illum}, {"library", a.library}},
                 config,
                 {"shading.msc", "reflectance.msc", "trace.csv", "input.png",
                  "shading.png", "reflectance.png"},
                 t0);

  std::cout << "converged: " << (res.trace.converged ? "yes" : "no")
            << ", outer iterations: " << res.trace.outer_iterations;
  if (!res.trace.records.empty())
    std::cout << ", final energy: " << res.trace.records.back().energy;
  std::cout << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string pred_s, gt_s, pred_r, gt_r, out_dir = ".";
  int window = LmseConfig{}.window;
};

int run_eval(const EvalArgs& a) {
  const double t0 = now_seconds();
  SpectralCube ps = load_cube(a.pred_s), gs = load_cube(a.gt_s);
  SpectralCube pr = load_cube(a.pred_r), gr = load_cube(a.gt_r);
  LmseConfig cfg;
  cfg.window = a.window;
  const double ls = lmse(ps, gs, cfg);
  const double lr = lmse(pr, gr, cfg);
  const double combined = 0.5 * (ls + lr);

  ensure_out_dir(a.out_dir);
  const fs::path dir = a.out_dir;
  {
    std::ofstream os(dir / "lmse.csv", std::ios::trunc);
    if (!os)
      throw std::runtime_error("eval: cannot write " +
                               (dir / "lmse.csv").string());
    os.precision(12);
    os << "lmse_shading,lmse_reflectance,combined\n"
       << ls << "," << lr << "," << combined << "\n";
  }
  write_manifest(dir, "eval",
                 {{"pred_s", a.pred_s},
                  {"gt_s", a.gt_s},
                  {"pred_r", a.pred_r},
                  {"gt_r", a.gt_r}},
                 {{"window", a.window}}, {"lmse.csv"}, t0);

  char buf[128];
  std::snprintf(buf, sizeof buf,
                "LMSE shading %.6f reflectance %.6f combined %.6f\n", ls, lr,
                combined);
  std::cout << buf;
  return 0;
}

// ---------------------------------------------------------------------------
// synth

SceneSpec parse_scene_spec(const fs::path& path, int* rank_out) {
  std::ifstream is(path);
  if (!is) throw ValidationError("synth: cannot open spec " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw FormatError("synth: bad spec JSON: " + std::string(e.what()));
  }
  SceneSpec spec;
  spec.height = j.value("height", spec.height);
  spec.width = j.value("width", spec.width);
  spec.bands = j.value("bands", spec.bands);
  spec.n_regions = j.value("n_regions", spec.n_regions);
  spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
  spec.seed = j.value("seed", spec.seed);
  spec.in_model = j.value("in_model", spec.in_model);
  if (j.contains("shading_profile"))
    spec.shading_profile =
        shading_profile_from_string(j["shading_profile"].get<std::string>());
  if (j.contains("illum"))
    spec.illum = j["illum"].get<std::vector<double>>();
  *rank_out = j.value("rank", std::min(8, spec.bands));
  return spec;
}

struct SynthArgs {
  std::string spec_path, out_dir;
  std::string library;  // optional CSV; default synthetic library
};

int run_synth(const SynthArgs& a) {
  const double t0 = now_seconds();
  int rank = 0;
  SceneSpec spec = parse_scene_spec(a.spec_path, &rank);
  ReflectanceLibrary lib = a.library.empty()
                               ? make_default_library(spec.bands)
                               : load_library_csv(a.library);
  BasisMatrix br = reflectance_basis_pca(lib, rank);
  SyntheticScene scene = generate_scene(spec, br);

  ensure_out_dir(a.out_dir);
  const fs::path dir = a.out_dir;
  save_cube(scene.luminance, dir / "luminance.msc");
  save_cube(scene.gt_shading, dir / "gt_shading.msc");
  save_cube(scene.gt_reflectance, dir / "gt_reflectance.msc");

  json config = {{"height", spec.height},
                 {"width", spec.width},
                 {"bands", spec.bands},
                 {"n_regions", spec.n_regions},
                 {"shading_profile", to_string(spec.shading_profile)},
                 {"noise_sigma", spec.noise_sigma},
                 {"seed", spec.seed},
                 {"in_model", spec.in_model},
                 {"rank", rank}};
  json inputs = {{"spec", a.spec_path}};
  if (!a.library.empty()) inputs["library"] = a.library;
  write_manifest(dir, "synth", inputs, config,
                 {"luminance.msc", "gt_shading.msc", "gt_reflectance.msc"}, t0);

  std::cout << "wrote " << spec.height << "x" << spec.width << "x"
            << spec.bands << " fixture to " << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string input, gt_s, gt_r, illum, library, out_dir;
  std::vector<double> alphas, betas;
  SolverConfig solver;
  int rank = 8;
};

int run_sweep(const SweepArgs& a) {
  const double t0 = now_seconds();
  SpectralCube cube = load_cube(a.input);
  SpectralCube gs = load_cube(a.gt_s);
  SpectralCube gr = load_cube(a.gt_r);
  auto [ill_wl, illum] = load_spectrum_csv(a.illum);
  ReflectanceLibrary lib = load_library_csv(a.library);

  const std::vector<double> alphas =
      a.alphas.empty() ? default_alpha_grid() : a.alphas;
  const std::vector<double> betas =
      a.betas.empty() ? default_beta_grid() : a.betas;

  DecomposeConfig cfg;
  cfg.solver = a.solver;
  cfg.reflectance_rank = std::min(a.rank, cube.bands());

  ensure_out_dir(a.out_dir);
  SweepResult sweep = sweep_params(cube, gs, gr, illum, lib, alphas, betas, cfg);
  const fs::path dir = a.out_dir;
  save_sweep_csv(sweep, dir / "sweep.csv");

  json config = {{"alphas", alphas},
                 {"betas", betas},
                 {"rank", cfg.reflectance_rank},
                 {"solver", solver_json(a.solver)}};
  write_manifest(dir, "sweep",
                 {{"input", a.input},
                  {"gt_s", a.gt_s},
                  {"gt_r", a.gt_r},
                  {"illum", a.illum},
                  {"library", a.library}},
                 config, {"sweep.csv"}, t0);

  std::cout << "best alpha " << sweep.best.alpha << " beta " << sweep.best.beta
            << "\n";
  return 0;
}

void add_solver_flags(CLI::App* cmd, SolverConfig* s) {
  cmd->add_option("--lambda1", s->lambda1, "Reflectance-constancy weight");
  cmd->add_option("--lambda2", s->lambda2, "Generic-constraint weight");
  cmd->add_option("--lambda-data", s->lambda_data, "Data-constraint weight");
  cmd->add_option("--outer-max-iter", s->outer_max_iter,
                  "Outer iteration budget");
  cmd->add_option("--grad-tol", s->grad_tol,
                  "Gradient-norm-per-unknown stopping threshold");
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{"Low-rank multispectral intrinsic image decomposition"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  DecomposeArgs da;
  CLI::App* dec = app.add_subcommand(
      "decompose", "Split a cube into shading and reflectance");
  dec->add_option("--input", da.input, "Input cube (.msc)")->required();
  dec->add_option("--illum", da.illum, "Illumination spectrum CSV")->required();
  dec->add_option("--library", da.library, "Reflectance library CSV")
      ->required();
  dec->add_option("--out-dir", da.out_dir, "Output directory")->required();
  dec->add_option("--alpha", da.alpha, "Weight sigmoid steepness");
  dec->add_option("--beta", da.beta, "Weight sigmoid midpoint");
  dec->add_option("--rank", da.rank, "Reflectance subspace rank")
      ->check(CLI::PositiveNumber);
  dec->add_option("--band-stride", da.band_stride,
                  "Keep every n-th band of all spectral inputs")
      ->check(CLI::PositiveNumber);
  add_solver_flags(dec, &da.solver);

  EvalArgs ea;
  CLI::App* ev =
      app.add_subcommand("eval", "Score a decomposition against ground truth");
  ev->add_option("--pred-s", ea.pred_s, "Predicted shading (.msc)")->required();
  ev->add_option("--gt-s", ea.gt_s, "Ground-truth shading (.msc)")->required();
  ev->add_option("--pred-r", ea.pred_r, "Predicted reflectance (.msc)")
      ->required();
  ev->add_option("--gt-r", ea.gt_r, "Ground-truth reflectance (.msc)")
      ->required();
  ev->add_option("--out-dir", ea.out_dir, "Output directory (default .)");
  ev->add_option("--window", ea.window, "LMSE window size")
      ->check(CLI::PositiveNumber);

  SynthArgs sa;
  CLI::App* sy =
      app.add_subcommand("synth", "Generate a ground-truth fixture triple");
  sy->add_option("--spec", sa.spec_path, "Scene spec JSON")->required();
  sy->add_option("--out-dir", sa.out_dir, "Output directory")->required();
  sy->add_option("--library", sa.library,
                 "Reflectance library CSV (default: built-in synthetic)");

  SweepArgs wa;
  CLI::App* sw = app.add_subcommand(
      "sweep", "Grid-search the weight parameters against ground truth");
  sw->add_option("--input", wa.input, "Input cube (.msc)")->required();
  sw->add_option("--gt-s", wa.gt_s, "Ground-truth shading (.msc)")->required();
  sw->add_option("--gt-r", wa.gt_r, "Ground-truth reflectance (.msc)")
      ->required();
  sw->add_option("--illum", wa.illum, "Illumination spectrum CSV")->required();
  sw->add_option("--library", wa.library, "Reflectance library CSV")
      ->required();
  sw->add_option("--out-dir", wa.out_dir, "Output directory")->required();
  sw->add_option("--alpha", wa.alphas,
                 "Alpha grid values (default: built-in grid)");
  sw->add_option("--beta", wa.betas,
                 "Beta grid values (default: built-in grid)");
  sw->add_option("--rank", wa.rank, "Reflectance subspace rank")
      ->check(CLI::PositiveNumber);
  add_solver_flags(sw, &wa.solver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (dec->parsed()) return run_decompose(da);
    if (ev->parsed()) return run_eval(ea);
    if (sy->parsed()) return run_synth(sa);
    if (sw->parsed()) return run_sweep(wa);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
