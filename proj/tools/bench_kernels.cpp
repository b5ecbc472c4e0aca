// Timing harness for the parallel kernels against their serial reference
// implementations: CSR matvec, Gram product, and weight-field construction.
// Verifies agreement before timing so a speedup never hides a wrong answer.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "CLI11.hpp"
#include "lriid/fixtures.hpp"
#include "lriid/operators.hpp"

using namespace lriid;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const double t0 = now_seconds();
    fn();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

void report(const char* kernel, double serial, double parallel) {
  std::printf("%-16s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx\n",
              kernel, serial * 1e3, parallel * 1e3, serial / parallel);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("LRIID_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
  int height = 128, width = 128, bands = 16, reps = 5;
  CLI::App app{"Kernel benchmark: parallel vs serial reference"};
  app.add_option("--height", height)->check(CLI::PositiveNumber);
  app.add_option("--width", width)->check(CLI::PositiveNumber);
  app.add_option("--bands", bands)->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "Repetitions; best time wins")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::printf("problem %dx%dx%d, %d threads, best of %d\n", height, width,
              bands, omp_get_max_threads(), reps);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  SpectralCube cube(height, width, bands);
  for (double& v : cube.data()) v = dist(rng);

  // Weight field: parallel vs serial construction.
  WeightField wf;
  {
    const double ts = time_best_of(
        reps, [&] { wf = compute_weight_field_serial(cube, {}); });
    WeightField wp;
    const double tp =
        time_best_of(reps, [&] { wp = compute_weight_field(cube, {}); });
    if (wf.w != wp.w || wf.v != wp.v) {
      std::fprintf(stderr, "FAIL: weight fields differ\n");
      return 1;
    }
    report("weights", ts, tp);
  }

  BasisMatrix br =
      reflectance_basis_pca(make_default_library(bands, 200, 42), 8);
  SparseMatrix op = assemble_pair_operator(&cube, br, wf, cube.pixels(),
                                           PairWeight::ConstantShading);
  std::vector<double> x(size_t(op.cols()));
  for (double& v : x) v = dist(rng);

  // CSR matvec.
  {
    std::vector<double> ys(size_t(op.rows())), yp(size_t(op.rows()));
    const double ts = time_best_of(reps, [&] { op.apply_serial(x, ys); });
    const double tp = time_best_of(reps, [&] { op.apply(x, yp); });
    if (ys != yp) {  // fixed per-row order makes the match bitwise
      std::fprintf(stderr, "FAIL: matvec results differ\n");
      return 1;
    }
    report("matvec", ts, tp);
  }

  // Gram product A'A.
  {
    SparseMatrix gs, gp;
    const double ts = time_best_of(reps, [&] { gs = op.gram_serial(); });
    const double tp = time_best_of(reps, [&] { gp = op.gram(); });
    if (gs.row_ptr() != gp.row_ptr() || gs.col_idx() != gp.col_idx() ||
        max_abs_diff(gs.values(), gp.values()) != 0.0) {
      std::fprintf(stderr, "FAIL: gram results differ\n");
      return 1;
    }
    report("gram", ts, tp);
  }

  return 0;
}
