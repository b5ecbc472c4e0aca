// Release gate for the decomposition pipeline. Each numbered check prints a
// single PASS/FAIL line; the process exits non-zero if any gating check
// fails. Check 11 is an informational timing probe and never gates.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lriid/fixtures.hpp"
#include "lriid/metrics.hpp"
#include "lriid/solve.hpp"
#include "lriid/sweep.hpp"
#include "lriid/synth.hpp"

using namespace lriid;

namespace {

bool g_all_ok = true;

void report(int id, const std::string& what, bool ok, const std::string& detail,
            bool gating = true) {
  std::printf("[%s] %2d %s (%s)%s\n", ok ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str(), gating ? "" : " [informational]");
  if (gating && !ok) g_all_ok = false;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

SpectralCube random_cube(int h, int w, int k, uint64_t seed, double lo,
                         double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> data(size_t(h) * w * k);
  for (double& v : data) v = dist(rng);
  return SpectralCube(h, w, k, std::move(data));
}

std::vector<double> random_vector(size_t n, uint64_t seed, double lo,
                                  double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (piv != col) {
      for (size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    const double d = a[col * n + col];
    for (size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / d;
      for (size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (size_t ri = n; ri-- > 0;) {
    double acc = b[ri];
    for (size_t c = ri + 1; c < n; ++c) acc -= a[ri * n + c] * x[c];
    x[ri] = acc / a[ri * n + ri];
  }
  return x;
}

// ---------------------------------------------------------------------------
// 1. Dense-oracle equivalence on tiny instances.
void check_dense_oracle() {
  const double t0 = now_seconds();
  double worst_init = 0.0, worst_refined = 0.0;
  bool ok = true;
  std::string err;
  try {
    for (uint64_t seed = 0; seed < 10; ++seed) {
      SpectralCube cube = random_cube(3, 3, 4, 1000 + seed, 0.05, 1.0);
      BasisMatrix bs = shading_basis(make_default_illum(4));
      BasisMatrix br = reflectance_basis_pca(
          make_default_library(4, 80, 500 + seed), 2);
      // Moderate steepness keeps both weight arrays bounded away from zero on
      // random cubes; at the default steepness many pairs underflow to exactly
      // zero weight and the block systems turn near-singular, where the
      // iterate (not the energy) is no longer uniquely determined and an
      // elimination-based and an iterative solver legitimately disagree.
      WeightField wf = compute_weight_field(cube, {100.0, 0.1});

      SolverConfig cfg;
      cfg.cg_tol = 1e-13;
      cfg.inner_max_iter = 5000;
      const int outers = 10;

      BruteForceResult dense =
          brute_force_decompose(cube, bs, br, wf, cfg, outers);

      auto s0 = initial_shading(cube, bs, wf, cfg);
      auto r0 = initial_reflectance(cube, br, wf, s0, bs, cfg);
      worst_init = std::max({worst_init, rel_l2(s0, dense.s_initial),
                             rel_l2(r0, dense.r_initial)});

      SolverConfig rcfg = cfg;
      rcfg.outer_max_iter = outers;
      rcfg.grad_tol = 0.0;  // run the full schedule like the dense path
      RefineResult sparse = refine_alternating(cube, s0, r0, bs, br, wf, rcfg);
      worst_refined = std::max({worst_refined, rel_l2(sparse.s, dense.s),
                                rel_l2(sparse.r, dense.r)});
    }
  } catch (const std::exception& e) {
    ok = false;
    err = e.what();
  }
  const double dt = now_seconds() - t0;
  ok = ok && worst_init < 1e-6 && worst_refined < 1e-6 && dt < 10.0;
  report(1, "sparse pipeline matches the dense direct solver", ok,
         err.empty() ? "max rel err init " + fmt(worst_init) + ", refined " +
                           fmt(worst_refined) + ", " + fmt(dt) + " s"
                     : err);
}

// ---------------------------------------------------------------------------
// 2. Energy monotonicity across outer iterations.
void check_monotonicity() {
  bool ok = true;
  std::string detail = "20 fixtures, 16x16x6";
  try {
    for (uint64_t seed = 0; seed < 20; ++seed) {
      SceneSpec spec;
      spec.height = 16;
      spec.width = 16;
      spec.bands = 6;
      spec.seed = 2000 + seed;
      spec.n_regions = 3 + int(seed % 4);
      spec.shading_profile =
          static_cast<ShadingProfile>(seed % 3);
      spec.in_model = seed % 2 == 0;
      spec.noise_sigma = seed % 5 == 0 ? 0.005 : 0.0;
      BasisMatrix br = reflectance_basis_pca(
          make_default_library(6, 120, 700 + seed), 4);
      BasisMatrix bs = shading_basis(make_default_illum(6));
      SyntheticScene sc = generate_scene(spec, br);
      WeightField wf = compute_weight_field(sc.luminance, {});

      SolverConfig cfg;
      cfg.outer_max_iter = 12;
      auto s0 = initial_shading(sc.luminance, bs, wf, cfg);
      auto r0 = initial_reflectance(sc.luminance, br, wf, s0, bs, cfg);
      // refine_alternating hard-fails internally on any relative increase
      // above 1e-9; re-check the recorded energies here as well.
      RefineResult res =
          refine_alternating(sc.luminance, s0, r0, bs, br, wf, cfg);
      double prev =
          total_energy(sc.luminance, s0, r0, bs, br, wf, cfg).total;
      for (const auto& rec : res.trace.records) {
        if (rec.energy > prev * (1.0 + 1e-9) + 1e-15) ok = false;
        prev = rec.energy;
      }
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  report(2, "energy is non-increasing at every outer iteration", ok, detail);
}

// ---------------------------------------------------------------------------
// 3 + 4. Convergence budget on the shipped fixtures, and in-model recovery.
void check_fixtures() {
  const double t0 = now_seconds();
  bool converged_ok = true;
  int max_outer = 0;
  double worst_lmse = 0.0, worst_resid = 0.0;
  std::string err;
  try {
    for (const SceneSpec& spec : shipped_scene_specs()) {
      const int rank = std::min(8, spec.bands);
      ReflectanceLibrary lib =
          make_default_library(spec.bands, 200, 42);
      BasisMatrix br = reflectance_basis_pca(lib, rank);
      SyntheticScene sc = generate_scene(spec, br);

      DecomposeConfig cfg;
      cfg.reflectance_rank = rank;
      PixelSpectrum illum = make_default_illum(spec.bands);
      DecomposeResult res = decompose(sc.luminance, illum, lib, cfg);
      if (!res.trace.converged) converged_ok = false;
      max_outer = std::max(max_outer, res.trace.outer_iterations);

      LmseConfig lm;
      const double combined =
          combined_lmse(res.shading, sc.gt_shading, res.reflectance,
                        sc.gt_reflectance, lm);
      worst_lmse = std::max(worst_lmse, combined);

      SpectralCube recon = elementwise_mul(res.shading, res.reflectance);
      double num = 0.0, den = 0.0;
      for (size_t i = 0; i < recon.data().size(); ++i) {
        const double d = recon.data()[i] - sc.luminance.data()[i];
        num += d * d;
        den += sc.luminance.data()[i] * sc.luminance.data()[i];
      }
      worst_resid = std::max(worst_resid, std::sqrt(num / den));
    }
  } catch (const std::exception& e) {
    converged_ok = false;
    err = e.what();
  }
  const double dt = now_seconds() - t0;
  bool ok3 = converged_ok && max_outer <= 50 && dt < 120.0 && err.empty();
  report(3, "all shipped fixtures converge within 50 outer iterations", ok3,
         err.empty() ? "max " + std::to_string(max_outer) + " iterations, " +
                           fmt(dt) + " s"
                     : err);
  bool ok4 = err.empty() && worst_lmse <= 0.02 && worst_resid <= 0.05;
  report(4, "in-model recovery quality", ok4,
         err.empty() ? "worst combined LMSE " + fmt(worst_lmse) +
                           ", worst forward residual " + fmt(worst_resid)
                     : err);
}

// ---------------------------------------------------------------------------
// 5. Weight identities.
void check_weight_identities() {
  std::mt19937_64 rng(9001);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  WeightParams params;
  bool ok = std::abs(sigmoid_weight(params.beta, params) - 0.5) < 1e-12;
  for (int trial = 0; trial < 10000 && ok; ++trial) {
    std::vector<double> a(8), b(8);
    for (auto& v : a) v = unit(rng);
    for (auto& v : b) v = unit(rng);
    const double d = cosine_distance(a, b);
    if (d < -1e-12 || d > 2.0) ok = false;
    if (std::abs(cosine_distance(b, a) - d) > 1e-12) ok = false;
    std::vector<double> ca(8);
    const double c = scale(rng);
    for (size_t i = 0; i < a.size(); ++i) ca[i] = c * a[i];
    if (std::abs(cosine_distance(ca, b) - d) > 1e-9) ok = false;
    const double w = sigmoid_weight(d, params);
    const double v = 1.0 - w;
    if (w + v != 1.0 || w < 0.0 || w > 1.0) ok = false;
    if (sigmoid_weight(d + 1e-4, params) > w) ok = false;  // monotone
  }
  report(5, "weight identities over 10^4 random spectrum pairs", ok,
         "symmetry, bounds, scale invariance, w+v=1, w(beta)=0.5");
}

// ---------------------------------------------------------------------------
// 6. CG against dense direct solves.
void check_cg() {
  bool ok = true;
  double worst = 0.0;
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<size_t> size_dist(10, 200);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 50 && ok; ++trial) {
    const size_t n = size_dist(rng);
    std::vector<double> a(n * n);
    for (double& v : a) v = unit(rng);
    SparseOperator q{int64_t(n), int64_t(n), "spd"};
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        double v = i == j ? 0.1 : 0.0;
        for (size_t k = 0; k < n; ++k) v += a[k * n + i] * a[k * n + j];
        q.add(int64_t(i), int64_t(j), v);
      }
    SparseSystem sys{q.finalize(),
                     random_vector(n, 40000 + uint64_t(trial), -1.0, 1.0),
                     "spd"};
    auto xd = dense_solve(sys.op.to_dense(), sys.rhs);
    CgResult res = cg_solve(sys, {}, 1e-13, int(20 * n));
    worst = std::max(worst, rel_l2(res.x, xd));
    if (!res.converged) ok = false;
  }
  // closed forms
  {
    SparseOperator op(2, 2, "diag");
    op.add(0, 0, 2.0);
    op.add(1, 1, 8.0);
    SparseSystem sys{op.finalize(), {4.0, 4.0}, "diag"};
    CgResult res = cg_solve(sys, {}, 1e-14, 10);
    if (res.x[0] != 2.0 || res.x[1] != 0.5) ok = false;
  }
  ok = ok && worst < 1e-7;
  report(6, "CG matches dense direct solves on 50 SPD systems", ok,
         "max rel err " + fmt(worst));
}

// ---------------------------------------------------------------------------
// 7. Analytic gradient vs central differences.
void check_gradients() {
  bool ok = true;
  double worst = 0.0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    SpectralCube cube = random_cube(3, 3, 4, 6000 + seed, 0.05, 1.0);
    BasisMatrix bs = shading_basis(make_default_illum(4));
    BasisMatrix br =
        reflectance_basis_pca(make_default_library(4, 60, 800 + seed), 2);
    WeightField wf = compute_weight_field(cube, {});
    SolverConfig cfg;
    auto s = random_vector(9, 6100 + seed, 0.2, 1.0);
    auto r = random_vector(18, 6200 + seed, -0.5, 0.5);
    const double h = 1e-6;
    auto gs = energy_gradient_shading(cube, s, r, bs, br, wf, cfg);
    auto gr = energy_gradient_reflectance(cube, s, r, bs, br, wf, cfg);
    for (size_t i = 0; i < s.size(); ++i) {
      auto sp = s, sm = s;
      sp[i] += h;
      sm[i] -= h;
      const double num =
          (total_energy(cube, sp, r, bs, br, wf, cfg).total -
           total_energy(cube, sm, r, bs, br, wf, cfg).total) /
          (2.0 * h);
      worst = std::max(worst, std::abs(gs[i] - num) / (1.0 + std::abs(num)));
    }
    for (size_t i = 0; i < r.size(); ++i) {
      auto rp = r, rm = r;
      rp[i] += h;
      rm[i] -= h;
      const double num =
          (total_energy(cube, s, rp, bs, br, wf, cfg).total -
           total_energy(cube, s, rm, bs, br, wf, cfg).total) /
          (2.0 * h);
      worst = std::max(worst, std::abs(gr[i] - num) / (1.0 + std::abs(num)));
    }
  }
  ok = worst < 1e-4;
  report(7, "analytic gradients match central finite differences", ok,
         "max rel err " + fmt(worst));
}

// ---------------------------------------------------------------------------
// 8. LMSE against a naive reference.
double naive_lmse(const SpectralCube& pred, const SpectralCube& gt, int window,
                  int stride) {
  auto starts = [](int extent, int window, int stride) {
    std::vector<int> s;
    if (extent <= window) {
      s.push_back(0);
      return s;
    }
    for (int v = 0; v + window < extent; v += stride) s.push_back(v);
    s.push_back(extent - window);
    return s;
  };
  const auto ys = starts(gt.height(), window, stride);
  const auto xs = starts(gt.width(), window, stride);
  double total = 0.0, norm = 0.0;
  for (int y0 : ys)
    for (int x0 : xs) {
      const int h = std::min(window, gt.height() - y0);
      const int w = std::min(window, gt.width() - x0);
      double pp = 0.0, pg = 0.0, gg = 0.0;
      for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x)
          for (int k = 0; k < gt.bands(); ++k) {
            pp += pred.at(y, x, k) * pred.at(y, x, k);
            pg += pred.at(y, x, k) * gt.at(y, x, k);
            gg += gt.at(y, x, k) * gt.at(y, x, k);
          }
      const double a = pp > 0.0 ? std::max(0.0, pg / pp) : 0.0;
      for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x)
          for (int k = 0; k < gt.bands(); ++k) {
            const double d = a * pred.at(y, x, k) - gt.at(y, x, k);
            total += d * d;
          }
      norm += gg;
    }
  return total / norm;
}

void check_lmse_oracle() {
  SpectralCube pred = random_cube(64, 64, 8, 71, 0.0, 1.0);
  SpectralCube gt = random_cube(64, 64, 8, 72, 0.0, 1.0);
  const double diff = std::abs(lmse(pred, gt) - naive_lmse(pred, gt, 20, 10));
  bool ok = diff < 1e-12;
  if (lmse(gt, gt) != 0.0) ok = false;
  SpectralCube doubled(64, 64, 8);
  for (size_t i = 0; i < gt.data().size(); ++i)
    doubled.data()[i] = 2.0 * gt.data()[i];
  if (lmse(doubled, gt) != 0.0) ok = false;
  report(8, "windowed LMSE equals the naive reference", ok,
         "diff " + fmt(diff) + ", identity and scale invariance exact");
}

// ---------------------------------------------------------------------------
// 9. PCA basis: orthonormality, dense eigendecomposition oracle, exact span.
void jacobi_eigen(std::vector<double>& a, std::vector<double>& v, int n) {
  // cyclic Jacobi on a symmetric matrix; eigenvectors accumulate in v
  v.assign(size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[size_t(i) * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[size_t(p) * n + q] * a[size_t(p) * n + q];
    if (off < 1e-28) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[size_t(p) * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double app = a[size_t(p) * n + p], aqq = a[size_t(q) * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[size_t(k) * n + p], akq = a[size_t(k) * n + q];
          a[size_t(k) * n + p] = c * akp - s * akq;
          a[size_t(k) * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[size_t(p) * n + k], aqk = a[size_t(q) * n + k];
          a[size_t(p) * n + k] = c * apk - s * aqk;
          a[size_t(q) * n + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v[size_t(k) * n + p], vkq = v[size_t(k) * n + q];
          v[size_t(k) * n + p] = c * vkp - s * vkq;
          v[size_t(k) * n + q] = s * vkp + c * vkq;
        }
      }
  }
}

void check_pca() {
  bool ok = true;
  std::string detail;
  const int k = 12, rank = 5;
  ReflectanceLibrary lib = make_default_library(k, 300, 4242);
  BasisMatrix b = reflectance_basis_pca(lib, rank);
  const double orth = b.orthonormality_error();
  if (orth > 1e-10) ok = false;

  // oracle: normalized mean, then Jacobi eigenvectors of the deflated
  // covariance, sign-fixed the same way
  const int m = lib.count();
  std::vector<double> mean(k, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) mean[size_t(j)] += lib.sample(i)[size_t(j)];
  for (double& v : mean) v /= m;
  double mn = 0.0;
  for (double v : mean) mn += v * v;
  mn = std::sqrt(mn);
  std::vector<double> u0(mean);
  for (double& v : u0) v /= mn;
  std::vector<double> cov(size_t(k) * k, 0.0);
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q)
        cov[size_t(p) * k + q] += (lib.sample(i)[size_t(p)] - mean[size_t(p)]) *
                                  (lib.sample(i)[size_t(q)] - mean[size_t(q)]);
  for (double& v : cov) v /= m;
  // deflate: P C P with P = I - u0 u0'
  auto deflate = [&](const std::vector<double>& c) {
    std::vector<double> tmp(size_t(k) * k, 0.0), out(size_t(k) * k, 0.0);
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q) {
        double acc = c[size_t(p) * k + q];
        for (int r = 0; r < k; ++r)
          acc -= u0[size_t(p)] * u0[size_t(r)] * c[size_t(r) * k + q];
        tmp[size_t(p) * k + q] = acc;
      }
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q) {
        double acc = tmp[size_t(p) * k + q];
        for (int r = 0; r < k; ++r)
          acc -= tmp[size_t(p) * k + r] * u0[size_t(r)] * u0[size_t(q)];
        out[size_t(p) * k + q] = acc;
      }
    return out;
  };
  std::vector<double> defl = deflate(cov), evec;
  std::vector<double> evals(size_t(k), 0.0);
  jacobi_eigen(defl, evec, k);
  for (int i = 0; i < k; ++i) evals[size_t(i)] = defl[size_t(i) * k + i];
  std::vector<int> order(size_t(k), 0);
  for (int i = 0; i < k; ++i) order[size_t(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](int a2, int b2) { return evals[size_t(a2)] > evals[size_t(b2)]; });
  double worst = 0.0;
  for (int j = 0; j < k; ++j)
    worst = std::max(worst, std::abs(u0[size_t(j)] - b.at(j, 0)));
  for (int c = 1; c < rank; ++c) {
    const int src = order[size_t(c - 1)];
    // match up to sign
    double dplus = 0.0, dminus = 0.0;
    for (int j = 0; j < k; ++j) {
      const double o = evec[size_t(j) * k + src];
      dplus = std::max(dplus, std::abs(o - b.at(j, c)));
      dminus = std::max(dminus, std::abs(o + b.at(j, c)));
    }
    worst = std::max(worst, std::min(dplus, dminus));
  }
  if (worst > 1e-8) ok = false;

  // exact-span library: samples drawn from a 3-dim affine family
  {
    const int kk = 6;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> gen(3, std::vector<double>(kk));
    for (auto& g : gen)
      for (double& v : g) v = 0.1 + 0.9 * unit(rng);
    ReflectanceLibrary span_lib;
    span_lib.bands = kk;
    for (int i = 0; i < 50; ++i) {
      std::vector<double> s(kk, 0.0);
      for (int g = 0; g < 3; ++g) {
        const double c = unit(rng) / 3.0;
        for (int j = 0; j < kk; ++j) s[size_t(j)] += c * gen[size_t(g)][size_t(j)];
      }
      span_lib.samples.insert(span_lib.samples.end(), s.begin(), s.end());
    }
    BasisMatrix sb = reflectance_basis_pca(span_lib, 3);
    double recon_err = 0.0;
    for (int i = 0; i < span_lib.count(); ++i) {
      auto c = project(span_lib.sample(i), sb);
      for (int j = 0; j < kk; ++j) {
        double rec = 0.0;
        for (int cc = 0; cc < 3; ++cc) rec += sb.at(j, cc) * c[size_t(cc)];
        recon_err = std::max(recon_err,
                             std::abs(rec - span_lib.sample(i)[size_t(j)]));
      }
    }
    if (recon_err > 1e-9) ok = false;
    detail = "orth " + fmt(orth) + ", oracle " + fmt(worst) + ", span " +
             fmt(recon_err);
  }
  report(9, "PCA basis construction", ok, detail);
}

// ---------------------------------------------------------------------------
// 10. Interior beta beats the grid endpoints on a hard-edge fixture.
void check_sweep_ordering() {
  bool ok = true;
  std::string detail;
  try {
    SceneSpec spec;
    spec.height = 16;
    spec.width = 16;
    spec.bands = 6;
    spec.n_regions = 5;
    spec.seed = 77;
    spec.shading_profile = ShadingProfile::CastShadow;
    const int rank = 4;
    ReflectanceLibrary lib = make_default_library(6, 150, 4711);
    BasisMatrix br = reflectance_basis_pca(lib, rank);
    SyntheticScene sc = generate_scene(spec, br);

    DecomposeConfig cfg;
    cfg.reflectance_rank = rank;
    cfg.solver.outer_max_iter = 20;
    PixelSpectrum illum = make_default_illum(6);
    SweepResult sweep =
        sweep_params(sc.luminance, sc.gt_shading, sc.gt_reflectance, illum,
                     lib, {5000.0}, default_beta_grid(), cfg);
    const auto& table = sweep.table;
    const SweepEntry& lo = table.front();
    const SweepEntry& hi = table.back();
    size_t best_idx = 0;
    for (size_t i = 1; i < table.size(); ++i)
      if (!table[i].failed && table[i].lmse < table[best_idx].lmse)
        best_idx = i;
    ok = !lo.failed && !hi.failed && best_idx != 0 &&
         best_idx != table.size() - 1 &&
         table[best_idx].lmse < lo.lmse && table[best_idx].lmse < hi.lmse;
    detail = "beta* = " + fmt(table[best_idx].beta) + " (LMSE " +
             fmt(table[best_idx].lmse) + ") vs endpoints " + fmt(lo.lmse) +
             " / " + fmt(hi.lmse);
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  report(10, "interior beta beats both grid endpoints", ok, detail);
}

// ---------------------------------------------------------------------------
// 11. Timing probe, informational only.
void check_timing() {
  std::string detail;
  bool ok = true;
  try {
    SceneSpec spec;
    spec.height = 128;
    spec.width = 128;
    spec.bands = 30;
    spec.n_regions = 12;
    spec.seed = 9090;
    ReflectanceLibrary lib = make_default_library(30, 400, 2024);
    BasisMatrix br = reflectance_basis_pca(lib, 8);
    SyntheticScene sc = generate_scene(spec, br);
    PixelSpectrum illum = make_default_illum(30);
    DecomposeConfig cfg;
    const double t0 = now_seconds();
    DecomposeResult res = decompose(sc.luminance, illum, lib, cfg);
    const double dt = now_seconds() - t0;
    ok = dt < 60.0;
    detail = fmt(dt) + " s for 128x128x30, " +
             std::to_string(res.trace.outer_iterations) + " outer iterations";
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  report(11, "decompose 128x128x30 under 60 s", ok, detail,
         /*gating=*/false);
}

}  // namespace

int main() {
  now_seconds();  // anchor the clock
  check_dense_oracle();
  check_monotonicity();
  check_fixtures();
  check_weight_identities();
  check_cg();
  check_gradients();
  check_lmse_oracle();
  check_pca();
  check_sweep_ordering();
  check_timing();
  std::printf("%s\n", g_all_ok ? "ALL GATING CHECKS PASSED"
                               : "GATING CHECKS FAILED");
  return g_all_ok ? 0 : 1;
}
