#include "lriid/synth.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace lriid {

namespace {

PixelSpectrum default_illum(int bands) {
  // Smooth broadband bump, vaguely daylight-shaped.
  PixelSpectrum illum(static_cast<size_t>(bands));
  for (int k = 0; k < bands; ++k) {
    const double t = bands > 1 ? double(k) / double(bands - 1) : 0.5;
    illum[size_t(k)] = 0.6 + 0.4 * std::exp(-8.0 * (t - 0.45) * (t - 0.45));
  }
  return illum;
}

PixelSpectrum smooth_random_spectrum(std::mt19937_64& rng, int bands) {
  std::uniform_int_distribution<int> nbumps(3, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PixelSpectrum s(static_cast<size_t>(bands), 0.0);
  const int nb = nbumps(rng);
  for (int b = 0; b < nb; ++b) {
    const double center = unit(rng);
    const double width = 0.08 + 0.25 * unit(rng);
    const double amp = 0.2 + 0.8 * unit(rng);
    for (int k = 0; k < bands; ++k) {
      const double t = bands > 1 ? double(k) / double(bands - 1) : 0.5;
      const double d = (t - center) / width;
      s[size_t(k)] += amp * std::exp(-0.5 * d * d);
    }
  }
  double hi = *std::max_element(s.begin(), s.end());
  for (double& v : s) v = 0.1 + 0.9 * std::min(1.0, v / hi);
  return s;
}

double shading_scalar(const SceneSpec& spec, int y, int x) {
  const double ty =
      spec.height > 1 ? double(y) / double(spec.height - 1) : 0.5;
  const double tx = spec.width > 1 ? double(x) / double(spec.width - 1) : 0.5;
  switch (spec.shading_profile) {
    case ShadingProfile::SmoothGradient:
      return 0.3 + 0.7 * 0.5 * (tx + ty);
    case ShadingProfile::CastShadow: {
      // Half-plane dimmed to 0.4 with a 2-pixel soft ramp at the boundary.
      const double edge = double(spec.width) / 2.0;
      const double ramp = std::clamp((double(x) - edge) / 2.0 + 0.5, 0.0, 1.0);
      return (0.4 + 0.6 * (1.0 - ramp)) * (0.8 + 0.2 * ty);
    }
    case ShadingProfile::Spotlight: {
      const double dx = tx - 0.5, dy = ty - 0.5;
      return 0.25 + 0.75 * std::exp(-(dx * dx + dy * dy) / 0.08);
    }
  }
  return 1.0;
}

}  // namespace

ShadingProfile shading_profile_from_string(const std::string& name) {
  if (name == "smooth-gradient") return ShadingProfile::SmoothGradient;
  if (name == "cast-shadow") return ShadingProfile::CastShadow;
  if (name == "spotlight") return ShadingProfile::Spotlight;
  throw ValidationError("unknown shading profile '" + name + "'");
}

std::string to_string(ShadingProfile profile) {
  switch (profile) {
    case ShadingProfile::SmoothGradient: return "smooth-gradient";
    case ShadingProfile::CastShadow: return "cast-shadow";
    case ShadingProfile::Spotlight: return "spotlight";
  }
  return "?";
}

std::vector<SceneSpec> shipped_scene_specs() {
  std::vector<SceneSpec> specs;
  auto add = [&](int h, int w, int k, ShadingProfile profile, int regions,
                 uint64_t seed) {
    SceneSpec s;
    s.height = h;
    s.width = w;
    s.bands = k;
    s.shading_profile = profile;
    s.n_regions = regions;
    s.seed = seed;
    specs.push_back(s);
  };
  add(16, 16, 6, ShadingProfile::SmoothGradient, 4, 101);
  add(16, 16, 6, ShadingProfile::CastShadow, 4, 102);
  add(16, 16, 6, ShadingProfile::Spotlight, 4, 103);
  add(32, 32, 6, ShadingProfile::SmoothGradient, 6, 104);
  add(48, 48, 8, ShadingProfile::CastShadow, 8, 105);
  add(64, 64, 8, ShadingProfile::Spotlight, 8, 106);
  return specs;
}

SyntheticScene generate_scene(const SceneSpec& spec, const BasisMatrix& br) {
  if (spec.height < 2 || spec.width < 2 || spec.bands < 1)
    throw ValidationError("generate_scene: dimensions must be >= 2");
  if (spec.noise_sigma < 0.0)
    throw ValidationError("generate_scene: negative noise sigma");
  const int n = spec.height * spec.width;
  if (spec.n_regions < 1 || spec.n_regions > n)
    throw ValidationError("generate_scene: n_regions exceeds pixel count");
  if (br.bands() != spec.bands)
    throw ValidationError("generate_scene: basis band count mismatch");

  std::mt19937_64 rng(spec.seed);

  // Seeded Voronoi partition into reflectance regions.
  std::uniform_int_distribution<int> ry(0, spec.height - 1);
  std::uniform_int_distribution<int> rx(0, spec.width - 1);
  std::vector<std::pair<int, int>> sites(static_cast<size_t>(spec.n_regions));
  for (auto& s : sites) s = {ry(rng), rx(rng)};
  std::vector<int> region(static_cast<size_t>(n));
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x) {
      int best = 0;
      int64_t best_d = INT64_MAX;
      for (int i = 0; i < spec.n_regions; ++i) {
        const int64_t dy = y - sites[size_t(i)].first;
        const int64_t dx = x - sites[size_t(i)].second;
        const int64_t d = dy * dy + dx * dx;
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      region[size_t(y) * spec.width + x] = best;
    }

  // One reflectance spectrum per region, optionally forced into span(B_r).
  std::vector<PixelSpectrum> spectra(static_cast<size_t>(spec.n_regions));
  for (auto& s : spectra) {
    s = smooth_random_spectrum(rng, spec.bands);
    if (spec.in_model) {
      std::vector<double> c = project(s, br);
      PixelSpectrum proj(static_cast<size_t>(spec.bands), 0.0);
      for (int k = 0; k < spec.bands; ++k)
        for (int j = 0; j < br.rank(); ++j)
          proj[size_t(k)] += br.at(k, j) * c[size_t(j)];
      // Keep the spectrum positive without leaving the subspace: push along
      // the basis' first column (the library mean direction) if needed, then
      // rescale.
      auto u0 = br.column(0);
      const double u0min = *std::min_element(u0.begin(), u0.end());
      double lo = *std::min_element(proj.begin(), proj.end());
      if (lo < 0.05 && u0min > 0.0) {
        double t = 0.0;
        for (int k = 0; k < spec.bands; ++k)
          t = std::max(t, (0.05 - proj[size_t(k)]) / u0[size_t(k)]);
        for (int k = 0; k < spec.bands; ++k) proj[size_t(k)] += t * u0[size_t(k)];
      }
      double hi = *std::max_element(proj.begin(), proj.end());
      if (hi > 1.0)
        for (double& v : proj) v /= hi;
      lo = *std::min_element(proj.begin(), proj.end());
      if (lo < 0.0)
        throw std::runtime_error("generate_scene: in-model spectrum not positive");
      s = std::move(proj);
    }
  }

  PixelSpectrum illum =
      spec.illum.empty() ? default_illum(spec.bands) : spec.illum;
  if (illum.size() != size_t(spec.bands))
    throw ValidationError("generate_scene: illumination length mismatch");
  double inorm = 0.0;
  for (double v : illum) inorm += v * v;
  inorm = std::sqrt(inorm);
  if (inorm == 0.0) throw ValidationError("generate_scene: zero illumination");

  SyntheticScene scene{SpectralCube(spec.height, spec.width, spec.bands),
                       SpectralCube(spec.height, spec.width, spec.bands),
                       SpectralCube(spec.height, spec.width, spec.bands)};
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x) {
      const int p = y * spec.width + x;
      const double sigma = shading_scalar(spec, y, x);
      const auto& refl = spectra[size_t(region[size_t(p)])];
      for (int k = 0; k < spec.bands; ++k) {
        const double sv = sigma * illum[size_t(k)] / inorm;
        scene.gt_shading.at(p, k) = sv;
        scene.gt_reflectance.at(p, k) = refl[size_t(k)];
        scene.luminance.at(p, k) = sv * refl[size_t(k)];
      }
    }

  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (double& v : scene.luminance.data())
      v = std::max(0.0, v + noise(rng));
  }
  scene.luminance.validate();
  return scene;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dense assembly straight from the energy definitions; intentionally a
// separate code path from the sparse operators.
struct DenseTerms {
  MatrixXd w_bs, v_lbs, w_lbr, v_br;  // pair terms
  MatrixXd m_s, m_r;                  // generic constraint per basis
  VectorXd lum;

  DenseTerms(const SpectralCube& cube, const BasisMatrix& bs,
             const BasisMatrix& br, const WeightField& weights) {
    const int n = cube.pixels();
    const int k = cube.bands();
    const int js = bs.rank(), jr = br.rank();
    const int64_t pr = int64_t(weights.size());
    w_bs = MatrixXd::Zero(pr * k, n * js);
    v_lbs = MatrixXd::Zero(pr * k, n * js);
    w_lbr = MatrixXd::Zero(pr * k, n * jr);
    v_br = MatrixXd::Zero(pr * k, n * jr);
    for (int64_t i = 0; i < pr; ++i) {
      const int p = weights.pairs[size_t(i)].p;
      const int q = weights.pairs[size_t(i)].q;
      // shading-constancy rows carry v (chromatic edge => reflectance edge,
      // shading expected constant); reflectance-constancy rows carry w
      const double sc = weights.v[size_t(i)];
      const double rc = weights.w[size_t(i)];
      for (int band = 0; band < k; ++band) {
        const double lp = cube.at(p, band);
        const double lq = cube.at(q, band);
        for (int c = 0; c < js; ++c) {
          const double bsc = bs.at(band, c);
          // sc (s_q - s_p): shading expected constant across the pair
          w_bs(i * k + band, int64_t(q) * js + c) += sc * bsc;
          w_bs(i * k + band, int64_t(p) * js + c) -= sc * bsc;
          // rc (L_p s_q - L_q s_p)
          v_lbs(i * k + band, int64_t(q) * js + c) += rc * lp * bsc;
          v_lbs(i * k + band, int64_t(p) * js + c) -= rc * lq * bsc;
        }
        for (int c = 0; c < jr; ++c) {
          const double brc = br.at(band, c);
          // sc (L_p r_q - L_q r_p)
          w_lbr(i * k + band, int64_t(q) * jr + c) += sc * lp * brc;
          w_lbr(i * k + band, int64_t(p) * jr + c) -= sc * lq * brc;
          // rc (r_p - r_q)
          v_br(i * k + band, int64_t(p) * jr + c) += rc * brc;
          v_br(i * k + band, int64_t(q) * jr + c) -= rc * brc;
        }
      }
    }
    m_s = MatrixXd::Zero(int64_t(n) * k, int64_t(n) * js);
    m_r = MatrixXd::Zero(int64_t(n) * k, int64_t(n) * jr);
    for (int p = 0; p < n; ++p)
      for (int band = 0; band < k; ++band) {
        for (int c = 0; c < js; ++c)
          m_s(int64_t(p) * k + band, int64_t(p) * js + c) = bs.at(band, c);
        for (int c = 0; c < jr; ++c)
          m_r(int64_t(p) * k + band, int64_t(p) * jr + c) = br.at(band, c);
      }
    lum = Eigen::Map<const VectorXd>(cube.data().data(),
                                     int64_t(cube.data().size()));
  }
};

MatrixXd dense_data_operator(const VectorXd& fixed, const BasisMatrix& fb,
                             const BasisMatrix& free_b, int n) {
  const int k = fb.bands();
  const int jf = fb.rank(), j = free_b.rank();
  MatrixXd q = MatrixXd::Zero(int64_t(n) * k, int64_t(n) * j);
  for (int p = 0; p < n; ++p)
    for (int band = 0; band < k; ++band) {
      double f = 0.0;
      for (int c = 0; c < jf; ++c)
        f += fb.at(band, c) * fixed[int64_t(p) * jf + c];
      for (int c = 0; c < j; ++c)
        q(int64_t(p) * k + band, int64_t(p) * j + c) = f * free_b.at(band, c);
    }
  return q;
}

}  // namespace

BruteForceResult brute_force_decompose(const SpectralCube& cube,
                                       const BasisMatrix& bs,
                                       const BasisMatrix& br,
                                       const WeightField& weights,
                                       const SolverConfig& config,
                                       int outer_iterations) {
  const int n = cube.pixels();
  const int64_t unknowns = int64_t(n) * (bs.rank() + br.rank());
  if (unknowns > 300)
    throw ValidationError("brute_force_decompose: instance too large (" +
                          std::to_string(unknowns) + " unknowns)");

  DenseTerms t(cube, bs, br, weights);
  const double l1 = config.lambda1, l2 = config.lambda2,
               ld = config.lambda_data;

  // Initial shading (generic constraint, no data term).
  MatrixXd qs0 = t.w_bs.transpose() * t.w_bs +
                 l1 * t.v_lbs.transpose() * t.v_lbs +
                 l2 * t.m_s.transpose() * t.m_s;
  VectorXd s = qs0.ldlt().solve(l2 * t.m_s.transpose() * t.lum);

  // Initial reflectance (generic constraint + data term at the shading
  // estimate).
  MatrixXd q_s = dense_data_operator(s, bs, br, n);
  MatrixXd qr0 = t.w_lbr.transpose() * t.w_lbr +
                 l1 * t.v_br.transpose() * t.v_br +
                 l2 * t.m_r.transpose() * t.m_r + ld * q_s.transpose() * q_s;
  VectorXd r = qr0.ldlt().solve(ld * q_s.transpose() * t.lum +
                                l2 * t.m_r.transpose() * t.lum);

  BruteForceResult out;
  out.s_initial.assign(s.data(), s.data() + s.size());
  out.r_initial.assign(r.data(), r.data() + r.size());

  for (int it = 0; it < outer_iterations; ++it) {
    MatrixXd q_r = dense_data_operator(r, br, bs, n);
    MatrixXd qs = t.w_bs.transpose() * t.w_bs +
                  l1 * t.v_lbs.transpose() * t.v_lbs +
                  2.0 * ld * q_r.transpose() * q_r;
    s = qs.ldlt().solve(2.0 * ld * q_r.transpose() * t.lum);

    q_s = dense_data_operator(s, bs, br, n);
    MatrixXd qr = t.w_lbr.transpose() * t.w_lbr +
                  l1 * t.v_br.transpose() * t.v_br +
                  2.0 * ld * q_s.transpose() * q_s;
    r = qr.ldlt().solve(2.0 * ld * q_s.transpose() * t.lum);

    // Same scale control as the sparse pipeline.
    const double a =
        (t.w_bs * s).squaredNorm() + l1 * (t.v_lbs * s).squaredNorm();
    const double b =
        (t.w_lbr * r).squaredNorm() + l1 * (t.v_br * r).squaredNorm();
    if (a > 0.0 && b > 0.0) {
      const double c = std::pow(b / a, 0.25);
      s *= c;
      r /= c;
    }
  }
  out.s.assign(s.data(), s.data() + s.size());
  out.r.assign(r.data(), r.data() + r.size());
  return out;
}

}  // namespace lriid
