#pragma once

#include <cstdint>

#include "lriid/basis.hpp"
#include "lriid/solve.hpp"

namespace lriid {

enum class ShadingProfile { SmoothGradient, CastShadow, Spotlight };

struct SceneSpec {
  int height = 16;
  int width = 16;
  int bands = 6;
  PixelSpectrum illum;  // length bands; defaults to a smooth bump if empty
  int n_regions = 4;
  ShadingProfile shading_profile = ShadingProfile::SmoothGradient;
  double noise_sigma = 0.0;
  uint64_t seed = 1;
  bool in_model = true;  // force reflectances into span(B_r)
};

struct SyntheticScene {
  SpectralCube luminance;
  SpectralCube gt_shading;
  SpectralCube gt_reflectance;
};

// Piecewise-constant reflectance over a seeded Voronoi partition, rank-1
// shading along the normalized illumination, luminance from the forward
// model (exact at noise 0).
SyntheticScene generate_scene(const SceneSpec& spec, const BasisMatrix& br);

ShadingProfile shading_profile_from_string(const std::string& name);
std::string to_string(ShadingProfile profile);

// The canonical fixture set used by the regression suite: six noise-free
// in-model scenes covering all shading profiles at sizes up to 64x64x8.
std::vector<SceneSpec> shipped_scene_specs();

// Independent dense reference for the whole solve: every energy term
// assembled as a dense matrix straight from its definition, normal equations
// solved by direct factorization, same alternating schedule as the sparse
// pipeline. Guarded to tiny instances.
struct BruteForceResult {
  std::vector<double> s_initial;
  std::vector<double> r_initial;
  std::vector<double> s;
  std::vector<double> r;
};
BruteForceResult brute_force_decompose(const SpectralCube& cube,
                                       const BasisMatrix& bs,
                                       const BasisMatrix& br,
                                       const WeightField& weights,
                                       const SolverConfig& config,
                                       int outer_iterations);

}  // namespace lriid
