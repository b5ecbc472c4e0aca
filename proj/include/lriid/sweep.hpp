#pragma once

#include "lriid/solve.hpp"

namespace lriid {

struct SweepEntry {
  double alpha = 0.0;
  double beta = 0.0;
  double lmse = 0.0;      // combined shading+reflectance mean
  bool failed = false;
  std::string error;
};

struct SweepResult {
  WeightParams best;
  std::vector<SweepEntry> table;  // grid order: alpha-major, beta-minor
};

// Runs the full decomposition per (alpha, beta) grid point against ground
// truth. Best point by smallest combined LMSE, ties broken by smaller alpha
// then smaller beta. Grid points evaluate independently; the table is in
// grid order regardless of scheduling.
SweepResult sweep_params(const SpectralCube& cube,
                         const SpectralCube& gt_shading,
                         const SpectralCube& gt_reflectance,
                         const PixelSpectrum& illum,
                         const ReflectanceLibrary& library,
                         const std::vector<double>& alphas,
                         const std::vector<double>& betas,
                         const DecomposeConfig& config,
                         const LmseConfig& lmse_cfg = {});

void save_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path);

// The built-in grids: 20 alphas linear in [1000, 10000], 50 betas
// log-spaced in [1e-5, 1e-2].
std::vector<double> default_alpha_grid();
std::vector<double> default_beta_grid();

}  // namespace lriid
