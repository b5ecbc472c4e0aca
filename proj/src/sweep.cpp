#include "lriid/sweep.hpp"

#include <cmath>
#include <fstream>

namespace lriid {

SweepResult sweep_params(const SpectralCube& cube,
                         const SpectralCube& gt_shading,
                         const SpectralCube& gt_reflectance,
                         const PixelSpectrum& illum,
                         const ReflectanceLibrary& library,
                         const std::vector<double>& alphas,
                         const std::vector<double>& betas,
                         const DecomposeConfig& config,
                         const LmseConfig& lmse_cfg) {
  if (alphas.empty() || betas.empty())
    throw ValidationError("sweep_params: empty grid");
  SweepResult result;
  result.table.resize(alphas.size() * betas.size());
#pragma omp parallel for schedule(dynamic) collapse(2)
  for (long long ia = 0; ia < (long long)alphas.size(); ++ia)
    for (long long ib = 0; ib < (long long)betas.size(); ++ib) {
      SweepEntry& e = result.table[size_t(ia) * betas.size() + size_t(ib)];
      e.alpha = alphas[size_t(ia)];
      e.beta = betas[size_t(ib)];
      try {
        DecomposeConfig cfg = config;
        cfg.weights = {e.alpha, e.beta};
        DecomposeResult d = decompose(cube, illum, library, cfg);
        e.lmse = combined_lmse(d.shading, gt_shading, d.reflectance,
                               gt_reflectance, lmse_cfg);
      } catch (const std::exception& ex) {
        e.failed = true;
        e.error = ex.what();
      }
    }
  const SweepEntry* best = nullptr;
  for (const auto& e : result.table) {
    if (e.failed) continue;
    if (!best || e.lmse < best->lmse ||
        (e.lmse == best->lmse &&
         (e.alpha < best->alpha ||
          (e.alpha == best->alpha && e.beta < best->beta))))
      best = &e;
  }
  if (!best) throw std::runtime_error("sweep_params: every grid point failed");
  result.best = {best->alpha, best->beta};
  return result;
}

void save_sweep_csv(const SweepResult& sweep,
                    const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("sweep CSV: cannot write " + path.string());
  os.precision(12);
  os << "alpha,beta,lmse,status\n";
  for (const auto& e : sweep.table) {
    os << e.alpha << "," << e.beta << ",";
    if (e.failed)
      os << ",failed";
    else
      os << e.lmse << ",ok";
    os << "\n";
  }
}

std::vector<double> default_alpha_grid() {
  return linear_grid(1000.0, 10000.0, 20);
}

std::vector<double> default_beta_grid() { return log_grid(1e-5, 1e-2, 50); }

}  // namespace lriid
