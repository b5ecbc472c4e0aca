#pragma once

#include "lriid/speccube.hpp"

namespace lriid {

// Windowed, per-window scale-fitted MSE, the standard intrinsic-image score:
// half-overlapping windows, the final window in each axis clipped to the
// image boundary, window errors normalized by the zero predictor's error.
struct LmseConfig {
  int window = 20;
  int stride = 0;  // 0 means window / 2
  bool scale_invariant = true;
};

double lmse(const SpectralCube& pred, const SpectralCube& gt,
            const LmseConfig& cfg = {});

// Mean of shading and reflectance LMSE.
double combined_lmse(const SpectralCube& pred_s, const SpectralCube& gt_s,
                     const SpectralCube& pred_r, const SpectralCube& gt_r,
                     const LmseConfig& cfg = {});

struct Roi {
  int y0, x0, height, width;
};

// Per-band mean spectrum over a rectangular region.
PixelSpectrum spectral_curve(const SpectralCube& cube, const Roi& roi);

}  // namespace lriid
