#include "lriid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lriid {

namespace {

// Window anchor positions along one axis: 0, stride, 2*stride, ... with the
// final window clipped so it ends at the boundary.
std::vector<int> window_starts(int extent, int window, int stride) {
  std::vector<int> starts;
  if (extent <= window) {
    starts.push_back(0);
    return starts;
  }
  for (int s = 0; s + window <= extent; s += stride) starts.push_back(s);
  if (starts.back() + window < extent) starts.push_back(extent - window);
  return starts;
}

}  // namespace

double lmse(const SpectralCube& pred, const SpectralCube& gt,
            const LmseConfig& cfg) {
  if (pred.height() != gt.height() || pred.width() != gt.width() ||
      pred.bands() != gt.bands())
    throw ValidationError("lmse: dimension mismatch");
  if (cfg.window < 2) throw ValidationError("lmse: window must be >= 2");
  const int stride = cfg.stride > 0 ? cfg.stride : cfg.window / 2;
  if (stride < 1 || stride > cfg.window)
    throw ValidationError("lmse: stride must be in [1, window]");

  const auto ys = window_starts(gt.height(), cfg.window, stride);
  const auto xs = window_starts(gt.width(), cfg.window, stride);
  const int wy = std::min(cfg.window, gt.height());
  const int wx = std::min(cfg.window, gt.width());

  double err_total = 0.0;
  double gt_total = 0.0;
  for (int y0 : ys)
    for (int x0 : xs) {
      double pg = 0.0, pp = 0.0, gg = 0.0;
      for (int y = y0; y < y0 + wy; ++y)
        for (int x = x0; x < x0 + wx; ++x)
          for (int k = 0; k < gt.bands(); ++k) {
            const double p = pred.at(y, x, k);
            const double g = gt.at(y, x, k);
            pg += p * g;
            pp += p * p;
            gg += g * g;
          }
      double a = 1.0;
      if (cfg.scale_invariant) a = pp > 0.0 ? std::max(0.0, pg / pp) : 0.0;
      double err = 0.0;
      for (int y = y0; y < y0 + wy; ++y)
        for (int x = x0; x < x0 + wx; ++x)
          for (int k = 0; k < gt.bands(); ++k) {
            const double d = a * pred.at(y, x, k) - gt.at(y, x, k);
            err += d * d;
          }
      err_total += err;
      gt_total += gg;
    }
  if (gt_total <= 0.0)
    throw ValidationError("lmse: ground truth is identically zero");
  return err_total / gt_total;
}

double combined_lmse(const SpectralCube& pred_s, const SpectralCube& gt_s,
                     const SpectralCube& pred_r, const SpectralCube& gt_r,
                     const LmseConfig& cfg) {
  return 0.5 * (lmse(pred_s, gt_s, cfg) + lmse(pred_r, gt_r, cfg));
}

PixelSpectrum spectral_curve(const SpectralCube& cube, const Roi& roi) {
  if (roi.height <= 0 || roi.width <= 0)
    throw ValidationError("spectral_curve: empty roi");
  if (roi.y0 < 0 || roi.x0 < 0 || roi.y0 + roi.height > cube.height() ||
      roi.x0 + roi.width > cube.width())
    throw ValidationError("spectral_curve: roi out of bounds");
  PixelSpectrum mean(size_t(cube.bands()), 0.0);
  for (int y = roi.y0; y < roi.y0 + roi.height; ++y)
    for (int x = roi.x0; x < roi.x0 + roi.width; ++x)
      for (int k = 0; k < cube.bands(); ++k)
        mean[size_t(k)] += cube.at(y, x, k);
  const double count = double(roi.height) * roi.width;
  for (double& v : mean) v /= count;
  return mean;
}

}  // namespace lriid
