#include "lriid/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lriid {

std::vector<double> make_wavelengths(int bands, double lo, double hi) {
  std::vector<double> wl(static_cast<size_t>(bands));
  for (int k = 0; k < bands; ++k)
    wl[size_t(k)] =
        bands > 1 ? lo + (hi - lo) * double(k) / double(bands - 1) : lo;
  return wl;
}

ReflectanceLibrary make_default_library(int bands, int samples, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nbumps(3, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ReflectanceLibrary lib;
  lib.bands = bands;
  lib.wavelengths = make_wavelengths(bands);
  lib.samples.reserve(size_t(samples) * bands);
  for (int i = 0; i < samples; ++i) {
    std::vector<double> s(static_cast<size_t>(bands), 0.05);
    const int nb = nbumps(rng);
    for (int b = 0; b < nb; ++b) {
      const double center = unit(rng);
      const double width = 0.06 + 0.3 * unit(rng);
      const double amp = 0.15 + 0.85 * unit(rng);
      for (int k = 0; k < bands; ++k) {
        const double t =
            bands > 1 ? double(k) / double(bands - 1) : 0.5;
        const double d = (t - center) / width;
        s[size_t(k)] += amp * std::exp(-0.5 * d * d);
      }
    }
    for (double v : s) lib.samples.push_back(std::clamp(v, 0.0, 1.0));
  }
  lib.validate();
  return lib;
}

std::array<std::vector<double>, 3> make_default_response(int bands) {
  // Bump centers near 600 (R), 550 (G), 470 (B) nm over the 450-700 range.
  const double centers[3] = {0.60, 0.40, 0.08};
  const double widths[3] = {0.18, 0.15, 0.12};
  std::array<std::vector<double>, 3> response;
  for (int c = 0; c < 3; ++c) {
    response[size_t(c)].resize(size_t(bands));
    for (int k = 0; k < bands; ++k) {
      const double t = bands > 1 ? double(k) / double(bands - 1) : 0.5;
      const double d = (t - centers[c]) / widths[c];
      response[size_t(c)][size_t(k)] = std::exp(-0.5 * d * d);
    }
  }
  return response;
}

PixelSpectrum make_default_illum(int bands) {
  PixelSpectrum illum(static_cast<size_t>(bands));
  for (int k = 0; k < bands; ++k) {
    const double t = bands > 1 ? double(k) / double(bands - 1) : 0.5;
    illum[size_t(k)] = 0.7 + 0.3 * std::exp(-6.0 * (t - 0.4) * (t - 0.4));
  }
  return illum;
}

}  // namespace lriid
