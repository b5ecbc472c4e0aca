#pragma once

#include "lriid/basis.hpp"

namespace lriid {

// Synthetic smooth-spectra reflectance library over 450-700 nm: sums of 3-5
// Gaussian bumps clipped to [0,1], 400 samples. Deterministic for a seed.
ReflectanceLibrary make_default_library(int bands = 30, int samples = 400,
                                        uint64_t seed = 2024);

// Three smooth Gaussian-like response bumps over 450-700 nm for pseudo-RGB
// rendering; diagnostic only.
std::array<std::vector<double>, 3> make_default_response(int bands);

// Smooth broadband illumination over the same range.
PixelSpectrum make_default_illum(int bands);

std::vector<double> make_wavelengths(int bands, double lo = 450.0,
                                     double hi = 700.0);

}  // namespace lriid
