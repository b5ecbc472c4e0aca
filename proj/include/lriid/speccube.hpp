#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lriid {

// Malformed input files (bad magic, truncated payload).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inputs that parse but violate a domain invariant (NaN, negative data,
// mismatched dimensions).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Single per-pixel spectrum of K bands.
using PixelSpectrum = std::vector<double>;

// H x W x K nonnegative raster, pixel-major: the K-band spectrum of each
// pixel is contiguous. Pixel index p = y * width + x.
class SpectralCube {
public:
  SpectralCube() = default;
  SpectralCube(int height, int width, int bands);
  SpectralCube(int height, int width, int bands, std::vector<double> data,
               std::vector<double> wavelengths = {});

  int height() const { return height_; }
  int width() const { return width_; }
  int bands() const { return bands_; }
  int pixels() const { return height_ * width_; }

  bool has_wavelengths() const { return !wavelengths_.empty(); }
  const std::vector<double>& wavelengths() const { return wavelengths_; }

  double& at(int pixel, int band) { return data_[size_t(pixel) * bands_ + band]; }
  double at(int pixel, int band) const { return data_[size_t(pixel) * bands_ + band]; }
  double& at(int y, int x, int band) { return at(y * width_ + x, band); }
  double at(int y, int x, int band) const { return at(y * width_ + x, band); }

  std::span<const double> spectrum(int pixel) const {
    return {data_.data() + size_t(pixel) * bands_, size_t(bands_)};
  }
  std::span<double> spectrum(int pixel) {
    return {data_.data() + size_t(pixel) * bands_, size_t(bands_)};
  }
  PixelSpectrum spectrum_copy(int pixel) const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double max_value() const;

  // Throws ValidationError naming the first offending index.
  void validate() const;

  // Uniform band subsampling: keeps bands 0, stride, 2*stride, ...
  SpectralCube subsample_bands(int stride) const;

private:
  int height_ = 0;
  int width_ = 0;
  int bands_ = 0;
  std::vector<double> wavelengths_;  // empty or strictly increasing, size K
  std::vector<double> data_;         // pixel-major, size H*W*K
};

// MSC binary container. Little-endian throughout:
//   "MSC1" | u32 H | u32 W | u32 K | flag byte (bit0: wavelengths)
//   [K float32 wavelengths] | H*W*K float32 payload, pixel-major.
SpectralCube load_cube(const std::filesystem::path& path);
void save_cube(const SpectralCube& cube, const std::filesystem::path& path);

// Forward model l = s .* r.
SpectralCube elementwise_mul(const SpectralCube& s, const SpectralCube& r);

// out[p,k] = l[p,k] / max(r[p,k], eps). eps <= 0 picks the default,
// 1e-6 of r's max value.
SpectralCube safe_divide(const SpectralCube& l, const SpectralCube& r,
                         double eps = -1.0);

// Pseudo-RGB rendering: rgb[p,c] = sum_k response[c][k] * cube[p,k], then a
// joint min-max normalization of all three channels to [0,1]. An all-equal
// image maps to zeros. Returned channel-major: rgb[c][p].
std::array<std::vector<double>, 3> pseudo_rgb(
    const SpectralCube& cube, const std::array<std::vector<double>, 3>& response);

// Single-spectrum CSV: one "wavelength,value" line per band.
void save_spectrum_csv(const std::filesystem::path& path,
                       const std::vector<double>& wavelengths,
                       const PixelSpectrum& values);
std::pair<std::vector<double>, PixelSpectrum> load_spectrum_csv(
    const std::filesystem::path& path);

}  // namespace lriid
