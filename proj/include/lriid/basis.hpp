#pragma once

#include <vector>

#include "lriid/speccube.hpp"

namespace lriid {

// K x J spectral subspace basis, column-major storage.
class BasisMatrix {
public:
  BasisMatrix() = default;
  BasisMatrix(int bands, int rank, std::vector<double> columns);

  int bands() const { return bands_; }
  int rank() const { return rank_; }
  double at(int band, int col) const {
    return columns_[size_t(col) * bands_ + band];
  }
  std::span<const double> column(int col) const {
    return {columns_.data() + size_t(col) * bands_, size_t(bands_)};
  }
  const std::vector<double>& columns() const { return columns_; }

  // max |B'B - I| entry; 0 for exactly orthonormal bases.
  double orthonormality_error() const;

private:
  int bands_ = 0;
  int rank_ = 0;
  std::vector<double> columns_;  // column-major K*J
};

// M x K library of measured reflectance spectra, row per sample.
struct ReflectanceLibrary {
  int bands = 0;
  std::vector<double> wavelengths;  // optional, size bands
  std::vector<double> samples;      // row-major M*K, values in [0,1]

  int count() const { return bands ? int(samples.size()) / bands : 0; }
  std::span<const double> sample(int i) const {
    return {samples.data() + size_t(i) * bands, size_t(bands)};
  }
  void validate() const;
};

// J_s = 1 basis: the illumination spectrum normalized to unit length.
BasisMatrix shading_basis(const PixelSpectrum& illum);

// Column 1 is the normalized library mean; the remaining rank-1 columns are
// the leading principal directions of the centered library restricted to the
// mean's orthogonal complement. The expansion stays purely linear and the
// columns come out exactly orthonormal. Column signs are fixed so each
// column's largest-magnitude entry is positive.
BasisMatrix reflectance_basis_pca(const ReflectanceLibrary& lib, int rank);

// Least-squares coefficients of spectrum in the basis (B' s for orthonormal B).
std::vector<double> project(std::span<const double> spectrum,
                            const BasisMatrix& basis);

struct ReconstructionReport {
  double clamp_fraction = 0.0;  // fraction of entries clamped up to 0
};

// Per-pixel spectrum = B * c, negatives clamped to 0.
SpectralCube reconstruct_field(const std::vector<double>& coeffs, int height,
                               int width, const BasisMatrix& basis,
                               ReconstructionReport* report = nullptr);

// Library CSV: header row of wavelengths, one sample per subsequent row.
ReflectanceLibrary load_library_csv(const std::filesystem::path& path);
void save_library_csv(const ReflectanceLibrary& lib,
                      const std::filesystem::path& path);
void save_basis_csv(const BasisMatrix& basis, const std::filesystem::path& path);

}  // namespace lriid
