#include "lriid/basis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lriid {

BasisMatrix::BasisMatrix(int bands, int rank, std::vector<double> columns)
    : bands_(bands), rank_(rank), columns_(std::move(columns)) {
  if (bands_ <= 0 || rank_ <= 0 || rank_ > bands_)
    throw ValidationError("BasisMatrix: invalid dimensions");
  if (columns_.size() != size_t(bands_) * rank_)
    throw ValidationError("BasisMatrix: column data size mismatch");
  for (double v : columns_)
    if (!std::isfinite(v)) throw ValidationError("BasisMatrix: non-finite entry");
}

double BasisMatrix::orthonormality_error() const {
  double err = 0.0;
  for (int a = 0; a < rank_; ++a)
    for (int b = 0; b < rank_; ++b) {
      double dot = 0.0;
      for (int k = 0; k < bands_; ++k) dot += at(k, a) * at(k, b);
      err = std::max(err, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  return err;
}

void ReflectanceLibrary::validate() const {
  if (bands <= 0 || samples.empty() || samples.size() % size_t(bands) != 0)
    throw ValidationError("ReflectanceLibrary: inconsistent sizes");
  for (double v : samples)
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("ReflectanceLibrary: negative or non-finite sample");
  if (!wavelengths.empty() && wavelengths.size() != size_t(bands))
    throw ValidationError("ReflectanceLibrary: wavelength count mismatch");
}

BasisMatrix shading_basis(const PixelSpectrum& illum) {
  double norm = 0.0;
  for (double v : illum) {
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("shading_basis: illumination must be nonnegative");
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) throw ValidationError("shading_basis: zero illumination spectrum");
  std::vector<double> col(illum.size());
  for (size_t k = 0; k < illum.size(); ++k) col[k] = illum[k] / norm;
  return BasisMatrix(int(illum.size()), 1, std::move(col));
}

static void fix_column_sign(Eigen::Ref<Eigen::VectorXd> col) {
  int idx = 0;
  col.cwiseAbs().maxCoeff(&idx);
  if (col[idx] < 0.0) col = -col;
}

BasisMatrix reflectance_basis_pca(const ReflectanceLibrary& lib, int rank) {
  lib.validate();
  const int k = lib.bands;
  const int m = lib.count();
  if (rank < 1 || rank > std::min(m, k))
    throw ValidationError("reflectance_basis_pca: rank out of range");

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      x(lib.samples.data(), m, k);
  Eigen::VectorXd mean = x.colwise().mean();
  if (mean.norm() == 0.0)
    throw ValidationError("reflectance_basis_pca: zero-mean library");
  Eigen::VectorXd u0 = mean / mean.norm();

  Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / double(m);
  // Restrict to the orthogonal complement of u0 so every column beyond the
  // first is orthogonal to the mean direction.
  Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(k, k) - u0 * u0.transpose();
  Eigen::MatrixXd cov_c = proj * cov * proj;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov_c);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("reflectance_basis_pca: eigendecomposition failed");
  // Eigen returns ascending eigenvalues; take the top rank-1 descending.
  const Eigen::VectorXd evals = eig.eigenvalues();
  const Eigen::MatrixXd evecs = eig.eigenvectors();
  const double scale = std::max(evals.cwiseAbs().maxCoeff(), 1.0);
  int achievable = 1;
  for (int i = 0; i < k; ++i)
    if (evals[i] > 1e-12 * scale) achievable++;
  if (achievable < rank)
    throw ValidationError("reflectance_basis_pca: library rank " +
                          std::to_string(achievable) +
                          " below requested rank " + std::to_string(rank));

  Eigen::MatrixXd basis(k, rank);
  basis.col(0) = u0;
  for (int j = 1; j < rank; ++j) basis.col(j) = evecs.col(k - j);
  for (int j = 0; j < rank; ++j) fix_column_sign(basis.col(j));

  std::vector<double> cols(size_t(k) * rank);
  for (int j = 0; j < rank; ++j)
    for (int i = 0; i < k; ++i) cols[size_t(j) * k + i] = basis(i, j);
  return BasisMatrix(k, rank, std::move(cols));
}

std::vector<double> project(std::span<const double> spectrum,
                            const BasisMatrix& basis) {
  if (spectrum.size() != size_t(basis.bands()))
    throw ValidationError("project: spectrum length mismatch");
  Eigen::Map<const Eigen::MatrixXd> b(basis.columns().data(), basis.bands(),
                                      basis.rank());
  Eigen::Map<const Eigen::VectorXd> s(spectrum.data(), spectrum.size());
  Eigen::VectorXd c = b.colPivHouseholderQr().solve(s);
  return std::vector<double>(c.data(), c.data() + c.size());
}

SpectralCube reconstruct_field(const std::vector<double>& coeffs, int height,
                               int width, const BasisMatrix& basis,
                               ReconstructionReport* report) {
  const int n = height * width;
  const int j = basis.rank();
  const int k = basis.bands();
  if (coeffs.size() != size_t(n) * j)
    throw ValidationError("reconstruct_field: coefficient length mismatch");
  SpectralCube out(height, width, k);
  int64_t clamped = 0;
  for (int p = 0; p < n; ++p) {
    for (int band = 0; band < k; ++band) {
      double acc = 0.0;
      for (int c = 0; c < j; ++c)
        acc += basis.at(band, c) * coeffs[size_t(p) * j + c];
      if (acc < 0.0) {
        acc = 0.0;
        ++clamped;
      }
      out.at(p, band) = acc;
    }
  }
  if (report)
    report->clamp_fraction = double(clamped) / double(int64_t(n) * k);
  return out;
}

ReflectanceLibrary load_library_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("library CSV: cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line))
    throw FormatError("library CSV: empty file " + path.string());
  ReflectanceLibrary lib;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) lib.wavelengths.push_back(std::stod(cell));
  }
  lib.bands = int(lib.wavelengths.size());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    int count = 0;
    while (std::getline(ls, cell, ',')) {
      lib.samples.push_back(std::stod(cell));
      ++count;
    }
    if (count != lib.bands)
      throw FormatError("library CSV: row with " + std::to_string(count) +
                        " cells, expected " + std::to_string(lib.bands));
  }
  lib.validate();
  return lib;
}

void save_library_csv(const ReflectanceLibrary& lib,
                      const std::filesystem::path& path) {
  lib.validate();
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("library CSV: cannot write " + path.string());
  os.precision(12);
  for (int k = 0; k < lib.bands; ++k)
    os << (k ? "," : "") << (lib.wavelengths.empty() ? double(k) : lib.wavelengths[size_t(k)]);
  os << "\n";
  for (int i = 0; i < lib.count(); ++i) {
    auto s = lib.sample(i);
    for (int k = 0; k < lib.bands; ++k) os << (k ? "," : "") << s[size_t(k)];
    os << "\n";
  }
}

void save_basis_csv(const BasisMatrix& basis,
                    const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("basis CSV: cannot write " + path.string());
  os.precision(12);
  for (int k = 0; k < basis.bands(); ++k) {
    for (int j = 0; j < basis.rank(); ++j)
      os << (j ? "," : "") << basis.at(k, j);
    os << "\n";
  }
}

}  // namespace lriid
