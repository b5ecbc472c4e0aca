#include "lriid/speccube.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace lriid {

SpectralCube::SpectralCube(int height, int width, int bands)
    : height_(height), width_(width), bands_(bands),
      data_(size_t(height) * width * bands, 0.0) {
  if (height <= 0 || width <= 0 || bands <= 0)
    throw ValidationError("SpectralCube: nonpositive dimension");
}

SpectralCube::SpectralCube(int height, int width, int bands,
                           std::vector<double> data,
                           std::vector<double> wavelengths)
    : height_(height), width_(width), bands_(bands),
      wavelengths_(std::move(wavelengths)), data_(std::move(data)) {
  validate();
}

PixelSpectrum SpectralCube::spectrum_copy(int pixel) const {
  auto s = spectrum(pixel);
  return PixelSpectrum(s.begin(), s.end());
}

double SpectralCube::max_value() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, v);
  return m;
}

void SpectralCube::validate() const {
  if (height_ <= 0 || width_ <= 0 || bands_ <= 0)
    throw ValidationError("SpectralCube: nonpositive dimension");
  if (data_.size() != size_t(height_) * width_ * bands_)
    throw ValidationError("SpectralCube: data length " +
                          std::to_string(data_.size()) + " != H*W*K");
  for (size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i]) || data_[i] < 0.0)
      throw ValidationError("SpectralCube: non-finite or negative value at index " +
                            std::to_string(i));
  }
  if (!wavelengths_.empty()) {
    if (wavelengths_.size() != size_t(bands_))
      throw ValidationError("SpectralCube: wavelength count != bands");
    for (size_t i = 1; i < wavelengths_.size(); ++i)
      if (!(wavelengths_[i] > wavelengths_[i - 1]))
        throw ValidationError("SpectralCube: wavelengths not strictly increasing");
  }
}

SpectralCube SpectralCube::subsample_bands(int stride) const {
  if (stride < 1) throw ValidationError("subsample_bands: stride must be >= 1");
  std::vector<int> keep;
  for (int k = 0; k < bands_; k += stride) keep.push_back(k);
  SpectralCube out(height_, width_, int(keep.size()));
  for (int p = 0; p < pixels(); ++p)
    for (size_t j = 0; j < keep.size(); ++j)
      out.at(p, int(j)) = at(p, keep[j]);
  if (!wavelengths_.empty()) {
    out.wavelengths_.resize(keep.size());
    for (size_t j = 0; j < keep.size(); ++j)
      out.wavelengths_[j] = wavelengths_[keep[j]];
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'M', 'S', 'C', '1'};

void write_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw FormatError("MSC: truncated header");
  return uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) |
         (uint32_t(b[3]) << 24);
}

void write_f32(std::ostream& os, const std::vector<double>& vals) {
  std::vector<float> buf(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) buf[i] = float(vals[i]);
  os.write(reinterpret_cast<const char*>(buf.data()),
           std::streamsize(buf.size() * sizeof(float)));
}

std::vector<double> read_f32(std::istream& is, size_t count,
                             const char* what) {
  std::vector<float> buf(count);
  is.read(reinterpret_cast<char*>(buf.data()),
          std::streamsize(count * sizeof(float)));
  if (!is) throw FormatError(std::string("MSC: truncated ") + what);
  return std::vector<double>(buf.begin(), buf.end());
}

}  // namespace

SpectralCube load_cube(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("MSC: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("MSC: bad magic in " + path.string());
  uint32_t h = read_u32(is), w = read_u32(is), k = read_u32(is);
  int flag = is.get();
  if (flag < 0) throw FormatError("MSC: truncated flag byte");
  std::vector<double> wl;
  if (flag & 1) wl = read_f32(is, k, "wavelengths");
  auto data = read_f32(is, size_t(h) * w * k, "payload");
  return SpectralCube(int(h), int(w), int(k), std::move(data), std::move(wl));
}

void save_cube(const SpectralCube& cube, const std::filesystem::path& path) {
  cube.validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("MSC: cannot write " + path.string());
  os.write(kMagic, 4);
  write_u32(os, uint32_t(cube.height()));
  write_u32(os, uint32_t(cube.width()));
  write_u32(os, uint32_t(cube.bands()));
  os.put(cube.has_wavelengths() ? char(1) : char(0));
  if (cube.has_wavelengths()) write_f32(os, cube.wavelengths());
  write_f32(os, cube.data());
  if (!os) throw std::runtime_error("MSC: write failed for " + path.string());
}

static void check_same_dims(const SpectralCube& a, const SpectralCube& b,
                            const char* op) {
  if (a.height() != b.height() || a.width() != b.width() ||
      a.bands() != b.bands())
    throw ValidationError(std::string(op) + ": dimension mismatch");
}

SpectralCube elementwise_mul(const SpectralCube& s, const SpectralCube& r) {
  check_same_dims(s, r, "elementwise_mul");
  SpectralCube out(s.height(), s.width(), s.bands());
  const auto& sd = s.data();
  const auto& rd = r.data();
  auto& od = out.data();
  for (size_t i = 0; i < od.size(); ++i) od[i] = sd[i] * rd[i];
  return out;
}

SpectralCube safe_divide(const SpectralCube& l, const SpectralCube& r,
                         double eps) {
  check_same_dims(l, r, "safe_divide");
  if (eps <= 0.0) {
    double m = r.max_value();
    eps = (m > 0.0 ? 1e-6 * m : 1e-12);
  }
  SpectralCube out(l.height(), l.width(), l.bands());
  const auto& ld = l.data();
  const auto& rd = r.data();
  auto& od = out.data();
  for (size_t i = 0; i < od.size(); ++i)
    od[i] = ld[i] / std::max(rd[i], eps);
  return out;
}

std::array<std::vector<double>, 3> pseudo_rgb(
    const SpectralCube& cube,
    const std::array<std::vector<double>, 3>& response) {
  for (const auto& row : response)
    if (row.size() != size_t(cube.bands()))
      throw ValidationError("pseudo_rgb: response shape mismatch");
  const int n = cube.pixels();
  std::array<std::vector<double>, 3> rgb;
  for (auto& ch : rgb) ch.assign(size_t(n), 0.0);
  for (int p = 0; p < n; ++p) {
    auto s = cube.spectrum(p);
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int k = 0; k < cube.bands(); ++k) acc += response[c][k] * s[k];
      rgb[c][p] = acc;
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& ch : rgb)
    for (double v : ch) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  // All-equal image maps to zeros.
  const double span = hi - lo;
  for (auto& ch : rgb)
    for (double& v : ch) v = (span > 0.0 ? (v - lo) / span : 0.0);
  return rgb;
}

void save_spectrum_csv(const std::filesystem::path& path,
                       const std::vector<double>& wavelengths,
                       const PixelSpectrum& values) {
  if (wavelengths.size() != values.size())
    throw ValidationError("spectrum CSV: wavelength/value length mismatch");
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("spectrum CSV: cannot write " + path.string());
  os.precision(12);
  for (size_t i = 0; i < values.size(); ++i)
    os << wavelengths[i] << "," << values[i] << "\n";
}

std::pair<std::vector<double>, PixelSpectrum> load_spectrum_csv(
    const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("spectrum CSV: cannot open " + path.string());
  std::vector<double> wl;
  PixelSpectrum vals;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double w, v;
    char comma;
    if (!(ls >> w >> comma >> v) || comma != ',')
      throw FormatError("spectrum CSV: bad line '" + line + "'");
    wl.push_back(w);
    vals.push_back(v);
  }
  if (vals.empty()) throw FormatError("spectrum CSV: empty file " + path.string());
  return {std::move(wl), std::move(vals)};
}

}  // namespace lriid
