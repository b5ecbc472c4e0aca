#include "lriid/weights.hpp"

#include <cmath>

namespace lriid {

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ValidationError("cosine_distance: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;  // dark pixels compare as identical
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

double sigmoid_weight(double distance, const WeightParams& params) {
  return 1.0 / (1.0 + std::exp(params.alpha * (distance - params.beta)));
}

static WeightField make_field(const SpectralCube& cube,
                              const WeightParams& params, bool parallel) {
  if (params.alpha <= 0.0 || params.beta <= 0.0)
    throw ValidationError("WeightParams: alpha and beta must be positive");
  const int h = cube.height(), w = cube.width();
  WeightField field;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int p = y * w + x;
      if (x + 1 < w) field.pairs.push_back({p, p + 1});
      if (y + 1 < h) field.pairs.push_back({p, p + w});
    }
  const size_t n = field.pairs.size();
  field.w.resize(n);
  field.v.resize(n);
#pragma omp parallel for schedule(static) if (parallel)
  for (long long i = 0; i < (long long)n; ++i) {
    const auto& pr = field.pairs[size_t(i)];
    double d = cosine_distance(cube.spectrum(pr.p), cube.spectrum(pr.q));
    double wt = sigmoid_weight(d, params);
    field.w[size_t(i)] = wt;
    field.v[size_t(i)] = 1.0 - wt;
  }
  return field;
}

WeightField compute_weight_field(const SpectralCube& cube,
                                 const WeightParams& params) {
  return make_field(cube, params, true);
}

WeightField compute_weight_field_serial(const SpectralCube& cube,
                                        const WeightParams& params) {
  return make_field(cube, params, false);
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  std::vector<double> g(size_t(count), 0.0);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < count; ++i)
    g[size_t(i)] = lo + (hi - lo) * double(i) / double(count - 1);
  return g;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(size_t(count), 0.0);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    g[size_t(i)] = std::exp(llo + (lhi - llo) * double(i) / double(count - 1));
  return g;
}

}  // namespace lriid
