#pragma once

#include <cstdint>
#include <vector>

#include "lriid/speccube.hpp"

namespace lriid {

// Sigmoid parameters mapping spectral distance to the constant-shading weight.
struct WeightParams {
  double alpha = 5000.0;   // steepness
  double beta = 0.0032;    // midpoint
};

struct NeighborPair {
  int p;  // pixel index
  int q;  // pixel index, right or down neighbor of p
};

// One entry per horizontal and vertical 4-neighborhood adjacency.
// w is the constant-shading weight, v = 1 - w the constant-reflectance weight.
struct WeightField {
  std::vector<NeighborPair> pairs;
  std::vector<double> w;
  std::vector<double> v;

  size_t size() const { return pairs.size(); }
};

// Normalized cosine distance d = 1 - a.b / (|a||b|), in [0,2].
// Zero-norm spectra compare as identical (d = 0).
double cosine_distance(std::span<const double> a, std::span<const double> b);

double sigmoid_weight(double distance, const WeightParams& params);

// Pairs enumerated in pixel order: for each pixel, its right neighbor then
// its down neighbor.
WeightField compute_weight_field(const SpectralCube& cube,
                                 const WeightParams& params);

// Serial reference for compute_weight_field, kept for kernel testing.
WeightField compute_weight_field_serial(const SpectralCube& cube,
                                        const WeightParams& params);

// alpha grid: linear spacing; beta grid: logarithmic spacing.
std::vector<double> linear_grid(double lo, double hi, int count);
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace lriid
