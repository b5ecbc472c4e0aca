#include "lriid/operators.hpp"

#include <cmath>

namespace lriid {

SparseMatrix assemble_pair_operator(const SpectralCube* cube,
                                    const BasisMatrix& basis,
                                    const WeightField& weights, int pixels,
                                    PairWeight weighted_by,
                                    std::string description) {
  const int k = basis.bands();
  const int j = basis.rank();
  if (cube) {
    if (cube->pixels() != pixels)
      throw ValidationError("assemble_pair_operator: pixel count mismatch");
    if (cube->bands() != k)
      throw ValidationError("assemble_pair_operator: band count mismatch");
  }
  // Shading-constancy terms fire where the chromaticity changes (a
  // reflectance edge, so shading is the part expected constant); that is the
  // complement weight v. Reflectance-constancy terms take w, which is close
  // to 1 only for chromatically similar neighbors.
  const auto& wt =
      weighted_by == PairWeight::ConstantShading ? weights.v : weights.w;
  SparseOperator op(int64_t(weights.size()) * k, int64_t(pixels) * j,
                    std::move(description));
  op.reserve(weights.size() * size_t(k) * size_t(2 * j));
  for (size_t i = 0; i < weights.size(); ++i) {
    const int p = weights.pairs[i].p;
    const int q = weights.pairs[i].q;
    const double s = wt[i];
    const int64_t row0 = int64_t(i) * k;
    for (int band = 0; band < k; ++band) {
      // weight * (L_p B x_q - L_q B x_p); without a cube L is the identity.
      const double lp = cube ? cube->at(p, band) : 1.0;
      const double lq = cube ? cube->at(q, band) : 1.0;
      for (int c = 0; c < j; ++c) {
        const double b = basis.at(band, c);
        op.add(row0 + band, int64_t(q) * j + c, s * lp * b);
        op.add(row0 + band, int64_t(p) * j + c, -s * lq * b);
      }
    }
  }
  return op.finalize();
}

GenericConstraint assemble_generic_constraint(const SpectralCube& cube,
                                              const BasisMatrix& basis) {
  const int k = basis.bands();
  const int j = basis.rank();
  if (cube.bands() != k)
    throw ValidationError("assemble_generic_constraint: band count mismatch");
  const int n = cube.pixels();
  SparseOperator op(int64_t(n) * k, int64_t(n) * j, "M");
  op.reserve(size_t(n) * k * j);
  for (int p = 0; p < n; ++p)
    for (int band = 0; band < k; ++band)
      for (int c = 0; c < j; ++c)
        op.add(int64_t(p) * k + band, int64_t(p) * j + c, basis.at(band, c));
  return {op.finalize(), cube.data()};
}

SparseMatrix assemble_data_operator(const std::vector<double>& fixed_coeffs,
                                    const BasisMatrix& fixed_basis,
                                    const BasisMatrix& free_basis, int pixels,
                                    std::string description) {
  const int k = fixed_basis.bands();
  if (free_basis.bands() != k)
    throw ValidationError("assemble_data_operator: band count mismatch");
  const int jf = fixed_basis.rank();
  const int j = free_basis.rank();
  if (fixed_coeffs.size() != size_t(pixels) * jf)
    throw ValidationError("assemble_data_operator: coefficient length mismatch");
  SparseOperator op(int64_t(pixels) * k, int64_t(pixels) * j,
                    std::move(description));
  op.reserve(size_t(pixels) * k * j);
  for (int p = 0; p < pixels; ++p) {
    for (int band = 0; band < k; ++band) {
      double fixed = 0.0;  // (fixed_basis * fixed_p)[band]
      for (int c = 0; c < jf; ++c)
        fixed += fixed_basis.at(band, c) * fixed_coeffs[size_t(p) * jf + c];
      for (int c = 0; c < j; ++c)
        op.add(int64_t(p) * k + band, int64_t(p) * j + c,
               fixed * free_basis.at(band, c));
    }
  }
  return op.finalize();
}

SparseSystem build_normal_system(const std::vector<QuadraticTerm>& terms,
                                 const std::vector<AffineTerm>& affine_terms,
                                 std::string description) {
  if (terms.empty() && affine_terms.empty())
    throw ValidationError("build_normal_system: no terms");
  int64_t cols = terms.empty() ? affine_terms.front().op->cols()
                               : terms.front().op->cols();
  std::optional<SparseMatrix> normal;
  std::vector<double> rhs(size_t(cols), 0.0);
  auto accumulate = [&](const SparseMatrix& a, double lambda) {
    if (a.cols() != cols)
      throw ValidationError("build_normal_system: column-count mismatch");
    SparseMatrix g = a.gram();
    if (!normal)
      normal = g.scaled(lambda);
    else
      normal = normal->add_scaled(g, lambda);
  };
  for (const auto& t : terms) accumulate(*t.op, t.lambda);
  for (const auto& t : affine_terms) {
    accumulate(*t.op, t.lambda);
    std::vector<double> atb = t.op->apply_transpose(*t.rhs);
    for (size_t i = 0; i < rhs.size(); ++i) rhs[i] += t.lambda * atb[i];
  }
  return {std::move(*normal), std::move(rhs), std::move(description)};
}

}  // namespace lriid
