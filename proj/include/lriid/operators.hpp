#pragma once

#include <optional>

#include "lriid/basis.hpp"
#include "lriid/sparse.hpp"
#include "lriid/weights.hpp"

namespace lriid {

// Which constancy assumption a pair term encodes. ConstantShading terms are
// scaled by v (heavy across chromatic edges, where the change must be a
// reflectance edge and shading is expected constant); ConstantReflectance
// terms are scaled by w (heavy inside chromatically flat neighborhoods).
enum class PairWeight { ConstantShading, ConstantReflectance };  // v | w

// Retinex pair operator: one K-row block per neighbor pair (p, q).
// With a luminance cube: block = weight * (L_p B at columns of q
//                                          - L_q B at columns of p).
// Without: L replaced by identity, giving weight * (B_p - B_q) blocks with
// +B at columns of p and -B at columns of q.
// Rows = #pairs * K, cols = #pixels * J.
SparseMatrix assemble_pair_operator(const SpectralCube* cube,
                                    const BasisMatrix& basis,
                                    const WeightField& weights, int pixels,
                                    PairWeight weighted_by,
                                    std::string description = {});

// Generic scale anchor, realized in reconstruction space: M = blockdiag(B)
// so M x reconstructs all spectra, C = the flattened luminance cube. The
// constraint reads B x_p ~= l_p per pixel. Rows = N*K, cols = N*J.
struct GenericConstraint {
  SparseMatrix m;
  std::vector<double> c;
};
GenericConstraint assemble_generic_constraint(const SpectralCube& cube,
                                              const BasisMatrix& basis);

// Bilinear data term linearized at the fixed block: block-diagonal with one
// K x J_free block per pixel, diag(fixed_basis * fixed_p) * free_basis.
// Q * free ~ flattened luminance realizes sum_p |s_p .* r_p - l_p|^2.
SparseMatrix assemble_data_operator(const std::vector<double>& fixed_coeffs,
                                    const BasisMatrix& fixed_basis,
                                    const BasisMatrix& free_basis, int pixels,
                                    std::string description = {});

struct QuadraticTerm {
  const SparseMatrix* op;
  double lambda;
};
struct AffineTerm {
  const SparseMatrix* op;
  const std::vector<double>* rhs;
  double lambda;
};

struct SparseSystem {
  SparseMatrix op;           // symmetric PSD normal matrix
  std::vector<double> rhs;
  std::string description;
};

// Normal equations of sum_i lambda_i |A_i x|^2 + sum_j lambda_j |A_j x - b_j|^2:
// op = sum lambda A'A, rhs = sum over affine terms lambda A'b.
SparseSystem build_normal_system(const std::vector<QuadraticTerm>& terms,
                                 const std::vector<AffineTerm>& affine_terms,
                                 std::string description = {});

}  // namespace lriid
