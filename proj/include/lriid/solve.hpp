#pragma once

#include <functional>
#include <optional>

#include "lriid/basis.hpp"
#include "lriid/metrics.hpp"
#include "lriid/operators.hpp"

namespace lriid {

enum class SubproblemSolver { ConjugateGradient, GradientDescent };

struct SolverConfig {
  double lambda1 = 2.0;
  double lambda2 = 0.01;
  double lambda_data = 1.0;
  double cg_tol = 1e-8;      // relative residual
  int cg_max_iter = 0;       // 0 means 10 * unknowns
  int outer_max_iter = 50;
  int inner_max_iter = 1000;  // CG/GD budget per refinement block solve
  double grad_tol = 0.01;     // |grad E| / unknowns stopping threshold
  SubproblemSolver subproblem = SubproblemSolver::ConjugateGradient;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  // |Qx - b| / |b|
  bool converged = false;
};

// Preconditioner-free CG on a symmetric PSD system. Deterministic: serial
// reductions, parallel matvec with fixed per-row order.
CgResult cg_solve(const SparseSystem& system, const std::vector<double>& x0,
                  double tol, int max_iter);

// Steepest descent with exact line search on the same quadratic; kept for
// fidelity experiments against the CG path.
CgResult gradient_descent_solve(const SparseSystem& system,
                                const std::vector<double>& x0, double tol,
                                int max_iter);

struct TraceRecord {
  int iter = 0;
  double energy = 0.0;
  double e_sc = 0.0;
  double e_rc = 0.0;
  double e_data = 0.0;
  int cg_iters = 0;
  std::optional<double> lmse_shading;
  std::optional<double> lmse_reflectance;
};

struct SolveTrace {
  std::vector<TraceRecord> records;
  bool converged = false;
  int outer_iterations = 0;
};

void save_trace_csv(const SolveTrace& trace, const std::filesystem::path& path);

struct Energies {
  double total = 0.0;
  double sc = 0.0;
  double rc = 0.0;
  double data = 0.0;
};

// Term-for-term evaluation of the refinement objective:
// E = E_sc + lambda1 * E_rc + 2 * lambda_data * E_data with
// E_sc = |W_{L,Br} R|^2 + |W_{Bs} S|^2, E_rc = |V_{L,Bs} S|^2 + |V_{Br} R|^2,
// E_data = sum_p |s_p .* r_p - l_p|^2.
Energies total_energy(const SpectralCube& cube, const std::vector<double>& s,
                      const std::vector<double>& r, const BasisMatrix& bs,
                      const BasisMatrix& br, const WeightField& weights,
                      const SolverConfig& config);

// Analytic gradient of the refinement objective with respect to one block.
std::vector<double> energy_gradient_shading(
    const SpectralCube& cube, const std::vector<double>& s,
    const std::vector<double>& r, const BasisMatrix& bs, const BasisMatrix& br,
    const WeightField& weights, const SolverConfig& config);
std::vector<double> energy_gradient_reflectance(
    const SpectralCube& cube, const std::vector<double>& s,
    const std::vector<double>& r, const BasisMatrix& bs, const BasisMatrix& br,
    const WeightField& weights, const SolverConfig& config);

// Initial shading estimate: smoothness terms plus the generic constraint.
std::vector<double> initial_shading(const SpectralCube& cube,
                                    const BasisMatrix& bs,
                                    const WeightField& weights,
                                    const SolverConfig& config,
                                    int* cg_iters = nullptr);

// Initial reflectance estimate: smoothness terms, generic constraint, and the
// data term linearized at the shading estimate.
std::vector<double> initial_reflectance(const SpectralCube& cube,
                                        const BasisMatrix& br,
                                        const WeightField& weights,
                                        const std::vector<double>& s_prev,
                                        const BasisMatrix& bs,
                                        const SolverConfig& config,
                                        int* cg_iters = nullptr);

struct RefineOptions {
  const SpectralCube* gt_shading = nullptr;      // for trace LMSE columns
  const SpectralCube* gt_reflectance = nullptr;
  LmseConfig lmse;
};

struct RefineResult {
  std::vector<double> s;
  std::vector<double> r;
  SolveTrace trace;
};

// Alternating exact block solves of the refinement objective, shading first.
// Throws if the energy increases across an outer iteration.
RefineResult refine_alternating(const SpectralCube& cube,
                                const std::vector<double>& s0,
                                const std::vector<double>& r0,
                                const BasisMatrix& bs, const BasisMatrix& br,
                                const WeightField& weights,
                                const SolverConfig& config,
                                const RefineOptions& options = {});

struct DecomposeConfig {
  WeightParams weights;
  SolverConfig solver;
  int reflectance_rank = 8;
};

struct DecomposeResult {
  SpectralCube shading;
  SpectralCube reflectance;
  SolveTrace trace;
  double shading_clamp_fraction = 0.0;
  double reflectance_clamp_fraction = 0.0;
};

// Full pipeline: weights -> bases -> initial estimates -> refinement ->
// reconstruction.
DecomposeResult decompose(const SpectralCube& cube, const PixelSpectrum& illum,
                          const ReflectanceLibrary& library,
                          const DecomposeConfig& config,
                          const RefineOptions& options = {});

}  // namespace lriid
