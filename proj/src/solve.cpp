#include "lriid/solve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lriid {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x))
      throw std::runtime_error(std::string(what) + ": non-finite value");
}

}  // namespace

CgResult cg_solve(const SparseSystem& system, const std::vector<double>& x0,
                  double tol, int max_iter) {
  const auto& q = system.op;
  const auto& b = system.rhs;
  if (q.rows() != q.cols() || b.size() != size_t(q.cols()))
    throw ValidationError("cg_solve: system shape mismatch");
  check_finite(b, "cg_solve rhs");
  const size_t n = b.size();
  if (max_iter <= 0) max_iter = int(std::min<int64_t>(10 * int64_t(n), 1 << 30));

  CgResult res;
  res.x = x0.empty() ? std::vector<double>(n, 0.0) : x0;
  if (res.x.size() != n) throw ValidationError("cg_solve: x0 size mismatch");

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    res.converged = true;
    return res;
  }

  std::vector<double> r(n), p(n), qp(n);
  q.apply(res.x, r);
  for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  p = r;
  double rr = dot(r, r);
  res.residual = std::sqrt(rr) / bnorm;
  if (res.residual <= tol) {
    res.converged = true;
    return res;
  }
  for (int it = 0; it < max_iter; ++it) {
    q.apply(p, qp);
    const double pqp = dot(p, qp);
    if (!std::isfinite(pqp)) throw std::runtime_error("cg_solve: non-finite curvature");
    if (pqp <= 0.0) {
      // PSD breakdown; only tolerable when the direction itself vanished.
      if (pqp < -1e-12 * dot(p, p))
        throw std::runtime_error("cg_solve: indefinite system (p'Qp = " +
                                 std::to_string(pqp) + ")");
      break;
    }
    const double alpha = rr / pqp;
    for (size_t i = 0; i < n; ++i) res.x[i] += alpha * p[i];
    for (size_t i = 0; i < n; ++i) r[i] -= alpha * qp[i];
    const double rr_new = dot(r, r);
    res.iterations = it + 1;
    res.residual = std::sqrt(rr_new) / bnorm;
    if (!std::isfinite(rr_new))
      throw std::runtime_error("cg_solve: non-finite residual");
    if (res.residual <= tol) {
      res.converged = true;
      break;
    }
    const double beta = rr_new / rr;
    for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  return res;
}

CgResult gradient_descent_solve(const SparseSystem& system,
                                const std::vector<double>& x0, double tol,
                                int max_iter) {
  const auto& q = system.op;
  const auto& b = system.rhs;
  const size_t n = b.size();
  if (max_iter <= 0) max_iter = int(std::min<int64_t>(10 * int64_t(n), 1 << 30));
  CgResult res;
  res.x = x0.empty() ? std::vector<double>(n, 0.0) : x0;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    res.converged = true;
    return res;
  }
  std::vector<double> r(n), qr(n);
  for (int it = 0; it < max_iter; ++it) {
    q.apply(res.x, r);
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    res.residual = norm2(r) / bnorm;
    res.iterations = it;
    if (res.residual <= tol) {
      res.converged = true;
      return res;
    }
    q.apply(r, qr);
    const double rqr = dot(r, qr);
    if (rqr <= 0.0) break;
    const double step = dot(r, r) / rqr;  // exact line search
    for (size_t i = 0; i < n; ++i) res.x[i] += step * r[i];
  }
  q.apply(res.x, r);
  for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  res.residual = norm2(r) / bnorm;
  return res;
}

void save_trace_csv(const SolveTrace& trace, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("trace CSV: cannot write " + path.string());
  os.precision(12);
  os << "iter,E,E_sc,E_rc,E_data,cg_iters,lmse_shading,lmse_reflectance\n";
  for (const auto& rec : trace.records) {
    os << rec.iter << "," << rec.energy << "," << rec.e_sc << "," << rec.e_rc
       << "," << rec.e_data << "," << rec.cg_iters << ",";
    if (rec.lmse_shading) os << *rec.lmse_shading;
    os << ",";
    if (rec.lmse_reflectance) os << *rec.lmse_reflectance;
    os << "\n";
  }
}

namespace {

// Shared assembly state for one decomposition problem: the four pair
// operators and their cached Gram matrices.
struct Workspace {
  const SpectralCube& cube;
  const BasisMatrix& bs;
  const BasisMatrix& br;
  const WeightField& weights;
  int n;

  SparseMatrix sc_s;  // v * (s_p - s_q)
  SparseMatrix rc_s;  // w * (L_p s_q - L_q s_p)
  SparseMatrix sc_r;  // v * (L_p r_q - L_q r_p)
  SparseMatrix rc_r;  // w * (r_p - r_q)
  SparseMatrix g_sc_s, g_rc_s, g_sc_r, g_rc_r;

  Workspace(const SpectralCube& cube_, const BasisMatrix& bs_,
            const BasisMatrix& br_, const WeightField& weights_)
      : cube(cube_), bs(bs_), br(br_), weights(weights_), n(cube_.pixels()),
        sc_s(assemble_pair_operator(nullptr, bs_, weights_, n,
                                    PairWeight::ConstantShading, "W_Bs")),
        rc_s(assemble_pair_operator(&cube_, bs_, weights_, n,
                                     PairWeight::ConstantReflectance, "V_LBs")),
        sc_r(assemble_pair_operator(&cube_, br_, weights_, n,
                                     PairWeight::ConstantShading, "W_LBr")),
        rc_r(assemble_pair_operator(nullptr, br_, weights_, n,
                                    PairWeight::ConstantReflectance, "V_Br")),
        g_sc_s(sc_s.gram()), g_rc_s(rc_s.gram()), g_sc_r(sc_r.gram()),
        g_rc_r(rc_r.gram()) {}

  double quad(const SparseMatrix& a, std::span<const double> x) const {
    std::vector<double> y(size_t(a.rows()));
    a.apply(x, y);
    return dot(y, y);
  }

  Energies energies(std::span<const double> s, std::span<const double> r,
                    const SolverConfig& cfg) const {
    Energies e;
    e.sc = quad(sc_r, r) + quad(sc_s, s);
    e.rc = quad(rc_s, s) + quad(rc_r, r);
    e.data = data_energy(s, r);
    e.total = e.sc + cfg.lambda1 * e.rc + 2.0 * cfg.lambda_data * e.data;
    return e;
  }

  double data_energy(std::span<const double> s, std::span<const double> r) const {
    const int k = cube.bands();
    const int js = bs.rank(), jr = br.rank();
    double acc = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int band = 0; band < k; ++band) {
        double sv = 0.0, rv = 0.0;
        for (int c = 0; c < js; ++c) sv += bs.at(band, c) * s[size_t(p) * js + c];
        for (int c = 0; c < jr; ++c) rv += br.at(band, c) * r[size_t(p) * jr + c];
        const double d = sv * rv - cube.at(p, band);
        acc += d * d;
      }
    }
    return acc;
  }
};

CgResult solve_system(const SparseSystem& system, const std::vector<double>& x0,
                      double tol, int max_iter, const SolverConfig& cfg) {
  return cfg.subproblem == SubproblemSolver::ConjugateGradient
             ? cg_solve(system, x0, tol, max_iter)
             : gradient_descent_solve(system, x0, tol, max_iter);
}

}  // namespace

Energies total_energy(const SpectralCube& cube, const std::vector<double>& s,
                      const std::vector<double>& r, const BasisMatrix& bs,
                      const BasisMatrix& br, const WeightField& weights,
                      const SolverConfig& config) {
  Workspace ws(cube, bs, br, weights);
  return ws.energies(s, r, config);
}

// grad_S E = 2 (G_WBs + lambda1 G_VLBs) S + 4 lambda_data Q_R'(Q_R S - L).
// The factor 4 comes from the objective carrying two identical data terms, each
// weighted lambda_data.
std::vector<double> energy_gradient_shading(
    const SpectralCube& cube, const std::vector<double>& s,
    const std::vector<double>& r, const BasisMatrix& bs, const BasisMatrix& br,
    const WeightField& weights, const SolverConfig& config) {
  const int n = cube.pixels();
  SparseMatrix q_r = assemble_data_operator(r, br, bs, n, "Q_R");
  SparseMatrix g_sc_s =
      assemble_pair_operator(nullptr, bs, weights, n,
                             PairWeight::ConstantShading, "W_Bs")
          .gram();
  SparseMatrix g_rc_s =
      assemble_pair_operator(&cube, bs, weights, n,
                             PairWeight::ConstantReflectance, "V_LBs")
          .gram();
  std::vector<double> grad(s.size(), 0.0), tmp(s.size());
  g_sc_s.apply(s, tmp);
  for (size_t i = 0; i < grad.size(); ++i) grad[i] += 2.0 * tmp[i];
  g_rc_s.apply(s, tmp);
  for (size_t i = 0; i < grad.size(); ++i) grad[i] += 2.0 * config.lambda1 * tmp[i];
  std::vector<double> resid(size_t(q_r.rows()));
  q_r.apply(s, resid);
  for (size_t i = 0; i < resid.size(); ++i) resid[i] -= cube.data()[i];
  std::vector<double> back = q_r.apply_transpose(resid);
  for (size_t i = 0; i < grad.size(); ++i)
    grad[i] += 4.0 * config.lambda_data * back[i];
  return grad;
}

std::vector<double> energy_gradient_reflectance(
    const SpectralCube& cube, const std::vector<double>& s,
    const std::vector<double>& r, const BasisMatrix& bs, const BasisMatrix& br,
    const WeightField& weights, const SolverConfig& config) {
  const int n = cube.pixels();
  SparseMatrix q_s = assemble_data_operator(s, bs, br, n, "Q_S");
  SparseMatrix g_sc_r =
      assemble_pair_operator(&cube, br, weights, n,
                             PairWeight::ConstantShading, "W_LBr")
          .gram();
  SparseMatrix g_rc_r =
      assemble_pair_operator(nullptr, br, weights, n,
                             PairWeight::ConstantReflectance, "V_Br")
          .gram();
  std::vector<double> grad(r.size(), 0.0), tmp(r.size());
  g_sc_r.apply(r, tmp);
  for (size_t i = 0; i < grad.size(); ++i) grad[i] += 2.0 * tmp[i];
  g_rc_r.apply(r, tmp);
  for (size_t i = 0; i < grad.size(); ++i) grad[i] += 2.0 * config.lambda1 * tmp[i];
  std::vector<double> resid(size_t(q_s.rows()));
  q_s.apply(r, resid);
  for (size_t i = 0; i < resid.size(); ++i) resid[i] -= cube.data()[i];
  std::vector<double> back = q_s.apply_transpose(resid);
  for (size_t i = 0; i < grad.size(); ++i)
    grad[i] += 4.0 * config.lambda_data * back[i];
  return grad;
}

std::vector<double> initial_shading(const SpectralCube& cube,
                                    const BasisMatrix& bs,
                                    const WeightField& weights,
                                    const SolverConfig& config, int* cg_iters) {
  const int n = cube.pixels();
  SparseMatrix sc_s = assemble_pair_operator(
      nullptr, bs, weights, n, PairWeight::ConstantShading, "W_Bs");
  SparseMatrix rc_s = assemble_pair_operator(
      &cube, bs, weights, n, PairWeight::ConstantReflectance, "V_LBs");
  GenericConstraint gc = assemble_generic_constraint(cube, bs);
  SparseSystem system = build_normal_system(
      {{&sc_s, 1.0}, {&rc_s, config.lambda1}},
      {{&gc.m, &gc.c, config.lambda2}}, "Q_s");
  CgResult res = solve_system(system, {}, config.cg_tol, config.cg_max_iter,
                              config);
  if (cg_iters) *cg_iters = res.iterations;
  return std::move(res.x);
}

std::vector<double> initial_reflectance(const SpectralCube& cube,
                                        const BasisMatrix& br,
                                        const WeightField& weights,
                                        const std::vector<double>& s_prev,
                                        const BasisMatrix& bs,
                                        const SolverConfig& config,
                                        int* cg_iters) {
  const int n = cube.pixels();
  SparseMatrix sc_r = assemble_pair_operator(
      &cube, br, weights, n, PairWeight::ConstantShading, "W_LBr");
  SparseMatrix rc_r = assemble_pair_operator(
      nullptr, br, weights, n, PairWeight::ConstantReflectance, "V_Br");
  GenericConstraint gc = assemble_generic_constraint(cube, br);
  SparseMatrix q_s = assemble_data_operator(s_prev, bs, br, n, "Q_S");
  SparseSystem system = build_normal_system(
      {{&sc_r, 1.0}, {&rc_r, config.lambda1}},
      {{&gc.m, &gc.c, config.lambda2}, {&q_s, &cube.data(), config.lambda_data}},
      "Q_r");
  CgResult res = solve_system(system, {}, config.cg_tol, config.cg_max_iter,
                              config);
  if (cg_iters) *cg_iters = res.iterations;
  return std::move(res.x);
}

RefineResult refine_alternating(const SpectralCube& cube,
                                const std::vector<double>& s0,
                                const std::vector<double>& r0,
                                const BasisMatrix& bs, const BasisMatrix& br,
                                const WeightField& weights,
                                const SolverConfig& config,
                                const RefineOptions& options) {
  Workspace ws(cube, bs, br, weights);
  const int n = ws.n;
  RefineResult out;
  out.s = s0;
  out.r = r0;
  check_finite(out.s, "refine_alternating s0");
  check_finite(out.r, "refine_alternating r0");

  const size_t unknowns = out.s.size() + out.r.size();
  double prev_energy = ws.energies(out.s, out.r, config).total;
  // Iterating far past the stopping rule runs into the numerical floor of the
  // inexact block solves, where the energy can wobble by roughly
  // condition * epsilon relative to its own scale; the guard carries a small
  // absolute slack against that while still catching genuine ascents.
  const double energy_slack = 1e-7 * std::abs(prev_energy);

  for (int outer = 1; outer <= config.outer_max_iter; ++outer) {
    int cg_total = 0;

    // Shading block: |W_Bs S|^2 + lambda1 |V_LBs S|^2
    //                + 2 lambda_data |Q_R S - L|^2: the full objective in S.
    {
      SparseMatrix q_r = assemble_data_operator(out.r, br, bs, n, "Q_R");
      SparseMatrix normal = ws.g_sc_s.add_scaled(ws.g_rc_s, config.lambda1)
                                .add_scaled(q_r.gram(),
                                            2.0 * config.lambda_data);
      std::vector<double> rhs = q_r.apply_transpose(cube.data());
      for (double& v : rhs) v *= 2.0 * config.lambda_data;
      CgResult res = solve_system({std::move(normal), std::move(rhs), "Q_s"},
                                  out.s, config.cg_tol, config.inner_max_iter,
                                  config);
      out.s = std::move(res.x);
      cg_total += res.iterations;
    }

    // Reflectance block, same pattern.
    {
      SparseMatrix q_s = assemble_data_operator(out.s, bs, br, n, "Q_S");
      SparseMatrix normal = ws.g_sc_r.add_scaled(ws.g_rc_r, config.lambda1)
                                .add_scaled(q_s.gram(),
                                            2.0 * config.lambda_data);
      std::vector<double> rhs = q_s.apply_transpose(cube.data());
      for (double& v : rhs) v *= 2.0 * config.lambda_data;
      CgResult res = solve_system({std::move(normal), std::move(rhs), "Q_r"},
                                  out.r, config.cg_tol, config.inner_max_iter,
                                  config);
      out.r = std::move(res.x);
      cg_total += res.iterations;
    }

    // Scale-ambiguity control: the objective is Ac^2 + B/c^2 + const under
    // (S, R) -> (cS, R/c); apply the minimizing c, which never increases E.
    {
      const double a = ws.quad(ws.sc_s, out.s) +
                       config.lambda1 * ws.quad(ws.rc_s, out.s);
      const double b = ws.quad(ws.sc_r, out.r) +
                       config.lambda1 * ws.quad(ws.rc_r, out.r);
      if (a > 0.0 && b > 0.0) {
        const double c = std::pow(b / a, 0.25);
        for (double& v : out.s) v *= c;
        for (double& v : out.r) v /= c;
      }
    }

    Energies e = ws.energies(out.s, out.r, config);
    if (!std::isfinite(e.total))
      throw std::runtime_error("refine_alternating: non-finite energy");
    if (e.total > prev_energy * (1.0 + 1e-9) + energy_slack + 1e-15)
      throw std::runtime_error(
          "refine_alternating: energy increased from " +
          std::to_string(prev_energy) + " to " + std::to_string(e.total) +
          " at outer iteration " + std::to_string(outer));

    TraceRecord rec;
    rec.iter = outer;
    rec.energy = e.total;
    rec.e_sc = e.sc;
    rec.e_rc = e.rc;
    rec.e_data = e.data;
    rec.cg_iters = cg_total;
    if (options.gt_shading && options.gt_reflectance) {
      rec.lmse_shading = lmse(reconstruct_field(out.s, cube.height(),
                                                cube.width(), bs),
                              *options.gt_shading, options.lmse);
      rec.lmse_reflectance = lmse(reconstruct_field(out.r, cube.height(),
                                                    cube.width(), br),
                                  *options.gt_reflectance, options.lmse);
    }
    out.trace.records.push_back(rec);
    out.trace.outer_iterations = outer;

    // Stopping rule: gradient norm of the full objective, normalized by the
    // number of unknowns. Pair-term Grams are reused from the workspace; the
    // data operators are reassembled at the current iterate.
    double gnorm2 = 0.0;
    {
      SparseMatrix q_r = assemble_data_operator(out.r, br, bs, n, "Q_R");
      SparseMatrix q_s = assemble_data_operator(out.s, bs, br, n, "Q_S");
      std::vector<double> gs(out.s.size(), 0.0), tmp_s(out.s.size());
      ws.g_sc_s.apply(out.s, tmp_s);
      for (size_t i = 0; i < gs.size(); ++i) gs[i] += 2.0 * tmp_s[i];
      ws.g_rc_s.apply(out.s, tmp_s);
      for (size_t i = 0; i < gs.size(); ++i)
        gs[i] += 2.0 * config.lambda1 * tmp_s[i];
      std::vector<double> resid(size_t(q_r.rows()));
      q_r.apply(out.s, resid);
      for (size_t i = 0; i < resid.size(); ++i) resid[i] -= cube.data()[i];
      std::vector<double> back = q_r.apply_transpose(resid);
      for (size_t i = 0; i < gs.size(); ++i)
        gs[i] += 4.0 * config.lambda_data * back[i];

      std::vector<double> gr(out.r.size(), 0.0), tmp_r(out.r.size());
      ws.g_sc_r.apply(out.r, tmp_r);
      for (size_t i = 0; i < gr.size(); ++i) gr[i] += 2.0 * tmp_r[i];
      ws.g_rc_r.apply(out.r, tmp_r);
      for (size_t i = 0; i < gr.size(); ++i)
        gr[i] += 2.0 * config.lambda1 * tmp_r[i];
      q_s.apply(out.r, resid);
      for (size_t i = 0; i < resid.size(); ++i) resid[i] -= cube.data()[i];
      back = q_s.apply_transpose(resid);
      for (size_t i = 0; i < gr.size(); ++i)
        gr[i] += 4.0 * config.lambda_data * back[i];
      gnorm2 = dot(gs, gs) + dot(gr, gr);
    }
    const double gnorm = std::sqrt(gnorm2);
    if (gnorm / double(unknowns) < config.grad_tol) {
      out.trace.converged = true;
      break;
    }
    prev_energy = e.total;
  }
  return out;
}

DecomposeResult decompose(const SpectralCube& cube, const PixelSpectrum& illum,
                          const ReflectanceLibrary& library,
                          const DecomposeConfig& config,
                          const RefineOptions& options) {
  auto staged = [](const char* stage, auto&& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("decompose[") + stage + "]: " +
                               e.what());
    }
  };

  cube.validate();
  WeightField weights = staged("weights", [&] {
    return compute_weight_field(cube, config.weights);
  });
  BasisMatrix bs = staged("basis", [&] { return shading_basis(illum); });
  BasisMatrix br = staged("basis", [&] {
    return reflectance_basis_pca(library, config.reflectance_rank);
  });
  if (bs.bands() != cube.bands() || br.bands() != cube.bands())
    throw std::runtime_error("decompose[basis]: band count mismatch with cube");

  std::vector<double> s0 = staged("initial_shading", [&] {
    return initial_shading(cube, bs, weights, config.solver);
  });
  std::vector<double> r0 = staged("initial_reflectance", [&] {
    return initial_reflectance(cube, br, weights, s0, bs, config.solver);
  });
  RefineResult refined = staged("refine", [&] {
    return refine_alternating(cube, s0, r0, bs, br, weights, config.solver,
                              options);
  });

  ReconstructionReport srep, rrep;
  DecomposeResult result{
      reconstruct_field(refined.s, cube.height(), cube.width(), bs, &srep),
      reconstruct_field(refined.r, cube.height(), cube.width(), br, &rrep),
      std::move(refined.trace), srep.clamp_fraction, rrep.clamp_fraction};
  return result;
}

}  // namespace lriid
