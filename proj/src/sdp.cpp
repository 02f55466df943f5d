#include "qrep/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "qrep/errors.hpp"

namespace qrep {

namespace {

constexpr double kStepFactor = 0.95;
constexpr double kStartScale = 10.0;
constexpr double kDivergence = 1e8;
constexpr int kStallIterations = 15;
constexpr double kNearOptimalFactor = 1e3;

// ----------------------------------------------------- small dense helpers

struct RMat {
  std::size_t n = 0;
  std::vector<double> a;

  RMat() = default;
  explicit RMat(std::size_t d) : n(d), a(d * d, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }

  static RMat identity(std::size_t d, double s = 1.0) {
    RMat m(d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = s;
    return m;
  }
};

RMat operator*(const RMat& x, const RMat& y) {
  const std::size_t n = x.n;
  RMat r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double v = x(i, k);
      if (v == 0.0) continue;
      const double* yr = &y.a[k * n];
      double* rr = &r.a[i * n];
      for (std::size_t j = 0; j < n; ++j) rr[j] += v * yr[j];
    }
  return r;
}

void axpy(RMat& y, double s, const RMat& x) {
  for (std::size_t k = 0; k < y.a.size(); ++k) y.a[k] += s * x.a[k];
}

RMat symmetrized(const RMat& m) {
  RMat r(m.n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) r(i, j) = 0.5 * (m(i, j) + m(j, i));
  return r;
}

double dot(const RMat& x, const RMat& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.a.size(); ++k) s += x.a[k] * y.a[k];
  return s;
}

double fro(const RMat& x) { return std::sqrt(dot(x, x)); }

// Lower Cholesky factor; nullopt when the matrix is not numerically PD.
std::optional<RMat> cholesky(const RMat& m) {
  const std::size_t n = m.n;
  RMat L(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0.0)) return std::nullopt;
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / ljj;
    }
  }
  return L;
}

// L^{-1} (lower triangular inverse).
RMat lower_inverse(const RMat& L) {
  const std::size_t n = L.n;
  RMat inv(n);
  for (std::size_t c = 0; c < n; ++c) {
    inv(c, c) = 1.0 / L(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = c; k < i; ++k) s -= L(i, k) * inv(k, c);
      inv(i, c) = s / L(i, i);
    }
  }
  return inv;
}

RMat transposed(const RMat& m) {
  RMat r(m.n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) r(j, i) = m(i, j);
  return r;
}

double min_eig(const RMat& m) {
  const auto ev = eigenvalues_symmetric(m.a, m.n);
  return ev.empty() ? 0.0 : ev.front();
}

// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
RMat embed_real(const ComplexMatrix& h) {
  const std::size_t d = h.dim();
  RMat r(2 * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const cplx z = 0.5 * (h(i, j) + std::conj(h(j, i)));
      r(i, j) = z.real();
      r(i + d, j + d) = z.real();
      r(i, j + d) = -z.imag();
      r(i + d, j) = z.imag();
    }
  return r;
}

struct Triplet {
  std::size_t r, c;
  double v;
};

struct Generator {
  std::size_t var;
  std::vector<Triplet> nz;
  RMat dense;  // filled only when the generator is not sparse
  bool use_dense = false;
};

struct RealBlock {
  std::size_t n = 0;
  RMat g0;
  std::vector<Generator> gens;
};

struct Model {
  std::size_t n = 0;
  std::vector<double> c;
  std::vector<std::vector<double>> Q;  // orthonormal equality rows
  std::vector<double> bq;
  std::vector<RealBlock> blocks;
  std::size_t total_dim = 0;
  bool inconsistent = false;
};

Model build_model(const SdpProblem& p) {
  Model m;
  m.n = p.n_vars;
  m.c = p.objective;
  // Modified Gram-Schmidt on the equality rows.
  for (std::size_t k = 0; k < p.eq_rows.size(); ++k) {
    std::vector<double> a = p.eq_rows[k];
    double b = p.eq_rhs[k];
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (std::size_t q = 0; q < m.Q.size(); ++q) {
      double proj = 0.0;
      for (std::size_t i = 0; i < m.n; ++i) proj += m.Q[q][i] * a[i];
      for (std::size_t i = 0; i < m.n; ++i) a[i] -= proj * m.Q[q][i];
      b -= proj * m.bq[q];
    }
    double norm = 0.0;
    for (double v : a) norm += v * v;
    norm = std::sqrt(norm);
    if (norm <= 1e-10 * std::max(1.0, scale)) {
      if (std::abs(b) > 1e-8 * std::max(1.0, std::abs(p.eq_rhs[k]))) m.inconsistent = true;
      continue;
    }
    for (double& v : a) v /= norm;
    m.Q.push_back(std::move(a));
    m.bq.push_back(b / norm);
  }
  for (const auto& blk : p.blocks) {
    RealBlock rb;
    rb.n = 2 * blk.dim;
    rb.g0 = embed_real(blk.constant);
    for (const auto& [var, g] : blk.terms) {
      Generator gen;
      gen.var = var;
      RMat e = embed_real(g);
      for (std::size_t r = 0; r < rb.n; ++r)
        for (std::size_t c = 0; c < rb.n; ++c)
          if (e(r, c) != 0.0) gen.nz.push_back({r, c, e(r, c)});
      if (gen.nz.size() > 2 * rb.n) {
        gen.dense = std::move(e);
        gen.use_dense = true;
      }
      rb.gens.push_back(std::move(gen));
    }
    m.total_dim += rb.n;
    m.blocks.push_back(std::move(rb));
  }
  return m;
}

// G(x) for one block (without G0).
RMat apply_g(const RealBlock& b, const std::vector<double>& x) {
  RMat r(b.n);
  for (const auto& g : b.gens) {
    const double xv = x[g.var];
    if (xv == 0.0) continue;
    for (const auto& t : g.nz) r(t.r, t.c) += xv * t.v;
  }
  return r;
}

// Adjoint: out[var] += <G_var, X>.
void apply_gstar(const RealBlock& b, const RMat& X, std::vector<double>& out) {
  for (const auto& g : b.gens) {
    double s = 0.0;
    for (const auto& t : g.nz) s += t.v * X(t.r, t.c);
    out[g.var] += s;
  }
}

// Newton system  [M  A^T; A  0] [dx; -dy] = [-h; r_E]  solved by LU with
// partial pivoting after Jacobi scaling of the M block, plus two steps of
// iterative refinement against the unscaled matrix.
struct KktSolver {
  std::size_t n = 0, m = 0;
  RMat K, LU;
  std::vector<double> scale;
  std::vector<std::size_t> piv;

  static KktSolver factor(const RMat& M, const std::vector<std::vector<double>>& Q) {
    KktSolver s;
    s.n = M.n;
    s.m = Q.size();
    const std::size_t t = s.n + s.m;
    s.K = RMat(t);
    for (std::size_t i = 0; i < s.n; ++i)
      for (std::size_t j = 0; j < s.n; ++j) s.K(i, j) = M(i, j);
    for (std::size_t q = 0; q < s.m; ++q)
      for (std::size_t i = 0; i < s.n; ++i) s.K(s.n + q, i) = s.K(i, s.n + q) = Q[q][i];
    s.scale.assign(t, 1.0);
    for (std::size_t i = 0; i < s.n; ++i)
      if (M(i, i) > 0.0) s.scale[i] = 1.0 / std::sqrt(M(i, i));
    s.LU = RMat(t);
    double big = 0.0;
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < t; ++j) {
        s.LU(i, j) = s.scale[i] * s.K(i, j) * s.scale[j];
        big = std::max(big, std::abs(s.LU(i, j)));
      }
    s.piv.resize(t);
    for (std::size_t k = 0; k < t; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < t; ++i)
        if (std::abs(s.LU(i, k)) > std::abs(s.LU(p, k))) p = i;
      s.piv[k] = p;
      if (p != k)
        for (std::size_t j = 0; j < t; ++j) std::swap(s.LU(k, j), s.LU(p, j));
      double& d = s.LU(k, k);
      if (std::abs(d) < 1e-300 + 1e-16 * big) d = d < 0.0 ? -1e-16 * big : 1e-16 * big;
      for (std::size_t i = k + 1; i < t; ++i) {
        const double f = s.LU(i, k) / d;
        s.LU(i, k) = f;
        if (f == 0.0) continue;
        for (std::size_t j = k + 1; j < t; ++j) s.LU(i, j) -= f * s.LU(k, j);
      }
    }
    return s;
  }

  void solve_scaled(std::vector<double>& v) const {
    const std::size_t t = v.size();
    for (std::size_t i = 0; i < t; ++i) v[i] *= scale[i];
    for (std::size_t k = 0; k < t; ++k) std::swap(v[k], v[piv[k]]);
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t k = 0; k < i; ++k) v[i] -= LU(i, k) * v[k];
    for (std::size_t i = t; i-- > 0;) {
      for (std::size_t k = i + 1; k < t; ++k) v[i] -= LU(i, k) * v[k];
      v[i] /= LU(i, i);
    }
    for (std::size_t i = 0; i < t; ++i) v[i] *= scale[i];
  }

  void solve(const std::vector<double>& h, const std::vector<double>& rE, std::vector<double>& dx,
             std::vector<double>& dy) const {
    const std::size_t t = n + m;
    std::vector<double> rhs(t);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -h[i];
    for (std::size_t q = 0; q < m; ++q) rhs[n + q] = rE[q];
    std::vector<double> z = rhs;
    solve_scaled(z);
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double> r = rhs;
      for (std::size_t i = 0; i < t; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < t; ++j) acc += K(i, j) * z[j];
        r[i] -= acc;
      }
      solve_scaled(r);
      for (std::size_t i = 0; i < t; ++i) z[i] += r[i];
    }
    dx.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
    dy.resize(m);
    for (std::size_t q = 0; q < m; ++q) dy[q] = -z[n + q];
  }
};

struct Iterate {
  std::vector<double> x, y;
  std::vector<RMat> S, Z;
};

struct Direction {
  std::vector<double> dx, dy;
  std::vector<RMat> dS, dZ;
};

double max_step(const RMat& X, const RMat& dX) {
  auto L = cholesky(X);
  if (!L) return 0.0;
  const RMat Li = lower_inverse(*L);
  const RMat T = symmetrized(Li * dX * transposed(Li));
  const double lam = min_eig(T);
  return lam < 0.0 ? -1.0 / lam : std::numeric_limits<double>::infinity();
}

}  // namespace

// --------------------------------------------------------------- problem

ComplexMatrix PsdBlock::evaluate(const std::vector<double>& x) const {
  ComplexMatrix m = constant;
  for (const auto& [var, g] : terms) m += cplx(x.at(var)) * g;
  return m;
}

void SdpProblem::add_equality(std::vector<double> row, double rhs) {
  eq_rows.push_back(std::move(row));
  eq_rhs.push_back(rhs);
}

void SdpProblem::validate() const {
  if (n_vars > kMaxSdpVars)
    throw SizeError("sdp: at most " + std::to_string(kMaxSdpVars) + " variables supported");
  if (objective.size() != n_vars) throw DimensionError("sdp: objective length != n_vars");
  if (eq_rows.size() != eq_rhs.size()) throw DimensionError("sdp: equality rows/rhs mismatch");
  for (const auto& r : eq_rows)
    if (r.size() != n_vars) throw DimensionError("sdp: equality row length != n_vars");
  for (const auto& b : blocks) {
    if (b.dim == 0 || b.dim > kMaxSdpBlockDim)
      throw SizeError("sdp: block dimension must be in 1.." + std::to_string(kMaxSdpBlockDim));
    if (b.constant.dim() != b.dim) throw DimensionError("sdp: block constant has wrong dimension");
    if (!is_hermitian(b.constant)) throw ValidationError("sdp: block constant not Hermitian");
    for (const auto& [var, g] : b.terms) {
      if (var >= n_vars) throw DimensionError("sdp: block term references unknown variable");
      if (g.dim() != b.dim) throw DimensionError("sdp: block term has wrong dimension");
      if (!is_hermitian(g)) throw ValidationError("sdp: block term not Hermitian");
    }
  }
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::near_optimal: return "near_optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::max_iterations: return "max_iterations";
  }
  return "unknown";
}

// ----------------------------------------------------------------- solver

SdpSolution solve(const SdpProblem& p, double tol, int max_iterations) {
  if (!(tol >= 1e-10 && tol <= 1e-4)) throw DomainError("sdp: tol must lie in [1e-10, 1e-4]");
  p.validate();
  const Model m = build_model(p);
  const std::size_t n = m.n, neq = m.Q.size(), nb = m.blocks.size();

  SdpSolution sol;
  sol.x.assign(n, 0.0);
  if (m.inconsistent) {
    sol.status = SdpStatus::infeasible;
    sol.objective_value = std::numeric_limits<double>::quiet_NaN();
    return sol;
  }

  Iterate it;
  it.x.assign(n, 0.0);
  for (std::size_t q = 0; q < neq; ++q)
    for (std::size_t i = 0; i < n; ++i) it.x[i] += m.bq[q] * m.Q[q][i];
  it.y.assign(neq, 0.0);
  for (const auto& b : m.blocks) {
    it.S.push_back(RMat::identity(b.n, kStartScale));
    it.Z.push_back(RMat::identity(b.n, kStartScale));
  }

  double cnorm = 0.0, bnorm = 0.0, gnorm = 0.0;
  for (double v : m.c) cnorm = std::max(cnorm, std::abs(v));
  for (double v : m.bq) bnorm = std::max(bnorm, std::abs(v));
  for (const auto& b : m.blocks) gnorm = std::max(gnorm, fro(b.g0));
  const double feas_tol = tol;

  auto Ax = [&](const std::vector<double>& x) {
    std::vector<double> r(neq, 0.0);
    for (std::size_t q = 0; q < neq; ++q)
      for (std::size_t i = 0; i < n; ++i) r[q] += m.Q[q][i] * x[i];
    return r;
  };
  auto Aty = [&](const std::vector<double>& y) {
    std::vector<double> r(n, 0.0);
    for (std::size_t q = 0; q < neq; ++q)
      for (std::size_t i = 0; i < n; ++i) r[i] += m.Q[q][i] * y[q];
    return r;
  };

  bool converged = false, diverged = false;
  int iter = 0;
  double pobj = 0.0, dobj = 0.0;
  // Near a degenerate optimum the Newton system loses accuracy and the
  // residuals can drift upward once mu is tiny; keep the best iterate and
  // stop when it has not improved for kStallIterations steps.
  Iterate best;
  double best_merit = std::numeric_limits<double>::infinity(), best_dobj = 0.0;
  int best_iter = 0;
  for (; iter < max_iterations; ++iter) {
    // Residuals.
    std::vector<RMat> rP(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      rP[k] = apply_g(m.blocks[k], it.x);
      axpy(rP[k], 1.0, m.blocks[k].g0);
      axpy(rP[k], -1.0, it.S[k]);
    }
    std::vector<double> rE = Ax(it.x);
    for (std::size_t q = 0; q < neq; ++q) rE[q] = m.bq[q] - rE[q];
    std::vector<double> rD = Aty(it.y);
    for (std::size_t i = 0; i < n; ++i) rD[i] = m.c[i] - rD[i];
    {
      std::vector<double> gz(n, 0.0);
      for (std::size_t k = 0; k < nb; ++k) apply_gstar(m.blocks[k], it.Z[k], gz);
      for (std::size_t i = 0; i < n; ++i) rD[i] -= gz[i];
    }

    double sz = 0.0;
    for (std::size_t k = 0; k < nb; ++k) sz += dot(it.S[k], it.Z[k]);
    const double mu = m.total_dim ? sz / static_cast<double>(m.total_dim) : 0.0;
    pobj = 0.0;
    for (std::size_t i = 0; i < n; ++i) pobj += m.c[i] * it.x[i];
    dobj = 0.0;
    for (std::size_t q = 0; q < neq; ++q) dobj += m.bq[q] * it.y[q];
    for (std::size_t k = 0; k < nb; ++k) dobj -= dot(m.blocks[k].g0, it.Z[k]);

    double pinf = 0.0, dinf = 0.0;
    for (const auto& r : rP) pinf = std::max(pinf, fro(r));
    for (double v : rE) pinf = std::max(pinf, std::abs(v));
    pinf /= 1.0 + std::max(gnorm, bnorm);
    for (double v : rD) dinf = std::max(dinf, std::abs(v));
    dinf /= 1.0 + cnorm;
    const double gap = std::abs(pobj - dobj);
    if (gap <= tol && sz <= tol && pinf <= feas_tol && dinf <= feas_tol) {
      converged = true;
      break;
    }
    const double merit = std::max({gap, sz, pinf, dinf});
    if (merit < 0.5 * best_merit) {
      best = it;
      best_merit = merit;
      best_dobj = dobj;
      best_iter = iter;
    } else if (iter - best_iter >= kStallIterations) {
      break;
    }
    double znorm = 0.0, xnorm = 0.0;
    for (const auto& z : it.Z) znorm = std::max(znorm, fro(z));
    for (double v : it.y) znorm = std::max(znorm, std::abs(v));
    for (double v : it.x) xnorm = std::max(xnorm, std::abs(v));
    if (znorm > kDivergence || xnorm > kDivergence || std::abs(pobj) > kDivergence ||
        std::abs(dobj) > kDivergence) {
      diverged = true;
      break;
    }

    // W = S^{-1} per block.
    std::vector<RMat> W(nb);
    bool bad = false;
    for (std::size_t k = 0; k < nb; ++k) {
      auto L = cholesky(it.S[k]);
      if (!L) {
        bad = true;
        break;
      }
      const RMat Li = lower_inverse(*L);
      W[k] = transposed(Li) * Li;
    }
    if (bad) break;

    // Schur complement M_ij = sum_blocks Tr(G_i W G_j Z).
    RMat M(n);
    for (std::size_t k = 0; k < nb; ++k) {
      const RealBlock& b = m.blocks[k];
      const RMat& Wk = W[k];
      const RMat& Zk = it.Z[k];
      for (const auto& gi : b.gens) {
        RMat P(b.n);
        if (gi.use_dense) {
          P = Wk * gi.dense * Zk;
        } else {
          for (const auto& t : gi.nz)
            for (std::size_t r = 0; r < b.n; ++r) {
              const double wv = t.v * Wk(r, t.r);
              if (wv == 0.0) continue;
              const double* zr = &Zk.a[t.c * b.n];
              double* pr = &P.a[r * b.n];
              for (std::size_t c = 0; c < b.n; ++c) pr[c] += wv * zr[c];
            }
        }
        for (const auto& gj : b.gens) {
          double s = 0.0;
          for (const auto& t : gj.nz) s += t.v * P(t.r, t.c);
          M(gi.var, gj.var) += s;
        }
      }
    }
    M = symmetrized(M);
    const KktSolver kkt = KktSolver::factor(M, m.Q);

    // Newton direction for a complementarity target given W R_c per block.
    auto direction = [&](const std::vector<RMat>& WRc) {
      Direction d;
      std::vector<double> h = rD;
      std::vector<double> gk(n, 0.0);
      for (std::size_t k = 0; k < nb; ++k) {
        RMat K = WRc[k];
        axpy(K, -1.0, W[k] * rP[k] * it.Z[k]);
        apply_gstar(m.blocks[k], K, gk);
      }
      for (std::size_t i = 0; i < n; ++i) h[i] -= gk[i];
      kkt.solve(h, rE, d.dx, d.dy);
      for (std::size_t k = 0; k < nb; ++k) {
        RMat dS = apply_g(m.blocks[k], d.dx);
        axpy(dS, 1.0, rP[k]);
        RMat dZ = WRc[k];
        axpy(dZ, -1.0, W[k] * dS * it.Z[k]);
        d.dS.push_back(std::move(dS));
        d.dZ.push_back(symmetrized(dZ));
      }
      return d;
    };
    auto step_lengths = [&](const Direction& d) {
      double ap = std::numeric_limits<double>::infinity(), ad = ap;
      for (std::size_t k = 0; k < nb; ++k) {
        ap = std::min(ap, max_step(it.S[k], d.dS[k]));
        ad = std::min(ad, max_step(it.Z[k], d.dZ[k]));
      }
      return std::pair<double, double>{ap, ad};
    };

    // Predictor (affine scaling): W R_c = -Z.
    std::vector<RMat> WRc(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      WRc[k] = it.Z[k];
      for (double& v : WRc[k].a) v = -v;
    }
    const Direction aff = direction(WRc);
    auto [ap_aff, ad_aff] = step_lengths(aff);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);
    double sz_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      RMat Sa = it.S[k], Za = it.Z[k];
      axpy(Sa, ap_aff, aff.dS[k]);
      axpy(Za, ad_aff, aff.dZ[k]);
      sz_aff += dot(Sa, Za);
    }
    const double sigma = sz > 0.0 ? std::pow(std::clamp(sz_aff / sz, 0.0, 1.0), 3) : 0.0;

    // Corrector: W R_c = sigma mu W - Z - W dS_aff dZ_aff.
    for (std::size_t k = 0; k < nb; ++k) {
      RMat r = W[k];
      for (double& v : r.a) v *= sigma * mu;
      axpy(r, -1.0, it.Z[k]);
      axpy(r, -1.0, W[k] * aff.dS[k] * aff.dZ[k]);
      WRc[k] = std::move(r);
    }
    const Direction d = direction(WRc);
    auto [ap, ad] = step_lengths(d);
    ap = std::min(1.0, kStepFactor * ap);
    ad = std::min(1.0, kStepFactor * ad);
    for (std::size_t i = 0; i < n; ++i) it.x[i] += ap * d.dx[i];
    for (std::size_t q = 0; q < neq; ++q) it.y[q] += ad * d.dy[q];
    for (std::size_t k = 0; k < nb; ++k) {
      axpy(it.S[k], ap, d.dS[k]);
      axpy(it.Z[k], ad, d.dZ[k]);
    }
  }

  sol.iterations = iter;
  // A run that did not converge reports its best iterate.
  bool near_optimal = false;
  if (!converged && !diverged && std::isfinite(best_merit)) {
    it = best;
    dobj = best_dobj;
    near_optimal = best_merit <= kNearOptimalFactor * tol;
  }
  // Project onto the equality constraints and report what x certifies.
  std::vector<double> rE = Ax(it.x);
  for (std::size_t q = 0; q < neq; ++q)
    for (std::size_t i = 0; i < n; ++i) it.x[i] += (m.bq[q] - rE[q]) * m.Q[q][i];
  sol.x = it.x;
  sol.objective_value = 0.0;
  for (std::size_t i = 0; i < n; ++i) sol.objective_value += m.c[i] * sol.x[i];
  sol.dual_objective = dobj;
  sol.duality_gap = std::abs(sol.objective_value - dobj);
  for (std::size_t k = 0; k < p.eq_rows.size(); ++k) {
    double s = -p.eq_rhs[k];
    for (std::size_t i = 0; i < n; ++i) s += p.eq_rows[k][i] * sol.x[i];
    sol.max_equality_residual = std::max(sol.max_equality_residual, std::abs(s));
  }
  sol.min_block_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& b : p.blocks)
    sol.min_block_eigenvalue = std::min(sol.min_block_eigenvalue, min_eigenvalue(b.evaluate(sol.x)));
  if (p.blocks.empty()) sol.min_block_eigenvalue = 0.0;
  if (diverged)
    sol.status = SdpStatus::infeasible;
  else if (converged)
    sol.status = SdpStatus::optimal;
  else if (near_optimal)
    sol.status = SdpStatus::near_optimal;
  else
    sol.status = SdpStatus::max_iterations;
  return sol;
}

std::vector<ComplexMatrix> hermitian_basis(std::size_t d) {
  std::vector<ComplexMatrix> basis;
  basis.reserve(d * d);
  for (std::size_t a = 0; a < d; ++a) {
    ComplexMatrix e(d);
    e(a, a) = 1.0;
    basis.push_back(std::move(e));
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) {
      ComplexMatrix re(d), im(d);
      re(a, b) = re(b, a) = 1.0;
      im(a, b) = cplx(0.0, 1.0);
      im(b, a) = cplx(0.0, -1.0);
      basis.push_back(std::move(re));
      basis.push_back(std::move(im));
    }
  return basis;
}

// ------------------------------------------------------------ certificate

CertificateReport check_certificate(const SdpProblem& p, const SdpSolution& s, double tol) {
  CertificateReport rep;
  std::ostringstream msg;
  if (s.x.size() != p.n_vars) {
    rep.message = "solution has wrong length";
    return rep;
  }
  for (std::size_t k = 0; k < p.eq_rows.size(); ++k) {
    double r = -p.eq_rhs[k];
    for (std::size_t i = 0; i < p.n_vars; ++i) r += p.eq_rows[k][i] * s.x[i];
    rep.equality_residual = std::max(rep.equality_residual, std::abs(r));
  }
  rep.min_block_eigenvalue = p.blocks.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& b : p.blocks)
    rep.min_block_eigenvalue = std::min(rep.min_block_eigenvalue, min_eigenvalue(b.evaluate(s.x)));
  double obj = 0.0;
  for (std::size_t i = 0; i < p.n_vars; ++i) obj += p.objective[i] * s.x[i];
  rep.objective_mismatch = std::abs(obj - s.objective_value);
  rep.duality_gap = std::abs(obj - s.dual_objective);

  const double lim = 10.0 * tol;
  rep.ok = s.status == SdpStatus::optimal;
  if (!rep.ok) msg << "status is " << to_string(s.status) << "; ";
  if (rep.equality_residual > lim) {
    rep.ok = false;
    msg << "equality residual " << rep.equality_residual << " > " << lim << "; ";
  }
  if (rep.min_block_eigenvalue < -lim) {
    rep.ok = false;
    msg << "block eigenvalue " << rep.min_block_eigenvalue << " < " << -lim << "; ";
  }
  if (rep.objective_mismatch > lim) {
    rep.ok = false;
    msg << "objective mismatch " << rep.objective_mismatch << " > " << lim << "; ";
  }
  if (rep.duality_gap > lim) {
    rep.ok = false;
    msg << "duality gap " << rep.duality_gap << " > " << lim << "; ";
  }
  rep.message = rep.ok ? "certified" : msg.str();
  return rep;
}

}  // namespace qrep
