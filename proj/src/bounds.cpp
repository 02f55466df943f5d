#include "qrep/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "qrep/errors.hpp"
#include "qrep/states.hpp"
#include "qrep/swap.hpp"

namespace qrep {

namespace {

constexpr double kTrivialTol = 1e-12;
constexpr double kMinDelta = 1e-9;
constexpr double kRankTol = 1e-9;

void check_pf(double p, double F, const char* op) {
  if (!(p >= 0.0 && F <= 1.0 && p <= F + 1e-15))
    throw DomainError(std::string(op) + ": need 0 <= p <= F <= 1 (p=" + std::to_string(p) +
                      ", F=" + std::to_string(F) + ")");
}

// Both halves pass through Psi00 with certainty: only delta = 1/4, bound 1.
bool trivial(double p, double F) { return F >= 1.0 - kTrivialTol || p >= 1.0 - kTrivialTol; }

const char* kRegisterNames[4] = {"B1", "A1", "A2", "B2"};

ComplexMatrix psi00_pair(int a, int b) {
  return embed(ComplexMatrix::projector(bell_state(0, 0)), 4,
               {static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
}

std::vector<double> flatten(const ComplexMatrix& m) {
  std::vector<double> v;
  v.reserve(2 * m.entries().size());
  for (const auto& z : m.entries()) v.push_back(z.real());
  for (const auto& z : m.entries()) v.push_back(z.imag());
  return v;
}

double vdot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

StateVector basis_vector(std::size_t idx) {
  StateVector v(16, 0.0);
  v[idx] = 1.0;
  return v;
}

StateVector singlet_pairs(int a, int b, int c, int d) {
  // (|01> - |10>)_{ab} (|01> - |10>)_{cd} / 2
  StateVector v(16, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      int bits[4] = {0, 0, 0, 0};
      bits[a] = x;
      bits[b] = 1 - x;
      bits[c] = y;
      bits[d] = 1 - y;
      const std::size_t idx = static_cast<std::size_t>(bits[0] * 8 + bits[1] * 4 + bits[2] * 2 + bits[3]);
      v[idx] += (x == 0 ? 1.0 : -1.0) * (y == 0 ? 1.0 : -1.0) * 0.5;
    }
  return v;
}

std::vector<StateVector> orthonormalize(std::vector<StateVector> vs) {
  std::vector<StateVector> out;
  for (auto& v : vs) {
    for (const auto& q : out) {
      const cplx c = inner(q, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
    const double n = std::sqrt(inner(v, v).real());
    for (auto& z : v) z /= n;
    out.push_back(v);
  }
  return out;
}

// Isometries onto one copy of each irreducible block of the permutation
// algebra: total spin 2 (dimension 1), 1 (dimension 3) and 0 (dimension 2).
const std::vector<std::vector<StateVector>>& irrep_bases() {
  static const std::vector<std::vector<StateVector>> bases = [] {
    std::vector<std::vector<StateVector>> b;
    b.push_back({basis_vector(0)});
    const StateVector e8 = basis_vector(8), e4 = basis_vector(4), e2 = basis_vector(2),
                      e1 = basis_vector(1);
    std::vector<StateVector> w1;
    StateVector v1(16), v2(16), v3(16);
    for (std::size_t i = 0; i < 16; ++i) {
      v1[i] = (e8[i] - e4[i]) / std::sqrt(2.0);
      v2[i] = (e8[i] + e4[i] - 2.0 * e2[i]) / std::sqrt(6.0);
      v3[i] = (e8[i] + e4[i] + e2[i] - 3.0 * e1[i]) / std::sqrt(12.0);
    }
    b.push_back({v1, v2, v3});
    b.push_back(orthonormalize({singlet_pairs(0, 1, 2, 3), singlet_pairs(0, 2, 1, 3)}));
    return b;
  }();
  return bases;
}

ComplexMatrix restrict_to(const ComplexMatrix& m, const std::vector<StateVector>& basis) {
  const std::size_t d = basis.size();
  ComplexMatrix r(d);
  for (std::size_t a = 0; a < d; ++a) {
    const StateVector mb = m * basis[a];
    for (std::size_t b = 0; b < d; ++b) r(b, a) = inner(basis[b], mb);
  }
  return r;
}

// Y_{A2} Y_{B2}: turns the partially transposed invariant operators back
// into elements of the permutation algebra.
const ComplexMatrix& pt_frame() {
  static const ComplexMatrix w = kron(kron(pauli_i(), pauli_i()), kron(pauli_y(), pauli_y()));
  return w;
}

// Appends the PSD blocks for sigma >= 0 and sigma^Gamma >= 0.
void add_blocks(SdpProblem& sdp, const std::vector<ComplexMatrix>& gens, BlockForm form) {
  std::vector<ComplexMatrix> pts;
  for (const auto& g : gens) pts.push_back(partial_transpose(g, 4, {2, 3}));
  if (form == BlockForm::full) {
    PsdBlock s(16), t(16);
    for (std::size_t k = 0; k < gens.size(); ++k) {
      s.add_term(k, gens[k]);
      t.add_term(k, pts[k]);
    }
    sdp.blocks.push_back(std::move(s));
    sdp.blocks.push_back(std::move(t));
    return;
  }
  const ComplexMatrix& W = pt_frame();
  for (int which = 0; which < 2; ++which)
    for (const auto& basis : irrep_bases()) {
      PsdBlock blk(basis.size());
      for (std::size_t k = 0; k < gens.size(); ++k) {
        const ComplexMatrix m = which == 0 ? gens[k] : W * pts[k] * W.adjoint();
        ComplexMatrix r = restrict_to(m, basis);
        // Clean rounding so that the block passes the Hermiticity check.
        r = 0.5 * (r + r.adjoint());
        blk.add_term(k, std::move(r));
      }
      sdp.blocks.push_back(std::move(blk));
    }
}

struct Generators {
  std::vector<ComplexMatrix> mats;
  std::vector<std::string> names;
  std::vector<std::size_t> tau_index;
  std::vector<bool> is_b;
};

// Real basis A_tau = (M + M^T)/2, B_tau = i(M - M^T)/2 pruned to a linearly
// independent subset by column-pivoted Gram-Schmidt.
const Generators& invariant_generators() {
  static const Generators gens = [] {
    const auto alg = build_permutation_algebra();
    std::vector<ComplexMatrix> cand;
    std::vector<std::string> names;
    std::vector<std::size_t> idx;
    std::vector<bool> isb;
    for (std::size_t k = 0; k < alg.size(); ++k) {
      const ComplexMatrix& M = alg[k].matrix;
      const ComplexMatrix Mt = M.transpose();
      cand.push_back(0.5 * (M + Mt));
      names.push_back("A" + cycle_notation(alg[k].tau));
      idx.push_back(k);
      isb.push_back(false);
      cand.push_back(cplx(0.0, 0.5) * (M - Mt));
      names.push_back("B" + cycle_notation(alg[k].tau));
      idx.push_back(k);
      isb.push_back(true);
    }
    std::vector<std::vector<double>> res;
    for (const auto& c : cand) res.push_back(flatten(c));
    std::vector<bool> used(cand.size(), false);
    std::vector<std::size_t> chosen;
    for (;;) {
      std::size_t best = cand.size();
      double bn = kRankTol;
      for (std::size_t j = 0; j < cand.size(); ++j) {
        if (used[j]) continue;
        const double n = std::sqrt(vdot(res[j], res[j]));
        if (n > bn * (1.0 + 1e-12) + 1e-15) {
          bn = n;
          best = j;
        }
      }
      if (best == cand.size()) break;
      used[best] = true;
      chosen.push_back(best);
      std::vector<double> q = res[best];
      for (double& z : q) z /= bn;
      for (std::size_t j = 0; j < cand.size(); ++j) {
        if (used[j]) continue;
        const double c = vdot(q, res[j]);
        for (std::size_t i = 0; i < q.size(); ++i) res[j][i] -= c * q[i];
      }
    }
    std::sort(chosen.begin(), chosen.end());
    Generators g;
    for (std::size_t j : chosen) {
      g.mats.push_back(cand[j]);
      g.names.push_back(names[j]);
      g.tau_index.push_back(idx[j]);
      g.is_b.push_back(isb[j]);
    }
    return g;
  }();
  return gens;
}

struct TraceVectors {
  std::vector<Permutation> perms;
  std::vector<int> inv;  // index of tau^{-1}
  std::vector<double> u, v, w1, w2, x;
};

const TraceVectors& trace_vectors() {
  static const TraceVectors tv = [] {
    TraceVectors t;
    const auto alg = build_permutation_algebra();
    for (const auto& op : alg) t.perms.push_back(op.tau);
    const Permutation sA = transposition(kA1, kA2), sB = transposition(kB1, kB2);
    const Permutation s1 = transposition(kB1, kA1), s2 = transposition(kA2, kB2);
    auto T = [](const Permutation& p) { return static_cast<double>(permutation_trace(p)); };
    for (const auto& tau : t.perms) {
      t.u.push_back(0.25 * (T(tau) - T(compose(sB, tau)) - T(compose(sA, tau)) +
                            T(compose(compose(sB, sA), tau))));
      t.v.push_back(0.5 * (T(tau) - T(compose(sA, tau))));
      t.w1.push_back(0.5 * (T(tau) - T(compose(s1, tau))));
      t.w2.push_back(0.5 * (T(tau) - T(compose(s2, tau))));
      t.x.push_back(T(tau));
      const Permutation ti = inverse(tau);
      t.inv.push_back(static_cast<int>(std::find(t.perms.begin(), t.perms.end(), ti) - t.perms.begin()));
    }
    return t;
  }();
  return tv;
}

// Coefficient of generator k in Tr[P sigma] when Tr[P M_tau] = c_tau.
std::vector<double> generator_row(const std::vector<double>& c) {
  const Generators& g = invariant_generators();
  const TraceVectors& tv = trace_vectors();
  std::vector<double> row;
  for (std::size_t k = 0; k < g.mats.size(); ++k) {
    const std::size_t t = g.tau_index[k];
    const double ct = c[t], ci = c[static_cast<std::size_t>(tv.inv[t])];
    // Tr[P A] = (c_tau + c_tau^-1)/2 and Tr[P B] = i(c_tau - c_tau^-1)/2.  The
    // projectors are real symmetric, so c_tau = c_tau^-1 and B rows vanish.
    row.push_back(g.is_b[k] ? 0.0 : 0.5 * (ct + ci));
  }
  return row;
}

SdpSolution solve_or_throw(const SdpProblem& prob, double tol, const std::string& what) {
  SdpSolution s = solve(prob, tol);
  if (s.status == SdpStatus::near_optimal) {
    // Report the side of the primal/dual pair that keeps the relaxation
    // bound conservative; every problem here is a minimisation.
    s.objective_value = std::min(s.objective_value, s.dual_objective);
    return s;
  }
  if (s.status != SdpStatus::optimal)
    throw InfeasibleError(what + ": SDP solve ended with status " + to_string(s.status) +
                          " (gap " + std::to_string(s.duality_gap) + ")");
  return s;
}

double golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

// The relaxed feasible set loses its interior at the ends of the delta
// region, where interior-point solves stall.  When that happens the value is
// taken at the nearest point moved inward by a growing fraction of the width.
double h_rel_inset(double p, double F, double delta, Sense sense, const BoundsOptions& o,
                   double dmin, double dmax, double* used_delta = nullptr) {
  const double mid = 0.5 * (dmin + dmax), width = dmax - dmin;
  double d = delta;
  for (double frac = 0.0;; frac = frac == 0.0 ? 1e-9 : frac * 10.0) {
    d = delta + (delta < mid ? 1.0 : -1.0) * frac * width;
    try {
      const double H = h_rel(p, F, d, sense, o);
      if (used_delta) *used_delta = d;
      return H;
    } catch (const InfeasibleError&) {
      if (frac >= 1e-3) throw;
    } catch (const DomainError&) {
      if (frac >= 1e-3) throw;
    }
  }
}

// Minimises (sign * fidelity) over the delta grid, then refines by golden
// section between the neighbours of the best grid point.
SdpBound optimise_over_delta(double p, double F, Sense sense, const BoundsOptions& o) {
  const auto [dmin, dmax] = delta_region(p, F, o);
  const double sign = sense == Sense::min ? 1.0 : -1.0;
  auto g = [&](double delta, double* used) {
    const double H = h_rel_inset(p, F, delta, sense, o, dmin, dmax, used);
    return sign * fidelity_from_objective(p, F, *used, H);
  };
  const int n = std::max(2, o.grid_points);
  std::vector<double> ds, gs;
  for (int i = 0; i < n; ++i) {
    const double d = dmin + (dmax - dmin) * i / (n - 1);
    if (d <= kMinDelta) continue;
    double used = d;
    gs.push_back(g(d, &used));
    ds.push_back(used);
  }
  if (ds.empty()) throw InfeasibleError("delta grid is empty (region collapsed to 0)");
  const std::size_t i = static_cast<std::size_t>(std::min_element(gs.begin(), gs.end()) - gs.begin());
  double best_d = ds[i], best_g = gs[i];
  const double lo = i > 0 ? ds[i - 1] : ds[i], hi = i + 1 < ds.size() ? ds[i + 1] : ds[i];
  if (hi - lo > o.delta_tol) {
    double used = 0.0;
    const double d = golden_section([&](double x) { return g(x, &used); }, lo, hi, o.delta_tol);
    const double gd = g(d, &used);
    if (gd < best_g) {
      best_g = gd;
      best_d = used;
    }
  }
  return {sign * best_g, best_d};
}

}  // namespace

// ------------------------------------------------------------ closed forms

double f_max(double p, double F) {
  check_pf(p, F, "f_max");
  return 1.0 - 2.0 * p * (1.0 - F);
}

double f_min_analytic(double p, double F) {
  check_pf(p, F, "f_min_analytic");
  return p * (2.0 * F - p) / (1.0 + (1.0 - p) * (1.0 - p));
}

double noise_fidelity(double p, double F) {
  check_pf(p, F, "noise_fidelity");
  return p >= 1.0 ? 0.0 : (F - p) / (1.0 - p);
}

double delta_tilde(double p, double delta) {
  if (p >= 1.0) throw DomainError("delta_tilde: undefined at p = 1");
  return (4.0 * delta - 2.0 * p + p * p) / (4.0 * (1.0 - p) * (1.0 - p));
}

double delta_from_tilde(double p, double delta_t) {
  return p / 2.0 - p * p / 4.0 + (1.0 - p) * (1.0 - p) * delta_t;
}

double fidelity_from_objective(double p, double F, double delta, double H) {
  if (!(delta > 0.0)) throw DomainError("fidelity_from_objective: delta must be positive");
  return (F * p / 2.0 - p * p / 4.0 + (1.0 - p) * (1.0 - p) * H) / delta;
}

double psi_min_outcome(double p, double F) {
  check_pf(p, F, "psi_min_outcome");
  const DensityOperator s = opt_state(p, F);
  double best = 1.0;
  for (const auto& o : swap_all_outcomes(s, s))
    if (o.defined()) best = std::min(best, o.fidelity);
  return best;
}

// -------------------------------------------------------- permutation algebra

Permutation identity_permutation() { return {0, 1, 2, 3}; }

Permutation transposition(int a, int b) {
  Permutation t = identity_permutation();
  std::swap(t[static_cast<std::size_t>(a)], t[static_cast<std::size_t>(b)]);
  return t;
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
  Permutation r{};
  for (std::size_t i = 0; i < 4; ++i) r[i] = outer[static_cast<std::size_t>(inner[i])];
  return r;
}

Permutation inverse(const Permutation& t) {
  Permutation r{};
  for (std::size_t i = 0; i < 4; ++i) r[static_cast<std::size_t>(t[i])] = static_cast<int>(i);
  return r;
}

namespace {
std::vector<std::vector<int>> cycles(const Permutation& t) {
  std::vector<std::vector<int>> cs;
  std::array<bool, 4> seen{};
  for (int s = 0; s < 4; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    std::vector<int> c;
    for (int i = s; !seen[static_cast<std::size_t>(i)]; i = t[static_cast<std::size_t>(i)]) {
      seen[static_cast<std::size_t>(i)] = true;
      c.push_back(i);
    }
    cs.push_back(c);
  }
  return cs;
}
}  // namespace

int cycle_count(const Permutation& t) { return static_cast<int>(cycles(t).size()); }

std::string cycle_type(const Permutation& t) {
  std::vector<int> len;
  for (const auto& c : cycles(t)) len.push_back(static_cast<int>(c.size()));
  std::sort(len.rbegin(), len.rend());
  std::string s;
  for (std::size_t i = 0; i < len.size(); ++i) s += (i ? "+" : "") + std::to_string(len[i]);
  return s;
}

std::string cycle_notation(const Permutation& t) {
  std::string s;
  for (const auto& c : cycles(t)) {
    if (c.size() < 2) continue;
    s += "(";
    for (std::size_t i = 0; i < c.size(); ++i)
      s += (i ? " " : "") + std::string(kRegisterNames[c[i]]);
    s += ")";
  }
  return s.empty() ? "e" : s;
}

ComplexMatrix permutation_matrix(const Permutation& t) {
  for (int i = 0; i < 4; ++i)
    if (std::count(t.begin(), t.end(), i) != 1) throw ValidationError("not a permutation of 4 registers");
  ComplexMatrix m(16);
  for (std::size_t k = 0; k < 16; ++k) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      const std::size_t bit = (k >> (3 - i)) & 1u;  // register i, MSB first
      out |= bit << (3 - static_cast<std::size_t>(t[i]));
    }
    m(out, k) = 1.0;
  }
  return m;
}

int permutation_trace(const Permutation& t) { return 1 << cycle_count(t); }

std::vector<PermutationOperator> build_permutation_algebra() {
  static const std::vector<std::pair<std::string, int>> table = {
      {"1+1+1+1", 16}, {"2+1+1", 8}, {"2+2", 4}, {"3+1", 4}, {"4", 2}};
  std::vector<PermutationOperator> ops;
  Permutation t = identity_permutation();
  do {
    PermutationOperator op;
    op.tau = t;
    op.matrix = permutation_matrix(t);
    const double tr = op.matrix.trace().real();
    op.trace = static_cast<int>(std::lround(tr));
    const std::string ct = cycle_type(t);
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == ct; });
    if (it == table.end() || it->second != op.trace || op.trace != permutation_trace(t))
      throw ValidationError("permutation trace table mismatch for " + cycle_notation(t));
    ops.push_back(std::move(op));
  } while (std::next_permutation(t.begin(), t.end()));
  return ops;
}

// ------------------------------------------------------------ SDP builders

const ComplexMatrix& frame_rotation() {
  static const ComplexMatrix r = [] {
    const ComplexMatrix xz = PauliLabel{1, 1}.matrix();
    return kron(kron(xz, pauli_i()), kron(xz, pauli_i()));
  }();
  return r;
}

ComplexMatrix SymmetrizedProblem::operator_from(const std::vector<double>& xs) const {
  if (xs.size() != generators.size()) throw DimensionError("operator_from: wrong parameter count");
  ComplexMatrix m(16);
  for (std::size_t k = 0; k < xs.size(); ++k) m += cplx(xs[k]) * generators[k];
  return m;
}

ComplexMatrix SymmetrizedProblem::unrotated_operator(const std::vector<double>& xs) const {
  const ComplexMatrix& R = frame_rotation();
  return R.adjoint() * operator_from(xs) * R;
}

double SymmetrizedProblem::objective_from(const SdpSolution& s) const {
  return sense == Sense::min ? s.objective_value : -s.objective_value;
}

SymmetrizedProblem build_symmetrized_sdp(double p, double F, double delta, Sense sense,
                                         BlockForm form) {
  check_pf(p, F, "build_symmetrized_sdp");
  if (trivial(p, F)) throw DomainError("build_symmetrized_sdp: F = 1 or p = 1 leaves no noise to optimise");
  SymmetrizedProblem sp;
  sp.p = p;
  sp.F = F;
  sp.delta = delta;
  sp.sense = sense;
  sp.form = form;
  sp.f_t = noise_fidelity(p, F);
  sp.delta_t = delta_tilde(p, delta);
  if (sp.delta_t < -1e-12 || sp.delta_t > 1.0 + 1e-12)
    throw DomainError("build_symmetrized_sdp: delta gives delta_tilde = " + std::to_string(sp.delta_t) +
                      " outside [0,1]");
  const TraceVectors& tv = trace_vectors();
  const Generators& g = invariant_generators();
  sp.perms = tv.perms;
  sp.u = tv.u;
  sp.v = tv.v;
  sp.w1 = tv.w1;
  sp.w2 = tv.w2;
  sp.x = tv.x;
  sp.generators = g.mats;
  sp.generator_names = g.names;

  const std::size_t n = g.mats.size();
  sp.sdp = SdpProblem(n);
  const std::vector<double> obj = generator_row(tv.u);
  for (std::size_t k = 0; k < n; ++k) sp.sdp.objective[k] = sense == Sense::min ? obj[k] : -obj[k];
  sp.sdp.add_equality(generator_row(tv.v), sp.delta_t);
  sp.sdp.add_equality(generator_row(tv.w1), sp.f_t);
  sp.sdp.add_equality(generator_row(tv.w2), sp.f_t);
  sp.sdp.add_equality(generator_row(tv.x), 1.0);
  add_blocks(sp.sdp, g.mats, form);
  return sp;
}

SdpProblem build_unsymmetrized_sdp(double p, double F, double delta, Sense sense) {
  check_pf(p, F, "build_unsymmetrized_sdp");
  if (trivial(p, F)) throw DomainError("build_unsymmetrized_sdp: F = 1 or p = 1 is trivial");
  const double dt = delta_tilde(p, delta), ft = noise_fidelity(p, F);
  const auto basis = hermitian_basis(16);
  const ComplexMatrix obj = psi00_pair(kB1, kB2) * psi00_pair(kA1, kA2);
  const ComplexMatrix pa = psi00_pair(kA1, kA2), p1 = psi00_pair(kB1, kA1), p2 = psi00_pair(kA2, kB2);
  SdpProblem sdp(basis.size());
  std::vector<double> rd, r1, r2, rt;
  PsdBlock s(16), t(16);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double o = (obj * basis[k]).trace().real();
    sdp.objective[k] = sense == Sense::min ? o : -o;
    rd.push_back((pa * basis[k]).trace().real());
    r1.push_back((p1 * basis[k]).trace().real());
    r2.push_back((p2 * basis[k]).trace().real());
    rt.push_back(basis[k].trace().real());
    s.add_term(k, basis[k]);
    t.add_term(k, partial_transpose(basis[k], 4, {2, 3}));
  }
  sdp.add_equality(rd, dt);
  sdp.add_equality(r1, ft);
  sdp.add_equality(r2, ft);
  sdp.add_equality(rt, 1.0);
  sdp.blocks = {s, t};
  return sdp;
}

double unsymmetrized_objective(const SdpSolution& s, Sense sense) {
  return sense == Sense::min ? s.objective_value : -s.objective_value;
}

// --------------------------------------------------------- bound functions

double h_rel(double p, double F, double delta, Sense sense, const BoundsOptions& o) {
  const SymmetrizedProblem sp = build_symmetrized_sdp(p, F, delta, sense, o.form);
  std::ostringstream what;
  what << "h_rel(p=" << p << ", F=" << F << ", delta=" << delta << ")";
  return sp.objective_from(solve_or_throw(sp.sdp, o.tol, what.str()));
}

std::pair<double, double> delta_region(double p, double F, const BoundsOptions& o) {
  check_pf(p, F, "delta_region");
  if (trivial(p, F)) return {0.25, 0.25};
  const Generators& g = invariant_generators();
  const TraceVectors& tv = trace_vectors();
  const double ft = noise_fidelity(p, F);
  double ends[2];
  for (int k = 0; k < 2; ++k) {
    SdpProblem sdp(g.mats.size());
    const std::vector<double> obj = generator_row(tv.v);
    for (std::size_t i = 0; i < obj.size(); ++i) sdp.objective[i] = k == 0 ? obj[i] : -obj[i];
    sdp.add_equality(generator_row(tv.w1), ft);
    sdp.add_equality(generator_row(tv.w2), ft);
    sdp.add_equality(generator_row(tv.x), 1.0);
    add_blocks(sdp, g.mats, o.form);
    std::ostringstream what;
    what << "delta_region(p=" << p << ", F=" << F << ")";
    const SdpSolution s = solve_or_throw(sdp, o.tol, what.str());
    const double dt = std::clamp(k == 0 ? s.objective_value : -s.objective_value, 0.0, 1.0);
    ends[k] = delta_from_tilde(p, dt);
  }
  return {ends[0], ends[1]};
}

SdpBound f_min_sdp(double p, double F, const BoundsOptions& o) {
  check_pf(p, F, "f_min_sdp");
  if (trivial(p, F)) return {1.0, 0.25};
  return optimise_over_delta(p, F, Sense::min, o);
}

SdpBound f_max_sdp(double p, double F, const BoundsOptions& o) {
  check_pf(p, F, "f_max_sdp");
  if (trivial(p, F)) return {1.0, 0.25};
  return optimise_over_delta(p, F, Sense::max, o);
}

std::vector<DeltaCurvePoint> fidelity_vs_delta(double p, double F, int n_points,
                                               const BoundsOptions& o) {
  check_pf(p, F, "fidelity_vs_delta");
  if (n_points < 2) throw DomainError("fidelity_vs_delta: need at least 2 points");
  std::vector<DeltaCurvePoint> out;
  if (trivial(p, F)) {
    out.push_back({0.25, 1.0, 1.0});
    return out;
  }
  const auto [dmin, dmax] = delta_region(p, F, o);
  for (int i = 0; i < n_points; ++i) {
    const double d = dmin + (dmax - dmin) * i / (n_points - 1);
    if (d <= kMinDelta) continue;
    DeltaCurvePoint pt;
    double used = d;
    const double lo = h_rel_inset(p, F, d, Sense::min, o, dmin, dmax, &used);
    const double hi = h_rel(p, F, used, Sense::max, o);
    pt.delta = used;
    pt.lower = fidelity_from_objective(p, F, used, lo);
    pt.upper = fidelity_from_objective(p, F, used, hi);
    out.push_back(pt);
  }
  return out;
}

std::string BoundSweepRow::ordering_violation(double slack) const {
  const std::pair<const char*, double> chain[] = {{"f_min_analytic", f_min_analytic},
                                                  {"f_min_sdp", f_min_sdp},
                                                  {"bd_lower", bd_lower},
                                                  {"f_werner", f_werner},
                                                  {"bd_upper", bd_upper},
                                                  {"f_max", f_max}};
  for (std::size_t i = 0; i + 1 < std::size(chain); ++i)
    if (chain[i].second > chain[i + 1].second + slack) {
      std::ostringstream os;
      os << chain[i].first << " = " << chain[i].second << " > " << chain[i + 1].first << " = "
         << chain[i + 1].second << " at p=" << p << ", F=" << F;
      return os.str();
    }
  return {};
}

BoundSweepRow bound_row(double p, double F, const BoundsOptions& o) {
  check_pf(p, F, "bound_row");
  BoundSweepRow r;
  r.p = p;
  r.F = F;
  r.f_max = f_max(p, F);
  r.f_min_analytic = f_min_analytic(p, F);
  const SdpBound b = f_min_sdp(p, F, o);
  r.f_min_sdp = b.bound;
  r.delta_star = b.delta_star;
  r.bd_lower = F * F;
  r.bd_upper = F * F + (1.0 - F) * (1.0 - F);
  r.f_werner = F * F + (1.0 - F) * (1.0 - F) / 3.0;
  r.psi_min_outcome = psi_min_outcome(p, F);
  return r;
}

std::vector<BoundSweepRow> bound_sweep(const std::vector<std::pair<double, double>>& points,
                                       const BoundsOptions& o, unsigned threads) {
  std::vector<BoundSweepRow> rows(points.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, points.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        rows[i] = bound_row(points[i].first, points[i].second, o);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = points.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

std::string bound_csv_header() {
  return "p,F,f_max,f_min_analytic,f_min_sdp,delta_star,bd_lower,bd_upper,f_werner,psi_min_outcome";
}

std::string bound_csv_line(const BoundSweepRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g", r.p,
                r.F, r.f_max, r.f_min_analytic, r.f_min_sdp, r.delta_star, r.bd_lower, r.bd_upper,
                r.f_werner, r.psi_min_outcome);
  return buf;
}

}  // namespace qrep
