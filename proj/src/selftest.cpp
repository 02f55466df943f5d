#include "qrep/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "qrep/bounds.hpp"
#include "qrep/chain.hpp"
#include "qrep/errors.hpp"
#include "qrep/qkd.hpp"
#include "qrep/random.hpp"
#include "qrep/sdp.hpp"
#include "qrep/states.hpp"
#include "qrep/swap.hpp"

namespace qrep {

namespace {

constexpr std::size_t kMaxReportedFailures = 5;

class Checker {
 public:
  explicit Checker(SuiteResult& r) : r_(r) {}

  void check(bool ok, const std::string& what) {
    ++r_.checks;
    if (ok) return;
    r_.passed = false;
    if (r_.failures.size() < kMaxReportedFailures) r_.failures.push_back(what);
  }
  // Records the worst value of a residual and checks it against a limit.
  void residual(const std::string& name, double value, double limit) {
    auto& worst = worst_[name];
    if (value > worst.first || !worst.second) worst = {value, true};
    std::ostringstream os;
    os << name << " = " << value << " > " << limit;
    check(value <= limit, os.str());
  }
  void finish() {
    for (const auto& [name, v] : worst_) r_.metrics.emplace_back(name, v.first);
  }

 private:
  SuiteResult& r_;
  std::map<std::string, std::pair<double, bool>> worst_;
};

std::vector<DensityOperator> random_links(int n, Rng& rng) {
  std::vector<DensityOperator> links;
  for (int k = 0; k < n; ++k) links.push_back(random_density(rng));
  return links;
}

// ------------------------------------------------------------------ suites

void suite_qcore(Checker& c, Rng& rng) {
  const StateVector phi = bell_state(0, 0);
  for (int t = 0; t < 100; ++t) {
    const ComplexMatrix M = random_matrix(2, rng);
    const StateVector lhs = kron(M, pauli_i()) * phi, rhs = kron(pauli_i(), M.transpose()) * phi;
    double d = 0.0;
    for (std::size_t a = 0; a < 4; ++a) d = std::max(d, std::abs(lhs[a] - rhs[a]));
    c.residual("flip_flop", d, 1e-12);
  }
  for (int t = 0; t < 20; ++t) {
    const DensityOperator a = random_density(rng, 1), b = random_density(rng, 2);
    const ComplexMatrix ab = kron(a.matrix(), b.matrix());
    c.residual("partial_trace_tensor", max_abs_diff(partial_trace(ab, 3, {1, 2}), a.matrix()), 1e-12);
    c.residual("partial_trace_tensor", max_abs_diff(partial_trace(ab, 3, {0}), b.matrix()), 1e-12);
  }
  double gram = 0.0;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) {
      const cplx g = inner(bell_state(PauliLabel::from_index(k)), bell_state(PauliLabel::from_index(l)));
      gram = std::max(gram, std::abs(g - cplx(k == l ? 1.0 : 0.0)));
    }
  c.residual("bell_gram", gram, 1e-14);
  for (int t = 0; t < 20; ++t) {
    bool ok = true;
    try {
      random_density(rng).validate();
    } catch (const Error&) {
      ok = false;
    }
    c.check(ok, "random_density produced an invalid state");
  }
}

void suite_states(Checker& c, Rng& rng) {
  for (int t = 0; t < 100; ++t) {
    const DensityOperator rho = random_density(rng);
    const BellDiagonalCoeffs b = bd_twirl(rho);
    c.residual("twirl_idempotence", bd_twirl(b.reconstruct()).max_abs_diff(b), 1e-12);
    const double F = fidelity_to_pure(rho, bell_state(0, 0));
    c.residual("twirl_fidelity", std::abs(b.fidelity() - F), 1e-12);
    c.residual("werner_fidelity", std::abs(werner_twirl(rho).F - F), 1e-12);
    c.check(max_p(rho) <= F + 1e-12, "max_p exceeds the fidelity");
  }
  for (double F : {0.25, 0.6, 0.9}) {
    const BellDiagonalCoeffs w = WernerState::from_fidelity(F).coeffs();
    const double r = (1.0 - F) / 3.0;
    c.residual("werner_coeffs",
               std::max({std::abs(w[0] - F), std::abs(w[1] - r), std::abs(w[2] - r), std::abs(w[3] - r)}),
               1e-15);
  }
}

void suite_swap(Checker& c, Rng& rng) {
  for (int t = 0; t < 50; ++t) {
    const BellDiagonalCoeffs a = random_bd(rng), b = random_bd(rng);
    const BellDiagonalCoeffs expect = bd_swap(a, b);
    for (const auto& o : swap_all_outcomes(a.reconstruct(), b.reconstruct())) {
      c.residual("bd_outcome_probability", std::abs(o.probability - 0.25), 1e-12);
      c.residual("bd_swap_coefficients", bd_twirl(*o.state).max_abs_diff(expect), 1e-12);
    }
  }
  for (int i = 0; i <= 5; ++i)
    for (int j = 0; j <= i; ++j) {
      const double F = 0.5 + 0.1 * i, p = F * j / 5.0;
      const DensityOperator s = opt_state(p, F);
      const SwapOutcome o = postselected_swap(s, s, opt_saturating_label());
      c.residual("opt_saturation", std::abs(o.fidelity - f_max(p, F)), 1e-10);
    }
}

void suite_chain(Checker& c, Rng& rng) {
  for (int n : {3, 4})
    for (int t = 0; t < 5; ++t) {
      const auto links = random_links(n, rng);
      std::vector<BellDiagonalCoeffs> coeffs;
      for (const auto& l : links) coeffs.push_back(bd_twirl(l));
      const BellDiagonalCoeffs expect = bd_chain(coeffs);
      for (int q = 0; q < 3; ++q) {
        const auto p = random_valid_protocol(n, rng);
        c.check(validate_protocol(p).valid(), "random_valid_protocol produced an invalid protocol");
        const DensityOperator out = run_chain_nonpostselected(links, p);
        c.residual("twirl_equivalence", bd_twirl(out).max_abs_diff(expect), 1e-10);
      }
    }
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 4;
    std::vector<BellDiagonalCoeffs> coeffs;
    std::vector<double> F;
    // The upper bound needs F_k >= 1/2 beyond two links.
    while (static_cast<int>(coeffs.size()) < n) {
      const BellDiagonalCoeffs b = random_bd(rng);
      if (b.fidelity() < 0.5) continue;
      coeffs.push_back(b);
      F.push_back(b.fidelity());
    }
    const double f = bd_chain(coeffs).fidelity();
    const auto [lo, hi] = chain_fidelity_bounds(F);
    c.residual("chain_bounds_violation", std::max({0.0, lo - f, f - hi}), 1e-10);
  }
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + t % 4;
    std::vector<BellDiagonalCoeffs> coeffs;
    std::vector<double> F;
    double eps = 0.0;
    for (int k = 0; k < n; ++k) {
      const double e = rng.uniform(0.0, 0.01);
      coeffs.push_back(bd_twirl(random_with_fidelity(1.0 - e, rng)));
      F.push_back(1.0 - e);
      eps = std::max(eps, e);
    }
    const double diff = std::abs(bd_chain(coeffs).fidelity() - werner_chain_fidelity(F));
    const double limit = 2.0 * n * (n - 1) / 2.0 * eps * eps;
    c.residual("werner_accuracy_ratio", limit > 0 ? diff / limit : 0.0, 1.0);
  }
}

SdpProblem min_trace_problem(const ComplexMatrix& C) {
  const auto basis = hermitian_basis(C.dim());
  SdpProblem p(basis.size());
  PsdBlock b(C.dim());
  std::vector<double> tr(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    p.objective[k] = (C * basis[k]).trace().real();
    tr[k] = basis[k].trace().real();
    b.add_term(k, basis[k]);
  }
  p.blocks.push_back(b);
  p.add_equality(tr, 1.0);
  return p;
}

void suite_sdp(Checker& c, Rng& rng) {
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix C = random_hermitian(4, rng);
    SdpProblem p = min_trace_problem(C);
    const SdpSolution s = solve(p);
    c.check(s.status == SdpStatus::optimal, "random min-trace SDP not solved");
    c.residual("eigenvalue_mismatch", std::abs(s.objective_value - min_eigenvalue(C)), 1e-6);
    c.residual("weak_duality_violation", std::max(0.0, s.dual_objective - s.objective_value), 1e-7);
    c.check(check_certificate(p, s).ok, "certificate rejected an optimal solution");
    const SdpSolution again = solve(p);
    c.check(again.iterations == s.iterations && again.objective_value == s.objective_value,
            "solver is not deterministic");
    std::vector<double> row(p.n_vars, 0.0);
    row[0] = 1.0;
    p.add_equality(row, 0.5);
    const SdpSolution more = solve(p);
    c.residual("monotonicity_violation", std::max(0.0, s.objective_value - more.objective_value), 1e-7);
  }
}

void suite_bounds(Checker& c, Rng& rng) {
  for (const auto& op : build_permutation_algebra())
    c.check(op.trace == static_cast<int>(std::lround(op.matrix.trace().real())) &&
                op.matrix.trace().real() == static_cast<double>(op.trace),
            "trace table mismatch");
  for (double p : {0.0, 0.3})
    for (double F : {0.7, 0.9}) {
      const auto [dmin, dmax] = delta_region(p, F);
      const double d = 0.5 * (dmin + dmax);
      const SymmetrizedProblem sp = build_symmetrized_sdp(p, F, d, Sense::min, BlockForm::full);
      const SdpSolution s = solve(sp.sdp, 1e-8);
      c.check(s.status == SdpStatus::optimal && check_certificate(sp.sdp, s, 1e-8).ok,
              "symmetrized SDP failed certification");
      const SdpSolution u = solve(build_unsymmetrized_sdp(p, F, d, Sense::min), 1e-8);
      c.residual("symmetrized_vs_unsymmetrized",
                 std::abs(sp.objective_from(s) - unsymmetrized_objective(u, Sense::min)), 1e-6);
      const ComplexMatrix sigma = sp.operator_from(s.x);
      for (int t = 0; t < 5; ++t) {
        const ComplexMatrix U = random_unitary(2, rng);
        const ComplexMatrix U4 = kron(kron(U, U), kron(U, U));
        c.residual("invariance", max_abs_diff(U4 * sigma, sigma * U4), 1e-9);
      }
      const BoundSweepRow row = bound_row(p, F);
      c.check(row.ordering_violation().empty(), row.ordering_violation());
    }
  const SdpBound up = f_max_sdp(0.3, 0.8);
  c.residual("f_max_sdp_gap", std::abs(up.bound - f_max(0.3, 0.8)), 1e-5);
  c.residual("f_max_sdp_delta", std::abs(up.delta_star - 0.25), 1e-4);
}

void suite_qkd(Checker& c, Rng& rng) {
  for (int t = 0; t < 20; ++t) {
    const DensityOperator link = random_density(rng);
    for (int n = 2; n <= 4; ++n) {
      const double np = chain_skf(link, n, SkfMode::nonpostselected);
      c.residual("convexity_violation", std::max(0.0, np - chain_skf(link, n, SkfMode::postselected)), 1e-12);
      c.residual("nonpostselected_vs_bd", std::abs(np - chain_skf(link, n, SkfMode::bd_approx)), 1e-10);
    }
  }
  const DensityOperator opt = opt_state(0.5, 0.95);
  for (int n = 2; n <= 10; ++n) {
    c.residual("opt_closed_form",
               std::abs(chain_skf(opt, n, SkfMode::nonpostselected) - opt_chain_skf_closed_form(0.95, n)), 1e-9);
    c.residual("werner_closed_form",
               std::abs(chain_skf(opt, n, SkfMode::werner_approx) - werner_chain_skf_closed_form(0.95, n)),
               1e-12);
  }
  c.check(chain_skf(opt, 14, SkfMode::bd_approx) > 0.0, "opt-state SKF vanished by n = 14");
}

const std::map<std::string, std::function<void(Checker&, Rng&)>>& suites() {
  static const std::map<std::string, std::function<void(Checker&, Rng&)>> m = {
      {"qcore", suite_qcore}, {"states", suite_states}, {"swap", suite_swap}, {"chain", suite_chain},
      {"sdp", suite_sdp},     {"bounds", suite_bounds}, {"qkd", suite_qkd}};
  return m;
}

}  // namespace

const std::vector<std::string>& selftest_suite_names() {
  static const std::vector<std::string> names = {"qcore", "states", "swap", "chain", "sdp", "bounds", "qkd"};
  return names;
}

SuiteResult run_suite(const std::string& name, const SelftestOptions& o) {
  const auto it = suites().find(name);
  if (it == suites().end()) throw DomainError("unknown selftest suite '" + name + "'");
  SuiteResult r;
  r.name = name;
  Checker c(r);
  // Each suite gets its own stream so that suites are reproducible alone.
  std::uint64_t seed = o.seed;
  for (char ch : name) seed = seed * 131 + static_cast<unsigned char>(ch);
  Rng rng(seed);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    it->second(c, rng);
  } catch (const std::exception& e) {
    c.check(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.finish();
  return r;
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& o) {
  std::vector<SuiteResult> out;
  for (const auto& n : selftest_suite_names()) out.push_back(run_suite(n, o));
  return out;
}

}  // namespace qrep
