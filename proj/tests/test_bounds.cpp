#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "qrep/bounds.hpp"
#include "qrep/errors.hpp"
#include "qrep/random.hpp"
#include "qrep/states.hpp"
#include "qrep/swap.hpp"

using namespace qrep;

namespace {

ComplexMatrix pair_projector(int i, int j, int a, int b) {
  return embed(ComplexMatrix::projector(bell_state(i, j)), 4,
               {static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
}

DensityOperator random_member(double p, double F, Rng& rng) {
  NoisyDecomposition d;
  d.p = p;
  d.F = F;
  d.sigma = random_with_fidelity(noise_fidelity(p, F), rng);
  return d.reconstruct();
}

// Tr[P sigma] for Hermitian P and sigma.
double expectation(const ComplexMatrix& P, const ComplexMatrix& sigma) {
  return (P * sigma).trace().real();
}

}  // namespace

TEST(Bounds, ClosedForms) {
  EXPECT_NEAR(f_max(0.5, 0.9), 0.9, 1e-15);
  EXPECT_NEAR(f_max(0.0, 0.7), 1.0, 1e-15);
  EXPECT_NEAR(f_max(0.5, 0.75), 0.75, 1e-15);
  for (double F : {0.6, 0.8}) EXPECT_NEAR(f_max(F, F), F * F + (1 - F) * (1 - F), 1e-15);
  EXPECT_NEAR(f_min_analytic(0.5, 0.9), 0.52, 1e-15);
  EXPECT_NEAR(f_min_analytic(0.5, 0.75), 0.4, 1e-15);
  EXPECT_NEAR(f_min_analytic(0.0, 0.9), 0.0, 1e-15);
  EXPECT_NEAR(f_min_analytic(1.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(noise_fidelity(0.3, 0.8), 5.0 / 7.0, 1e-15);
  for (double p : {0.0, 0.2, 0.7})
    for (double dt : {0.0, 0.13, 0.5, 1.0}) EXPECT_NEAR(delta_tilde(p, delta_from_tilde(p, dt)), dt, 1e-13);
  EXPECT_THROW(f_max(0.9, 0.5), DomainError);
  EXPECT_THROW(f_min_analytic(-0.1, 0.5), DomainError);
  EXPECT_THROW(fidelity_from_objective(0.1, 0.5, 0.0, 0.1), DomainError);
}

// The reparameterisation in terms of the noise components reproduces the
// brute-force postselected swap of two members of S_{p,F}.
TEST(Bounds, LinearisedObjectiveMatchesSwap) {
  Rng rng(70);
  for (int t = 0; t < 20; ++t) {
    const double F = rng.uniform(0.3, 1.0), p = rng.uniform(0.0, F);
    const double ft = noise_fidelity(p, F);
    const DensityOperator s1 = random_with_fidelity(ft, rng), s2 = random_with_fidelity(ft, rng);
    const DensityOperator r1 = NoisyDecomposition{p, F, s1}.reconstruct();
    const DensityOperator r2 = NoisyDecomposition{p, F, s2}.reconstruct();
    const ComplexMatrix noise = kron(s1.matrix(), s2.matrix());
    const double dt = expectation(pair_projector(0, 0, kA1, kA2), noise);
    const double H = expectation(pair_projector(0, 0, kB1, kB2) * pair_projector(0, 0, kA1, kA2), noise);
    const SwapOutcome o = postselected_swap(r1, r2, PauliLabel{0, 0});
    const double delta = delta_from_tilde(p, dt);
    EXPECT_NEAR(o.probability, delta, 1e-12);
    ASSERT_TRUE(o.defined());
    EXPECT_NEAR(o.fidelity, fidelity_from_objective(p, F, delta, H), 1e-10);
  }
}

TEST(Bounds, PermutationAlgebra) {
  const auto ops = build_permutation_algebra();
  ASSERT_EQ(ops.size(), 24u);
  std::map<std::string, int> counts;
  for (const auto& op : ops) {
    ++counts[cycle_type(op.tau)];
    EXPECT_EQ(op.trace, permutation_trace(op.tau));
    EXPECT_TRUE(is_unitary(op.matrix));
    EXPECT_LT(max_abs_diff(op.matrix.transpose(), permutation_matrix(inverse(op.tau))), 1e-15);
  }
  EXPECT_EQ(counts["1+1+1+1"], 1);
  EXPECT_EQ(counts["2+1+1"], 6);
  EXPECT_EQ(counts["2+2"], 3);
  EXPECT_EQ(counts["3+1"], 8);
  EXPECT_EQ(counts["4"], 6);
  for (const auto& a : ops)
    for (const auto& b : ops)
      EXPECT_LT(max_abs_diff(permutation_matrix(compose(a.tau, b.tau)), a.matrix * b.matrix), 1e-15);
  // A transposition is the swap of the two registers.
  const ComplexMatrix swapped = permutation_matrix(transposition(kA1, kA2));
  // |B1 A1 A2 B2> = |0 1 0 1> -> |0 0 1 1>.
  StateVector e(16, 0.0), f(16, 0.0);
  e[0b0101] = 1.0;
  f[0b0011] = 1.0;
  EXPECT_NEAR(std::abs(inner(f, swapped * e)), 1.0, 1e-15);
  EXPECT_EQ(cycle_notation(identity_permutation()), "e");
  EXPECT_EQ(cycle_notation(transposition(kB1, kB2)), "(B1 B2)");
  EXPECT_THROW(permutation_matrix({0, 0, 1, 2}), ValidationError);
}

TEST(Bounds, FrameRotationMapsProjectors) {
  const ComplexMatrix& R = frame_rotation();
  EXPECT_TRUE(is_unitary(R));
  const int pairs[4][2] = {{kB1, kB2}, {kA1, kA2}, {kB1, kA1}, {kA2, kB2}};
  for (const auto& pr : pairs) {
    const ComplexMatrix rotated = R * pair_projector(0, 0, pr[0], pr[1]) * R.adjoint();
    EXPECT_LT(max_abs_diff(rotated, pair_projector(1, 1, pr[0], pr[1])), 1e-14);
    // Psi11 projector = (I - SWAP) / 2.
    const ComplexMatrix sw = permutation_matrix(transposition(pr[0], pr[1]));
    ComplexMatrix anti = ComplexMatrix::identity(16) - sw;
    anti *= 0.5;
    EXPECT_LT(max_abs_diff(anti, pair_projector(1, 1, pr[0], pr[1])), 1e-14);
  }
}

TEST(Bounds, CoefficientVectorsMatchTraces) {
  const SymmetrizedProblem sp = build_symmetrized_sdp(0.2, 0.8, 0.25, Sense::min);
  const ComplexMatrix obj = pair_projector(1, 1, kB1, kB2) * pair_projector(1, 1, kA1, kA2);
  const ComplexMatrix pa = pair_projector(1, 1, kA1, kA2);
  const ComplexMatrix p1 = pair_projector(1, 1, kB1, kA1), p2 = pair_projector(1, 1, kA2, kB2);
  ASSERT_EQ(sp.perms.size(), 24u);
  for (std::size_t k = 0; k < 24; ++k) {
    const ComplexMatrix M = permutation_matrix(sp.perms[k]);
    EXPECT_NEAR(sp.u[k], (obj * M).trace().real(), 1e-12);
    EXPECT_NEAR(sp.v[k], (pa * M).trace().real(), 1e-12);
    EXPECT_NEAR(sp.w1[k], (p1 * M).trace().real(), 1e-12);
    EXPECT_NEAR(sp.w2[k], (p2 * M).trace().real(), 1e-12);
    EXPECT_NEAR(sp.x[k], M.trace().real(), 1e-12);
    EXPECT_NEAR((obj * M).trace().imag(), 0.0, 1e-12);
  }
}

TEST(Bounds, InvariantGenerators) {
  const SymmetrizedProblem sp = build_symmetrized_sdp(0.2, 0.8, 0.25, Sense::min);
  ASSERT_EQ(sp.generators.size(), 14u);
  ASSERT_EQ(sp.generator_names.size(), 14u);
  Rng rng(71);
  const ComplexMatrix U = random_unitary(2, rng);
  const ComplexMatrix U4 = kron(kron(U, U), kron(U, U));
  for (const auto& g : sp.generators) {
    EXPECT_TRUE(is_hermitian(g, 1e-14));
    EXPECT_LT(max_abs_diff(U4 * g * U4.adjoint(), g), 1e-12);
  }
  // Orthonormalise the generators (Hilbert-Schmidt) and check that every
  // Hermitian part of a permutation operator lies in their span.
  std::vector<ComplexMatrix> q;
  for (const auto& g : sp.generators) {
    ComplexMatrix r = g;
    for (const auto& b : q) r -= (b.adjoint() * r).trace() * b;
    const double n = std::sqrt((r.adjoint() * r).trace().real());
    ASSERT_GT(n, 1e-6);
    r *= 1.0 / n;
    q.push_back(r);
  }
  for (const auto& op : build_permutation_algebra()) {
    ComplexMatrix parts[2] = {op.matrix + op.matrix.transpose(),
                              cplx(0.0, 1.0) * (op.matrix - op.matrix.transpose())};
    for (auto& r : parts) {
      for (const auto& b : q) r -= (b.adjoint() * r).trace() * b;
      EXPECT_LT(max_abs_diff(r, ComplexMatrix(16)), 1e-10);
    }
  }
  EXPECT_THROW(sp.operator_from({1.0}), DimensionError);
}

TEST(Bounds, ReducedFormMatchesFull) {
  for (double p : {0.0, 0.25, 0.5})
    for (double F : {0.6, 0.85}) {
      const auto [dmin, dmax] = delta_region(p, F);
      for (double s : {0.2, 0.5, 0.8}) {
        const double d = dmin + s * (dmax - dmin);
        for (Sense sense : {Sense::min, Sense::max}) {
          const double hf = h_rel(p, F, d, sense, {BlockForm::full});
          const double hr = h_rel(p, F, d, sense, {BlockForm::reduced});
          EXPECT_NEAR(hf, hr, 1e-6) << p << " " << F << " " << d;
        }
      }
    }
}

TEST(Bounds, SymmetrizedMatchesUnsymmetrized) {
  for (double p : {0.0, 0.2, 0.4})
    for (double F : {0.6, 0.75, 0.9}) {
      const auto [dmin, dmax] = delta_region(p, F);
      for (double s : {0.25, 0.5, 0.75}) {
        const double d = dmin + s * (dmax - dmin);
        const SdpProblem full = build_unsymmetrized_sdp(p, F, d, Sense::min);
        const SdpSolution sol = solve(full, 1e-8);
        ASSERT_EQ(sol.status, SdpStatus::optimal);
        EXPECT_TRUE(check_certificate(full, sol, 1e-8).ok);
        EXPECT_NEAR(unsymmetrized_objective(sol, Sense::min), h_rel(p, F, d, Sense::min), 1e-6)
            << p << " " << F << " " << d;
      }
    }
  const SdpSolution up = solve(build_unsymmetrized_sdp(0.3, 0.8, 0.3, Sense::max), 1e-8);
  ASSERT_EQ(up.status, SdpStatus::optimal);
  EXPECT_NEAR(unsymmetrized_objective(up, Sense::max), h_rel(0.3, 0.8, 0.3, Sense::max), 1e-6);
}

TEST(Bounds, OptimalOperatorIsFeasible) {
  const double p = 0.3, F = 0.8, delta = 0.3;
  for (BlockForm form : {BlockForm::full, BlockForm::reduced}) {
    const SymmetrizedProblem sp = build_symmetrized_sdp(p, F, delta, Sense::min, form);
    const SdpSolution s = solve(sp.sdp, 1e-8);
    ASSERT_EQ(s.status, SdpStatus::optimal);
    EXPECT_TRUE(check_certificate(sp.sdp, s, 1e-8).ok);
    const ComplexMatrix sigma = sp.unrotated_operator(s.x);
    EXPECT_NEAR(sigma.trace().real(), 1.0, 1e-9);
    EXPECT_GE(min_eigenvalue(sigma), -1e-7);
    EXPECT_GE(min_eigenvalue(partial_transpose(sigma, 4, {2, 3})), -1e-7);
    const double ft = noise_fidelity(p, F);
    EXPECT_NEAR(expectation(pair_projector(0, 0, kB1, kA1), sigma), ft, 1e-8);
    EXPECT_NEAR(expectation(pair_projector(0, 0, kA2, kB2), sigma), ft, 1e-8);
    EXPECT_NEAR(expectation(pair_projector(0, 0, kA1, kA2), sigma), delta_tilde(p, delta), 1e-8);
    const double H = expectation(pair_projector(0, 0, kB1, kB2) * pair_projector(0, 0, kA1, kA2), sigma);
    EXPECT_NEAR(H, sp.objective_from(s), 1e-7);
    // The optimum stays in the invariant algebra of the rotated frame.
    const ComplexMatrix rotated = sp.operator_from(s.x);
    Rng rng(74);
    for (int t = 0; t < 20; ++t) {
      const ComplexMatrix U = random_unitary(2, rng);
      const ComplexMatrix U4 = kron(kron(U, U), kron(U, U));
      EXPECT_LT(max_abs_diff(U4 * rotated, rotated * U4), 1e-9);
    }
  }
}

TEST(Bounds, DeltaRegionClosedForm) {
  // For noise fidelity Ft >= 1/2 the relaxed range of Tr[Psi00_{A1A2} sigma]
  // is [(Ft - 1/2)^2, 1/2 - (Ft - 1/2)^2].
  for (double p : {0.0, 0.3, 0.6})
    for (double F : {0.8, 0.95}) {
      const double ft = noise_fidelity(p, F), e = (ft - 0.5) * (ft - 0.5);
      const auto [lo, hi] = delta_region(p, F);
      EXPECT_NEAR(lo, delta_from_tilde(p, e), 1e-6);
      EXPECT_NEAR(hi, delta_from_tilde(p, 0.5 - e), 1e-6);
    }
  EXPECT_EQ(delta_region(0.5, 1.0), std::make_pair(0.25, 0.25));
  // Sampled pairs land inside the region.
  Rng rng(72);
  const auto [lo, hi] = delta_region(0.3, 0.8);
  for (int t = 0; t < 200; ++t) {
    const DensityOperator r1 = random_member(0.3, 0.8, rng), r2 = random_member(0.3, 0.8, rng);
    const double d = postselected_swap(r1, r2, PauliLabel{0, 0}).probability;
    EXPECT_GE(d, lo - 1e-7);
    EXPECT_LE(d, hi + 1e-7);
  }
}

TEST(Bounds, UpperBoundIsTight) {
  for (double p : {0.2, 0.5})
    for (double F : {0.7, 0.9}) {
      const SdpBound b = f_max_sdp(p, F);
      EXPECT_NEAR(b.bound, f_max(p, F), 1e-5);
      EXPECT_NEAR(b.delta_star, 0.25, 1e-4);
    }
  for (double F : {0.6, 0.75, 0.9}) EXPECT_NEAR(f_max_sdp(F, F).bound, F * F + (1 - F) * (1 - F), 1e-5);
  const SdpBound t = f_max_sdp(0.4, 1.0);
  EXPECT_EQ(t.bound, 1.0);
  EXPECT_EQ(t.delta_star, 0.25);
}

TEST(Bounds, OrderingChain) {
  for (double p : {0.0, 0.1, 0.45, 0.8})
    for (double F : {0.75, 0.9}) {
      if (p > F) continue;
      const BoundSweepRow r = bound_row(p, F);
      EXPECT_EQ(r.ordering_violation(), "") << p << " " << F;
      EXPECT_LE(r.f_min_sdp, r.psi_min_outcome + 1e-6);
      EXPECT_LE(r.psi_min_outcome, r.f_max + 1e-9);
    }
  BoundSweepRow bad;
  bad.f_min_analytic = 0.5;
  bad.f_min_sdp = 0.4;
  EXPECT_NE(bad.ordering_violation(), "");
}

TEST(Bounds, SampledSwapsRespectBounds) {
  Rng rng(73);
  for (double p : {0.2, 0.6})
    for (double F : {0.7, 0.9}) {
      if (p > F) continue;
      const double lower = f_min_sdp(p, F).bound, upper = f_max(p, F);
      for (int t = 0; t < 200; ++t) {
        const DensityOperator r1 = random_member(p, F, rng), r2 = random_member(p, F, rng);
        const SwapOutcome o = postselected_swap(r1, r2, PauliLabel{0, 0});
        if (!o.defined()) continue;
        EXPECT_GE(o.fidelity, lower - 1e-6);
        EXPECT_LE(o.fidelity, upper + 1e-9);
      }
    }
}

TEST(Bounds, FidelityVersusDeltaCurve) {
  for (double F : {0.6, 0.95}) {
    const auto curve = fidelity_vs_delta(0.0, F, 21);
    ASSERT_GE(curve.size(), 20u);
    for (const auto& pt : curve) {
      EXPECT_LE(pt.lower, pt.upper + 1e-7);
      if (pt.delta <= 0.25) EXPECT_NEAR(pt.upper, 1.0, 1e-5);
    }
    EXPECT_NEAR(curve.front().lower, curve.front().upper, 1e-5);
    EXPECT_NEAR(curve.back().lower, curve.back().upper, 1e-5);
    EXPECT_NEAR(curve.front().lower, 1.0, 1e-5);
  }
  EXPECT_THROW(fidelity_vs_delta(0.0, 0.8, 1), DomainError);
}

TEST(Bounds, CsvFormat) {
  EXPECT_EQ(bound_csv_header(),
            "p,F,f_max,f_min_analytic,f_min_sdp,delta_star,bd_lower,bd_upper,f_werner,psi_min_outcome");
  BoundSweepRow r;
  r.p = 0.5;
  r.F = 1.0 / 3.0;
  const std::string line = bound_csv_line(r);
  EXPECT_EQ(line.substr(0, 19), "0.5,0.333333333333,");
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
}

TEST(Bounds, ZeroNoiseFidelityCorner) {
  // p = F leaves noise orthogonal to Psi00; part of the delta range then has
  // no strictly feasible point.
  for (double F : {0.6, 0.75, 0.9}) {
    const BoundSweepRow r = bound_row(F, F);
    EXPECT_EQ(r.ordering_violation(), "") << F;
    EXPECT_LE(r.f_min_sdp, r.psi_min_outcome + 1e-6);
  }
}

TEST(Bounds, TrivialAndInvalidInputs) {
  const BoundSweepRow r = bound_row(0.3, 1.0);
  EXPECT_EQ(r.f_min_sdp, 1.0);
  EXPECT_EQ(r.delta_star, 0.25);
  EXPECT_THROW(build_symmetrized_sdp(0.2, 1.0, 0.25, Sense::min), DomainError);
  EXPECT_THROW(build_symmetrized_sdp(0.0, 0.8, 1.2, Sense::min), DomainError);
  EXPECT_THROW(f_min_sdp(0.9, 0.8), DomainError);
  EXPECT_THROW(h_rel(0.0, 0.8, 0.01, Sense::min), InfeasibleError);
}
