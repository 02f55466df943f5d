#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qrep/qcore.hpp"
#include "qrep/random.hpp"

using namespace qrep;

namespace {

const double s2 = 1.0 / std::sqrt(2.0);

DensityOperator bell_dm(int i, int j, RegisterSet regs = {"A", "B"}) {
  return DensityOperator::from_pure(bell_state(i, j), std::move(regs));
}

// Independent oracle: smallest root of det(x I - H) for a 4x4 Hermitian H.
// Coefficients from Faddeev-LeVerrier, root by Newton from the left (which
// converges monotonically when every root is real).
double charpoly_min_root(const ComplexMatrix& H) {
  const std::size_t n = H.dim();
  std::vector<double> c(n + 1, 0.0);  // x^n + c[1] x^{n-1} + ... + c[n]
  c[0] = 1.0;
  ComplexMatrix M = ComplexMatrix::identity(n);
  ComplexMatrix I = ComplexMatrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    ComplexMatrix AM = H * M;
    c[k] = -AM.trace().real() / static_cast<double>(k);
    M = AM + cplx(c[k]) * I;
  }
  auto poly = [&](double x) {
    double v = 0.0;
    for (double ck : c) v = v * x + ck;
    return v;
  };
  auto dpoly = [&](double x) {
    double v = 0.0;
    for (std::size_t k = 0; k < n; ++k) v = v * x + c[k] * static_cast<double>(n - k);
    return v;
  };
  double bound = 0.0;
  for (const auto& z : H.entries()) bound += std::norm(z);
  double x = -std::sqrt(bound) - 1.0;
  for (int it = 0; it < 500; ++it) {
    const double d = dpoly(x);
    if (d == 0.0) break;
    const double step = poly(x) / d;
    x -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return x;
}

}  // namespace

TEST(Qcore, BellStateAmplitudes) {
  auto b00 = bell_state(0, 0);
  EXPECT_NEAR(b00[0].real(), s2, 1e-15);
  EXPECT_NEAR(std::abs(b00[1]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b00[2]), 0.0, 1e-15);
  EXPECT_NEAR(b00[3].real(), s2, 1e-15);

  auto b11 = bell_state(1, 1);
  EXPECT_NEAR(std::abs(b11[0]), 0.0, 1e-15);
  EXPECT_NEAR(b11[1].real(), s2, 1e-15);
  EXPECT_NEAR(b11[2].real(), -s2, 1e-15);
  EXPECT_NEAR(std::abs(b11[3]), 0.0, 1e-15);
}

TEST(Qcore, BellStateMatchesPauliOnSecondQubit) {
  StateVector phi{s2, 0.0, 0.0, s2};
  for (int k = 0; k < 4; ++k) {
    PauliLabel l = PauliLabel::from_index(k);
    StateVector ref = kron(pauli_i(), l.matrix()) * phi;
    auto b = bell_state(l);
    for (int a = 0; a < 4; ++a) EXPECT_NEAR(std::abs(b[a] - ref[a]), 0.0, 1e-15);
  }
}

TEST(Qcore, BellGramIsIdentity) {
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      cplx g = inner(bell_state(PauliLabel::from_index(a)), bell_state(PauliLabel::from_index(b)));
      EXPECT_NEAR(std::abs(g - cplx(a == b ? 1.0 : 0.0)), 0.0, 1e-14);
    }
}

TEST(Qcore, PauliProductIsXor) {
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      PauliLabel x = PauliLabel::from_index(a), y = PauliLabel::from_index(b);
      ComplexMatrix prod = x.matrix() * y.matrix();
      ComplexMatrix ref = (x * y).matrix();
      // equal up to a global phase of +-1
      double d1 = max_abs_diff(prod, ref);
      double d2 = max_abs_diff(prod, cplx(-1.0) * ref);
      EXPECT_LT(std::min(d1, d2), 1e-15);
    }
}

TEST(Qcore, TensorOfMaximallyMixed) {
  ComplexMatrix h = ComplexMatrix::identity(2);
  h *= 0.5;
  DensityOperator a(h, {"a"}), b(h, {"b"});
  DensityOperator ab = tensor(a, b);
  ComplexMatrix ref = ComplexMatrix::identity(4);
  ref *= 0.25;
  EXPECT_LT(max_abs_diff(ab.matrix(), ref), 1e-15);
  EXPECT_EQ(ab.registers(), (RegisterSet{"a", "b"}));
}

TEST(Qcore, TensorOfBasisStates) {
  DensityOperator z0 = DensityOperator::from_pure({1.0, 0.0}, {"a"});
  DensityOperator z1 = DensityOperator::from_pure({0.0, 1.0}, {"b"});
  DensityOperator ab = tensor(z0, z1);
  EXPECT_NEAR(ab.matrix()(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(ab.matrix().trace().real(), 1.0, 1e-15);
}

TEST(Qcore, TensorRejectsLabelCollision) {
  DensityOperator a = bell_dm(0, 0, {"A", "B"});
  DensityOperator b = bell_dm(0, 0, {"B", "C"});
  EXPECT_THROW(tensor(a, b), RegisterError);
}

TEST(Qcore, TensorTraceMultiplies) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    DensityOperator a = random_density(rng, 1).relabeled({"x"});
    DensityOperator b = random_density(rng, 2).relabeled({"y", "z"});
    ComplexMatrix k = kron(a.matrix(), b.matrix());
    EXPECT_NEAR(std::abs(k.trace() - a.matrix().trace() * b.matrix().trace()), 0.0, 1e-12);
  }
}

TEST(Qcore, PartialTraceOfBellIsMaximallyMixed) {
  DensityOperator red = partial_trace(bell_dm(0, 0), RegisterSet{"B"});
  ComplexMatrix ref = ComplexMatrix::identity(2);
  ref *= 0.5;
  EXPECT_LT(max_abs_diff(red.matrix(), ref), 1e-15);
  EXPECT_EQ(red.registers(), (RegisterSet{"A"}));
}

TEST(Qcore, PartialTraceRecoversFactors) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    DensityOperator r = random_density(rng, 2).relabeled({"a", "b"});
    DensityOperator s = random_density(rng, 2).relabeled({"c", "d"});
    DensityOperator rs = tensor(r, s);
    EXPECT_LT(max_abs_diff(partial_trace(rs, RegisterSet{"c", "d"}).matrix(), r.matrix()), 1e-12);
    EXPECT_LT(max_abs_diff(partial_trace(rs, RegisterSet{"a", "b"}).matrix(), s.matrix()), 1e-12);
    // dropping a non-contiguous subset keeps the remaining order
    DensityOperator mid = partial_trace(rs, RegisterSet{"b", "c"});
    EXPECT_EQ(mid.registers(), (RegisterSet{"a", "d"}));
    EXPECT_NEAR(mid.matrix().trace().real(), 1.0, 1e-12);
  }
}

TEST(Qcore, PartialTraceUnknownLabel) {
  EXPECT_THROW(partial_trace(bell_dm(0, 0), RegisterSet{"Q"}), RegisterError);
}

TEST(Qcore, PartialTransposeOfBell) {
  ComplexMatrix pt = partial_transpose(bell_dm(0, 0), RegisterSet{"B"});
  EXPECT_NEAR(min_eigenvalue(pt), -0.5, 1e-12);
  ComplexMatrix mixed = ComplexMatrix::identity(4);
  mixed *= 0.25;
  DensityOperator I4(mixed, {"A", "B"});
  EXPECT_GE(min_eigenvalue(partial_transpose(I4, RegisterSet{"A"})), -1e-15);
}

TEST(Qcore, PartialTransposeIsInvolution) {
  Rng rng(3);
  DensityOperator r = random_density(rng, 3);
  ComplexMatrix once = partial_transpose(r, RegisterSet{"q0", "q2"});
  DensityOperator back(once, r.registers(), false);
  EXPECT_LT(max_abs_diff(partial_transpose(back, RegisterSet{"q0", "q2"}), r.matrix()), 1e-14);
  EXPECT_THROW(partial_transpose(r, RegisterSet{"zz"}), RegisterError);
}

TEST(Qcore, ApplyLocal) {
  Rng rng(4);
  DensityOperator r = random_density(rng);
  DensityOperator xx = apply_local(apply_local(r, pauli_x(), "A"), pauli_x(), "A");
  EXPECT_LT(max_abs_diff(xx.matrix(), r.matrix()), 1e-15);
  EXPECT_LT(max_abs_diff(apply_local(r, pauli_i(), "B").matrix(), r.matrix()), 1e-15);
  // agrees with the explicit Kronecker form
  ComplexMatrix u = random_unitary(2, rng);
  ComplexMatrix full = kron(pauli_i(), u);
  ComplexMatrix ref = full * r.matrix() * full.adjoint();
  EXPECT_LT(max_abs_diff(apply_local(r, u, "B").matrix(), ref), 1e-13);
  ComplexMatrix bad(2, {1.0, 1.0, 0.0, 1.0});
  EXPECT_THROW(apply_local(r, bad, "A"), ValidationError);
}

TEST(Qcore, FlipFlopIdentity) {
  Rng rng(5);
  const StateVector phi = bell_state(0, 0);
  for (int t = 0; t < 100; ++t) {
    ComplexMatrix M = random_matrix(2, rng);
    StateVector lhs = kron(M, pauli_i()) * phi;
    StateVector rhs = kron(pauli_i(), M.transpose()) * phi;
    for (int a = 0; a < 4; ++a) EXPECT_NEAR(std::abs(lhs[a] - rhs[a]), 0.0, 1e-12);
  }
}

TEST(Qcore, FidelityToPure) {
  EXPECT_NEAR(fidelity_to_pure(bell_dm(0, 0), bell_state(0, 0)), 1.0, 1e-15);
  ComplexMatrix mixed = ComplexMatrix::identity(4);
  mixed *= 0.25;
  EXPECT_NEAR(fidelity_to_pure(DensityOperator(mixed, {"A", "B"}), bell_state(0, 0)), 0.25, 1e-15);
  const double th = std::numbers::pi / 6;
  DensityOperator t =
      DensityOperator::from_pure({std::cos(th), 0.0, 0.0, std::sin(th)}, {"A", "B"});
  EXPECT_NEAR(fidelity_to_pure(t, bell_state(0, 0)), std::pow(std::cos(th - std::numbers::pi / 4), 2),
              1e-14);
  EXPECT_NEAR(fidelity_to_pure(t, bell_state(0, 0)), 0.9330127018922193, 1e-12);
  EXPECT_THROW(fidelity_to_pure(t, StateVector{1.0, 0.0}), DimensionError);
}

TEST(Qcore, MinEigenvalueExamples) {
  EXPECT_NEAR(min_eigenvalue(ComplexMatrix::diagonal({1.0, 2.0, 3.0})), 1.0, 1e-15);
  ComplexMatrix m = ComplexMatrix::projector(bell_state(0, 0)) - cplx(0.5) * ComplexMatrix::identity(4);
  auto ev = eigenvalues_hermitian(m);
  EXPECT_NEAR(ev[0], -0.5, 1e-14);
  EXPECT_NEAR(ev[1], -0.5, 1e-14);
  EXPECT_NEAR(ev[2], -0.5, 1e-14);
  EXPECT_NEAR(ev[3], 0.5, 1e-14);
  ComplexMatrix nh(2, {0.0, 1.0, 0.0, 0.0});
  EXPECT_THROW(min_eigenvalue(nh), ValidationError);
}

TEST(Qcore, MinEigenvalueMatchesCharacteristicPolynomial) {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    ComplexMatrix h = random_hermitian(4, rng);
    EXPECT_NEAR(min_eigenvalue(h), charpoly_min_root(h), 1e-9);
  }
}

TEST(Qcore, EigenvaluesOfKnownSpectrum) {
  Rng rng(7);
  for (std::size_t dim : {1u, 2u, 3u, 16u, 64u, 128u}) {
    std::vector<double> spec(dim);
    for (auto& x : spec) x = rng.uniform(-3.0, 3.0);
    ComplexMatrix U = random_unitary(dim, rng);
    ComplexMatrix h = U * ComplexMatrix::diagonal(spec) * U.adjoint();
    ComplexMatrix hs = h + h.adjoint();
    hs *= 0.5;
    auto ev = eigenvalues_hermitian(hs);
    std::sort(spec.begin(), spec.end());
    for (std::size_t k = 0; k < dim; ++k) EXPECT_NEAR(ev[k], spec[k], 1e-10) << "dim " << dim;
  }
}

TEST(Qcore, SymmetricEigenvalues) {
  std::vector<double> a{2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0};
  auto ev = eigenvalues_symmetric(a, 3);
  EXPECT_NEAR(ev[0], 2.0 - std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(ev[1], 2.0, 1e-14);
  EXPECT_NEAR(ev[2], 2.0 + std::sqrt(2.0), 1e-14);
}

TEST(Qcore, DensityOperatorValidation) {
  ComplexMatrix m = ComplexMatrix::diagonal({1.5, -0.5});
  EXPECT_THROW(DensityOperator(m, {"a"}), ValidationError);
  ComplexMatrix t = ComplexMatrix::diagonal({0.5, 0.6});
  EXPECT_THROW(DensityOperator(t, {"a"}), ValidationError);
  EXPECT_THROW(DensityOperator(ComplexMatrix::identity(2), {"a", "b"}), DimensionError);
  EXPECT_THROW(RegisterSet({"a", "a"}), RegisterError);
}

TEST(Qcore, MatrixArithmeticAssociative) {
  Rng rng(8);
  ComplexMatrix a = random_matrix(8, rng), b = random_matrix(8, rng), c = random_matrix(8, rng);
  EXPECT_LT(max_abs_diff((a * b) * c, a * (b * c)), 1e-12);
  EXPECT_LT(max_abs_diff((a + b) + c, a + (b + c)), 1e-12);
  EXPECT_NEAR(std::abs((a * b).trace() - (b * a).trace()), 0.0, 1e-12);
  EXPECT_LT(max_abs_diff((a * b).adjoint(), b.adjoint() * a.adjoint()), 1e-12);
}

TEST(Qcore, EmbedMatchesKron) {
  Rng rng(9);
  ComplexMatrix u = random_unitary(4, rng);
  // op on qubits (0,1) of 3 == kron(u, I2)
  EXPECT_LT(max_abs_diff(embed(u, 3, {0, 1}), kron(u, pauli_i())), 1e-15);
  // op on qubits (2,1): swap the roles; compare via explicit SWAP conjugation
  ComplexMatrix sw(4, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1});
  ComplexMatrix ref = kron(pauli_i(), sw * u * sw);
  EXPECT_LT(max_abs_diff(embed(u, 3, {2, 1}), ref), 1e-14);
}

TEST(Qcore, ContractPureMatchesProjectThenTrace) {
  Rng rng(10);
  DensityOperator r = random_density(rng, 3);
  StateVector psi = random_pure_state(4, rng);
  ComplexMatrix proj = embed(ComplexMatrix::projector(psi), 3, {2, 0});
  ComplexMatrix projected = proj * r.matrix() * proj;
  ComplexMatrix ref = partial_trace(projected, 3, {2, 0});
  EXPECT_LT(max_abs_diff(contract_pure(r.matrix(), 3, psi, {2, 0}), ref), 1e-14);
}
