#include "qrep/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qrep {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

void require_two_qubit(const DensityOperator& rho, const char* op) {
  if (rho.num_qubits() != 2) throw DimensionError(std::string(op) + ": expected a 2-qubit state");
}

const ComplexMatrix& psi00_projector() {
  static const ComplexMatrix m = ComplexMatrix::projector(bell_state(0, 0));
  return m;
}

}  // namespace

const RegisterSet& default_pair() {
  static const RegisterSet regs{"A", "B"};
  return regs;
}

// ------------------------------------------------------------ Bell diagonal

void BellDiagonalCoeffs::validate() const {
  double s = 0.0;
  for (double l : lambda) {
    require(l >= -1e-12, "Bell-diagonal coefficient is negative");
    s += l;
  }
  require(std::abs(s - 1.0) <= 1e-10, "Bell-diagonal coefficients do not sum to 1");
}

DensityOperator BellDiagonalCoeffs::reconstruct(const RegisterSet& regs) const {
  validate();
  ComplexMatrix m(4);
  for (int k = 0; k < 4; ++k) {
    ComplexMatrix p = ComplexMatrix::projector(bell_state(PauliLabel::from_index(k)));
    m += cplx(std::max(0.0, lambda[k])) * p;
  }
  return DensityOperator(std::move(m), regs);
}

double BellDiagonalCoeffs::max_abs_diff(const BellDiagonalCoeffs& o) const {
  double d = 0.0;
  for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(lambda[k] - o.lambda[k]));
  return d;
}

WernerState WernerState::from_fidelity(double F) {
  require(F >= 0.25 - 1e-12 && F <= 1.0 + 1e-12, "werner: F must lie in [1/4, 1]");
  return {F, (4.0 * F - 1.0) / 3.0};
}

BellDiagonalCoeffs WernerState::coeffs() const {
  const double t = (1.0 - F) / 3.0;
  return {{F, t, t, t}};
}

DensityOperator WernerState::reconstruct(const RegisterSet& regs) const {
  // w |Psi00><Psi00| + (1 - F)/3 * I
  ComplexMatrix m = cplx(w) * psi00_projector();
  m += cplx((1.0 - F) / 3.0) * ComplexMatrix::identity(4);
  return DensityOperator(std::move(m), regs);
}

double NoisyDecomposition::noise_fidelity() const {
  if (p >= 1.0) return 0.0;
  return std::clamp((F - p) / (1.0 - p), 0.0, 1.0);
}

DensityOperator NoisyDecomposition::reconstruct() const {
  ComplexMatrix m = cplx(p) * psi00_projector();
  m += cplx(1.0 - p) * sigma.matrix();
  return DensityOperator(std::move(m), sigma.registers());
}

// ----------------------------------------------------------------- twirls

BellDiagonalCoeffs bd_twirl(const DensityOperator& rho) {
  require_two_qubit(rho, "bd_twirl");
  BellDiagonalCoeffs c;
  for (int k = 0; k < 4; ++k) {
    const StateVector b = bell_state(PauliLabel::from_index(k));
    c.lambda[k] = clamp_unit(std::real(inner(b, rho.matrix() * b)), "Bell coefficient");
  }
  return c;
}

DensityOperator bd_twirl_state(const DensityOperator& rho) {
  return bd_twirl(rho).reconstruct(rho.registers());
}

WernerState werner_twirl(const DensityOperator& rho) {
  require_two_qubit(rho, "werner_twirl");
  const double F = fidelity_to_pure(rho, bell_state(0, 0));
  return {F, (4.0 * F - 1.0) / 3.0};
}

// ----------------------------------------------------------- named states

DensityOperator werner_state(double F) { return WernerState::from_fidelity(F).reconstruct(); }

DensityOperator r_state(double p) {
  require(p >= 0.0 && p <= 1.0, "r_state: p must lie in [0, 1]");
  ComplexMatrix m = cplx(p) * psi00_projector();
  m(1, 1) += 1.0 - p;  // |01><01|
  return DensityOperator(std::move(m), default_pair());
}

DensityOperator s_state(double p) {
  require(p >= 0.0 && p <= 1.0, "s_state: p must lie in [0, 1]");
  ComplexMatrix m = cplx(p) * psi00_projector();
  m(3, 3) += 1.0 - p;  // |11><11|
  return DensityOperator(std::move(m), default_pair());
}

DensityOperator theta_state(double theta) {
  require(std::isfinite(theta), "theta: angle must be finite");
  StateVector v{std::cos(theta), 0.0, 0.0, std::sin(theta)};
  return DensityOperator::from_pure(v, default_pair());
}

StateVector opt_noise_vector(double p, double F) {
  require(p >= 0.0 && F <= 1.0 && p <= F, "opt: requires 0 <= p <= F <= 1");
  const double Ft = p < 1.0 ? (F - p) / (1.0 - p) : 1.0;
  const StateVector b00 = bell_state(0, 0), b11 = bell_state(1, 1);
  StateVector v(4);
  for (int k = 0; k < 4; ++k) v[k] = std::sqrt(Ft) * b00[k] + std::sqrt(1.0 - Ft) * b11[k];
  return v;
}

DensityOperator opt_state(double p, double F) {
  const StateVector v = opt_noise_vector(p, F);
  ComplexMatrix m = cplx(p) * psi00_projector();
  m += cplx(1.0 - p) * ComplexMatrix::projector(v);
  return DensityOperator(std::move(m), default_pair());
}

DensityOperator bd_state(const BellDiagonalCoeffs& c) { return c.reconstruct(); }

DensityOperator make_named(const StateSpec& spec) {
  auto need = [&](std::size_t n, const char* name) {
    if (spec.params.size() != n)
      throw ValidationError(std::string(name) + ": expected " + std::to_string(n) + " parameter(s)");
  };
  switch (spec.kind) {
    case StateSpec::Kind::werner:
      need(1, "werner");
      return werner_state(spec.params[0]);
    case StateSpec::Kind::r_state:
      need(1, "r_state");
      return r_state(spec.params[0]);
    case StateSpec::Kind::s_state:
      need(1, "s_state");
      return s_state(spec.params[0]);
    case StateSpec::Kind::theta:
      need(1, "theta");
      return theta_state(spec.params[0]);
    case StateSpec::Kind::opt:
      need(2, "opt");
      return opt_state(spec.params[0], spec.params[1]);
    case StateSpec::Kind::bd: {
      need(4, "bd");
      BellDiagonalCoeffs c{{spec.params[0], spec.params[1], spec.params[2], spec.params[3]}};
      return bd_state(c);
    }
  }
  throw ValidationError("make_named: unknown kind");
}

// ---------------------------------------------------------- decomposition

double max_p(const DensityOperator& rho) {
  require_two_qubit(rho, "max_p");
  const double F = fidelity_to_pure(rho, bell_state(0, 0));
  auto feasible = [&](double q) {
    return min_eigenvalue(rho.matrix() - cplx(q) * psi00_projector()) >= -1e-12;
  };
  if (feasible(F)) return F;
  double lo = 0.0, hi = F;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

NoisyDecomposition decompose(const DensityOperator& rho, double p) {
  require_two_qubit(rho, "decompose");
  require(p >= 0.0 && p <= 1.0, "decompose: p must lie in [0, 1]");
  const double F = fidelity_to_pure(rho, bell_state(0, 0));
  if (p >= 1.0) {
    if (max_abs_diff(rho.matrix(), psi00_projector()) > 1e-10)
      throw InfeasibleError("decompose: p = 1 requires rho = |Psi00><Psi00|");
    return {1.0, 1.0, DensityOperator(ComplexMatrix::identity(4) *= 0.25, rho.registers())};
  }
  const double pmax = max_p(rho);
  if (p > pmax + 1e-9)
    throw InfeasibleError("decompose: p = " + std::to_string(p) + " exceeds max_p = " +
                          std::to_string(pmax));
  ComplexMatrix s = rho.matrix() - cplx(p) * psi00_projector();
  s *= 1.0 / (1.0 - p);
  return {p, F, DensityOperator(std::move(s), rho.registers())};
}

}  // namespace qrep
