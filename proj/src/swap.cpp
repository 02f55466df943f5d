#include "qrep/swap.hpp"

#include <cmath>
#include <limits>

namespace qrep {

namespace {

constexpr double kZeroProbability = 1e-14;

void require_two_qubit(const DensityOperator& rho, const char* op) {
  if (rho.num_qubits() != 2) throw DimensionError(std::string(op) + ": expected 2-qubit states");
}

// Unnormalised, corrected B1B2 operator for outcome `l`.
ComplexMatrix swap_unnormalised(const ComplexMatrix& joint, PauliLabel l) {
  // registers: 0 = B1, 1 = A1, 2 = A2, 3 = B2
  ComplexMatrix out = contract_pure(joint, 4, bell_state(l), {1, 2});
  // correction Z^j X^i on B2 (qubit 1 of the output)
  const ComplexMatrix corr = l.is_identity() ? pauli_i() : l.matrix().adjoint();
  return conjugate(out, 2, corr, {1});
}

}  // namespace

const RegisterSet& swap_input_registers() {
  static const RegisterSet r{"B1", "A1", "A2", "B2"};
  return r;
}

const RegisterSet& swap_output_registers() {
  static const RegisterSet r{"B1", "B2"};
  return r;
}

SwapOutcome postselected_swap(const DensityOperator& rho1, const DensityOperator& rho2,
                              PauliLabel outcome) {
  require_two_qubit(rho1, "postselected_swap");
  require_two_qubit(rho2, "postselected_swap");
  const ComplexMatrix joint = kron(rho1.matrix(), rho2.matrix());
  ComplexMatrix out = swap_unnormalised(joint, outcome);
  SwapOutcome res;
  res.label = outcome;
  res.probability = clamp_unit(out.trace().real(), "swap probability");
  if (res.probability < kZeroProbability) {
    res.fidelity = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  out *= 1.0 / res.probability;
  res.state = DensityOperator(std::move(out), swap_output_registers());
  res.fidelity = fidelity_to_pure(*res.state, bell_state(0, 0));
  return res;
}

std::array<SwapOutcome, 4> swap_all_outcomes(const DensityOperator& rho1,
                                             const DensityOperator& rho2) {
  std::array<SwapOutcome, 4> all;
  for (int k = 0; k < 4; ++k) all[k] = postselected_swap(rho1, rho2, PauliLabel::from_index(k));
  return all;
}

DensityOperator nonpostselected_swap(const DensityOperator& rho1, const DensityOperator& rho2) {
  require_two_qubit(rho1, "nonpostselected_swap");
  require_two_qubit(rho2, "nonpostselected_swap");
  const ComplexMatrix joint = kron(rho1.matrix(), rho2.matrix());
  ComplexMatrix sum(4);
  for (int k = 0; k < 4; ++k) sum += swap_unnormalised(joint, PauliLabel::from_index(k));
  return DensityOperator(std::move(sum), swap_output_registers());
}

DensityOperator teleport_channel(const DensityOperator& resource, const DensityOperator& input) {
  require_two_qubit(resource, "teleport_channel");
  if (input.num_qubits() != 1) throw DimensionError("teleport_channel: input must be one qubit");
  // registers: 0 = C (input), 1 = A, 2 = B
  const ComplexMatrix joint = kron(input.matrix(), resource.matrix());
  ComplexMatrix sum(2);
  for (int k = 0; k < 4; ++k) {
    const PauliLabel l = PauliLabel::from_index(k);
    ComplexMatrix out = contract_pure(joint, 3, bell_state(l), {0, 1});
    sum += conjugate(out, 1, l.matrix().adjoint(), {0});
  }
  return DensityOperator(std::move(sum), RegisterSet{"B"});
}

PauliLabel opt_saturating_label() { return PauliLabel{0, 1}; }

BellDiagonalCoeffs bd_swap(const BellDiagonalCoeffs& lambda, const BellDiagonalCoeffs& mu) {
  lambda.validate();
  mu.validate();
  BellDiagonalCoeffs out{{0.0, 0.0, 0.0, 0.0}};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) out.lambda[a ^ b] += lambda.lambda[a] * mu.lambda[b];
  return out;
}

SwapStats noisy_swap_stats(const NoisyDecomposition& d1, const NoisyDecomposition& d2,
                           PauliLabel outcome) {
  const double p1 = d1.p, p2 = d2.p, F1 = d1.F, F2 = d2.F;
  const double q = (1.0 - p1) * (1.0 - p2);
  double pt = 0.0, pf = 0.0;  // noise-only probability and probability*fidelity
  if (q > 0.0) {
    const SwapOutcome s = postselected_swap(d1.sigma, d2.sigma, outcome);
    pt = s.probability;
    pf = s.defined() ? s.probability * s.fidelity : 0.0;
  }
  SwapStats r;
  r.probability = clamp_unit((p1 + p2 - p1 * p2) / 4.0 + q * pt, "swap probability");
  const double num = p1 * F2 + p2 * F1 - p1 * p2 + 4.0 * q * pf;
  const double den = p1 + p2 - p1 * p2 + 4.0 * q * pt;
  r.fidelity = den > 4.0 * kZeroProbability ? clamp_unit(num / den, "swap fidelity")
                                            : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace qrep
