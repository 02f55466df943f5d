#pragma once

#include <array>
#include <optional>

#include "qrep/qcore.hpp"
#include "qrep/states.hpp"

namespace qrep {

// One BSM outcome of a two-link swap.  rho1 lives on (B1, A1), rho2 on
// (A2, B2); the output state lives on (B1, B2) after the Pauli correction
// on B2.
struct SwapOutcome {
  PauliLabel label;
  double probability = 0.0;
  std::optional<DensityOperator> state;  // empty when probability < 1e-14
  double fidelity = 0.0;                 // NaN for an undefined outcome

  bool defined() const { return state.has_value(); }
};

const RegisterSet& swap_input_registers();  // (B1, A1, A2, B2)
const RegisterSet& swap_output_registers();  // (B1, B2)

SwapOutcome postselected_swap(const DensityOperator& rho1, const DensityOperator& rho2,
                              PauliLabel outcome);
std::array<SwapOutcome, 4> swap_all_outcomes(const DensityOperator& rho1,
                                             const DensityOperator& rho2);
DensityOperator nonpostselected_swap(const DensityOperator& rho1, const DensityOperator& rho2);

// Teleport a one-qubit `input` through the two-qubit `resource`.
DensityOperator teleport_channel(const DensityOperator& resource, const DensityOperator& input);

// Bell-diagonal swap: output index k1 XOR k2.
BellDiagonalCoeffs bd_swap(const BellDiagonalCoeffs& lambda, const BellDiagonalCoeffs& mu);

// BSM outcome at which two copies of opt_state(p, F) swap to the largest
// possible fidelity 1 - 2p(1 - F).  With the Pauli on the second qubit of the
// Bell vectors both Z (01) and X (10) do; Z is returned.
PauliLabel opt_saturating_label();

struct SwapStats {
  double probability = 0.0;
  double fidelity = 0.0;
};
// Closed-form swap statistics of two S_{p,F} members from the statistics of
// their noise components.
SwapStats noisy_swap_stats(const NoisyDecomposition& d1, const NoisyDecomposition& d2,
                           PauliLabel outcome);

}  // namespace qrep
