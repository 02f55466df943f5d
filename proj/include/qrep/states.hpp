#pragma once

#include <array>
#include <vector>

#include "qrep/qcore.hpp"

namespace qrep {

// Registers used for a stand-alone two-qubit state.
const RegisterSet& default_pair();

// Probabilities (l00, l01, l10, l11) over the Bell basis, index k = 2i + j.
struct BellDiagonalCoeffs {
  std::array<double, 4> lambda{1.0, 0.0, 0.0, 0.0};

  double fidelity() const { return lambda[0]; }
  double operator[](int k) const { return lambda[k]; }
  void validate() const;
  DensityOperator reconstruct(const RegisterSet& regs = default_pair()) const;
  double max_abs_diff(const BellDiagonalCoeffs& o) const;
};

struct WernerState {
  double F = 1.0;
  double w = 1.0;  // (4F - 1) / 3

  static WernerState from_fidelity(double F);
  BellDiagonalCoeffs coeffs() const;
  DensityOperator reconstruct(const RegisterSet& regs = default_pair()) const;
};

// rho = p |Psi00><Psi00| + (1 - p) sigma with <Psi00|rho|Psi00> = F.
struct NoisyDecomposition {
  double p = 0.0;
  double F = 0.0;
  DensityOperator sigma;

  double noise_fidelity() const;  // (F - p) / (1 - p), 0 by convention at p = 1
  DensityOperator reconstruct() const;
};

BellDiagonalCoeffs bd_twirl(const DensityOperator& rho);
DensityOperator bd_twirl_state(const DensityOperator& rho);
WernerState werner_twirl(const DensityOperator& rho);

DensityOperator werner_state(double F);
DensityOperator r_state(double p);      // p Psi00 + (1-p)|01><01|
DensityOperator s_state(double p);      // p Psi00 + (1-p)|11><11|
DensityOperator theta_state(double theta);  // cos|00> + sin|11>
DensityOperator opt_state(double p, double F);
DensityOperator bd_state(const BellDiagonalCoeffs& c);
// The pure noise component of opt_state: sqrt(Ft) Psi00 + sqrt(1-Ft) Psi11.
StateVector opt_noise_vector(double p, double F);

struct StateSpec {
  enum class Kind { werner, r_state, s_state, theta, opt, bd };
  Kind kind = Kind::werner;
  std::vector<double> params;
};
DensityOperator make_named(const StateSpec& spec);

// Largest q with rho - q|Psi00><Psi00| >= 0 (bisection, 60 steps).
double max_p(const DensityOperator& rho);
NoisyDecomposition decompose(const DensityOperator& rho, double p);

}  // namespace qrep
