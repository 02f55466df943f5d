#pragma once

#include <cstdint>
#include <random>

#include "qrep/qcore.hpp"
#include "qrep/states.hpp"

namespace qrep {

constexpr std::uint64_t kDefaultSeed = 20240917;

// Seeded source of random states used by tests, the self-test and sweeps.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

StateVector random_pure_state(std::size_t dim, Rng& rng);
// Ginibre construction: trace out an equally sized ancilla of a Haar-random
// pure state (full rank with probability one).
DensityOperator random_density(Rng& rng, std::size_t nqubits = 2);
BellDiagonalCoeffs random_bd(Rng& rng);
ComplexMatrix random_unitary(std::size_t dim, Rng& rng);
ComplexMatrix random_matrix(std::size_t dim, Rng& rng);
ComplexMatrix random_hermitian(std::size_t dim, Rng& rng);
// Random two-qubit state with <Psi00|rho|Psi00> = F exactly.
DensityOperator random_with_fidelity(double F, Rng& rng);

}  // namespace qrep
