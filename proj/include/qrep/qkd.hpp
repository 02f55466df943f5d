#pragma once

#include <array>
#include <string>
#include <vector>

#include "qrep/qcore.hpp"
#include "qrep/states.hpp"

namespace qrep {

// Error rates of BBM92 measured in the X, Y and Z bases.  For Psi00 the X
// and Z outcomes are correlated and the Y outcomes anticorrelated, so
// Q_X = (1 - <XX>)/2, Q_Y = (1 + <YY>)/2, Q_Z = (1 - <ZZ>)/2.
struct QberTriple {
  double qx = 0.0, qy = 0.0, qz = 0.0;
};

QberTriple qber(const DensityOperator& sigma);
// Same quantity from Bell-diagonal coefficients:
// (lambda01 + lambda11, lambda10 + lambda01, lambda10 + lambda11).
QberTriple qber(const BellDiagonalCoeffs& c);

// Binary entropy in bits with h(0) = h(1) = 0.
double binary_entropy(double x);

enum class BasisPair { XZ, XY, YZ };
std::string to_string(BasisPair b);
// XZ, XY, YZ: also the tie-break order of best_basis_skf.
const std::array<BasisPair, 3>& all_basis_pairs();

// max(0, 1 - h(Q_a) - h(Q_b)) for the two bases of the pair.
double skf(const QberTriple& q, BasisPair b);
double skf(const DensityOperator& sigma, BasisPair b);

struct BasisChoice {
  BasisPair pair = BasisPair::XZ;
  double value = 0.0;
};
BasisChoice best_basis_skf(const QberTriple& q);
BasisChoice best_basis_skf(const DensityOperator& sigma);

enum class SkfMode { postselected, nonpostselected, bd_approx, werner_approx };
std::string to_string(SkfMode m);

struct ChainSkf {
  BasisChoice best;
  std::array<double, 3> per_pair{};  // in all_basis_pairs() order
};

// Secret-key fraction of a chain of n identical links swapped with the
// correct-at-end protocol.  postselected: sum_s p_s SKF(rho_s) with one
// basis pair chosen for the whole chain; nonpostselected: SKF of the
// syndrome-averaged state; bd_approx: SKF of the chained Bell-diagonal
// twirl; werner_approx: SKF of the Werner state with the chained fidelity.
ChainSkf chain_skf_detail(const DensityOperator& link, int n, SkfMode mode);
double chain_skf(const DensityOperator& link, int n, SkfMode mode);

// Closed forms: 1 - h(1/2 - (2F - 1)^n / 2) for opt-state links measured in
// X and Y, and max(0, 1 - 2 h(1/2 - w^n / 2)) for Werner links.
double opt_chain_skf_closed_form(double F, int n);
double werner_chain_skf_closed_form(double F, int n);

struct QkdRow {
  int n = 0;
  double skf_postselected = 0.0, skf_bd = 0.0, skf_werner = 0.0;
};
std::vector<QkdRow> qkd_sweep(const DensityOperator& link, int n_min, int n_max);
std::string qkd_csv_header();
std::string qkd_csv_line(const QkdRow& r);

}  // namespace qrep
