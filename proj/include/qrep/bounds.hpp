#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "qrep/qcore.hpp"
#include "qrep/sdp.hpp"

namespace qrep {

// ------------------------------------------------------------ closed forms

// Largest postselected swap fidelity over S_{p,F} x S_{p,F}: 1 - 2p(1 - F).
double f_max(double p, double F);
// Analytical lower bound p(2F - p) / (1 + (1 - p)^2).
double f_min_analytic(double p, double F);

// Noise-component reparameterisations of a swap with total probability delta.
double noise_fidelity(double p, double F);           // (F - p) / (1 - p)
double delta_tilde(double p, double delta);          // (4 delta - 2p + p^2) / (4 (1-p)^2)
double delta_from_tilde(double p, double delta_t);   // p/2 - p^2/4 + (1-p)^2 delta_t
// Fidelity (Fp/2 - p^2/4 + (1-p)^2 H) / delta for the linearised objective H.
double fidelity_from_objective(double p, double F, double delta, double H);

// Lowest outcome fidelity of the ideal pair opt_state(p,F) x opt_state(p,F).
double psi_min_outcome(double p, double F);

// -------------------------------------------------------- permutation algebra

// Registers of the four-qubit swap input, in tensor order.
enum Register : int { kB1 = 0, kA1 = 1, kA2 = 2, kB2 = 3 };

// tau[i] is where the content of register i is moved.
using Permutation = std::array<int, 4>;

Permutation identity_permutation();
Permutation transposition(int a, int b);
Permutation compose(const Permutation& outer, const Permutation& inner);  // outer o inner
Permutation inverse(const Permutation& t);
int cycle_count(const Permutation& t);
std::string cycle_type(const Permutation& t);  // e.g. "2+1+1"
std::string cycle_notation(const Permutation& t);  // e.g. "(B1 A2)(A1 B2)"

struct PermutationOperator {
  Permutation tau;
  ComplexMatrix matrix;  // 16 x 16, M |k> = |tau(k)>
  int trace = 0;
};

ComplexMatrix permutation_matrix(const Permutation& t);
// Trace of M_tau from the cycle type: 2^(number of cycles).
int permutation_trace(const Permutation& t);
// All 24 operators in lexicographic order of tau; traces are checked
// against the cycle-type table and the function throws on a mismatch.
std::vector<PermutationOperator> build_permutation_algebra();

// ------------------------------------------------------------ SDP builders

enum class Sense { min, max };
// full: the operator and its partial transpose as two 16 x 16 blocks.
// reduced: the same constraints split into the irreducible blocks of the
// permutation algebra (sizes 1, 3, 2 for each of the two operators).
enum class BlockForm { full, reduced };

struct SymmetrizedProblem {
  double p = 0.0, F = 0.0, delta = 0.0;
  double delta_t = 0.0, f_t = 0.0;
  Sense sense = Sense::min;
  BlockForm form = BlockForm::full;
  std::vector<Permutation> perms;  // index set of the coefficient vectors
  std::vector<double> u, v, w1, w2, x;
  std::vector<ComplexMatrix> generators;  // retained real basis, Hermitian
  std::vector<std::string> generator_names;
  SdpProblem sdp;

  // sum_k x_k generators[k], in the rotated frame where every pair
  // projector is onto Psi11.
  ComplexMatrix operator_from(const std::vector<double>& x) const;
  // The same operator rotated back to the frame of the original problem.
  ComplexMatrix unrotated_operator(const std::vector<double>& x) const;
  // The optimum H of the linearised objective from a solver result.
  double objective_from(const SdpSolution& s) const;
};

// Local rotation (XZ)_{B1} (XZ)_{A2} mapping every Psi00 pair projector of
// the problem to Psi11.
const ComplexMatrix& frame_rotation();

SymmetrizedProblem build_symmetrized_sdp(double p, double F, double delta, Sense sense,
                                         BlockForm form = BlockForm::full);
// 256 real parameters, unrotated projectors; cross-validation oracle.
SdpProblem build_unsymmetrized_sdp(double p, double F, double delta, Sense sense);
// Sign-corrected objective value of an unsymmetrized solve.
double unsymmetrized_objective(const SdpSolution& s, Sense sense);

// --------------------------------------------------------- bound functions

struct BoundsOptions {
  BlockForm form = BlockForm::reduced;
  double tol = 1e-8;
  int grid_points = 100;
  double delta_tol = 1e-6;
};

// Optimal value of the relaxed linearised objective at fixed delta.
double h_rel(double p, double F, double delta, Sense sense, const BoundsOptions& o = {});
// Range of the swap probability over the relaxed feasible set.
std::pair<double, double> delta_region(double p, double F, const BoundsOptions& o = {});

struct SdpBound {
  double bound = 0.0;
  double delta_star = 0.0;
};
SdpBound f_min_sdp(double p, double F, const BoundsOptions& o = {});
SdpBound f_max_sdp(double p, double F, const BoundsOptions& o = {});

struct DeltaCurvePoint {
  double delta = 0.0, lower = 0.0, upper = 0.0;
};
std::vector<DeltaCurvePoint> fidelity_vs_delta(double p, double F, int n_points,
                                               const BoundsOptions& o = {});

struct BoundSweepRow {
  double p = 0.0, F = 0.0;
  double f_max = 0.0, f_min_analytic = 0.0, f_min_sdp = 0.0, delta_star = 0.0;
  double bd_lower = 0.0, bd_upper = 0.0, f_werner = 0.0;
  double psi_min_outcome = 0.0;

  // Ordering chain f_min_analytic <= f_min_sdp <= bd_lower <= f_werner <=
  // bd_upper <= f_max; returns an empty string when it holds.
  std::string ordering_violation(double slack = 1e-6) const;
};

BoundSweepRow bound_row(double p, double F, const BoundsOptions& o = {});
// bound_row for every (p, F) point on `threads` workers (0: one per core).
// Rows keep the input order; the first failure is rethrown.
std::vector<BoundSweepRow> bound_sweep(const std::vector<std::pair<double, double>>& points,
                                       const BoundsOptions& o = {}, unsigned threads = 0);
std::string bound_csv_header();
std::string bound_csv_line(const BoundSweepRow& r);

}  // namespace qrep
