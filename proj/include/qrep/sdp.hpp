#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qrep/qcore.hpp"

namespace qrep {

// Affine Hermitian block x -> constant + sum_k x_{terms[k].first} terms[k].second,
// constrained to be positive semidefinite.
struct PsdBlock {
  std::size_t dim = 0;
  ComplexMatrix constant;
  std::vector<std::pair<std::size_t, ComplexMatrix>> terms;

  explicit PsdBlock(std::size_t d = 0) : dim(d), constant(d) {}
  void add_term(std::size_t var, ComplexMatrix g) { terms.emplace_back(var, std::move(g)); }
  ComplexMatrix evaluate(const std::vector<double>& x) const;
};

// minimize c^T x  s.t.  a_k^T x = b_k,  every block >= 0.
struct SdpProblem {
  std::size_t n_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<PsdBlock> blocks;

  explicit SdpProblem(std::size_t n = 0) : n_vars(n), objective(n, 0.0) {}
  void add_equality(std::vector<double> row, double rhs);
  // Throws DimensionError / ValidationError / SizeError on malformed input.
  void validate() const;
};

// near_optimal: the solver stalled (typically on a feasible set without
// interior) but its best iterate meets 1000 x tol on gap and residuals.
enum class SdpStatus { optimal, near_optimal, infeasible, max_iterations };
std::string to_string(SdpStatus s);

struct SdpSolution {
  std::vector<double> x;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  SdpStatus status = SdpStatus::max_iterations;
  double duality_gap = 0.0;
  double max_equality_residual = 0.0;
  double min_block_eigenvalue = 0.0;
  int iterations = 0;
};

constexpr double kDefaultSdpTolerance = 1e-7;
constexpr int kDefaultSdpIterations = 200;
constexpr std::size_t kMaxSdpVars = 512;
constexpr std::size_t kMaxSdpBlockDim = 64;

// Infeasible-start primal-dual path following (HKM direction, Mehrotra
// predictor-corrector) on the real symmetric embedding of every block.
SdpSolution solve(const SdpProblem& p, double tol = kDefaultSdpTolerance,
                  int max_iterations = kDefaultSdpIterations);

struct CertificateReport {
  bool ok = false;
  double equality_residual = 0.0;
  double min_block_eigenvalue = 0.0;
  double objective_mismatch = 0.0;
  double duality_gap = 0.0;
  std::string message;
};

// Real basis of d x d Hermitian matrices: E_aa, then E_ab + E_ba and
// i(E_ab - E_ba) for a < b.  A Hermitian H equals sum_k x_k basis[k] with
// x = (H_aa, Re H_ab, Im H_ab).
std::vector<ComplexMatrix> hermitian_basis(std::size_t d);

// Recomputes feasibility and objective from s.x alone; every check allows
// ten times the solver tolerance.
CertificateReport check_certificate(const SdpProblem& p, const SdpSolution& s,
                                    double tol = kDefaultSdpTolerance);

}  // namespace qrep
