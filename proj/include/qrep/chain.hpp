#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrep/qcore.hpp"
#include "qrep/random.hpp"
#include "qrep/states.hpp"

namespace qrep {

// BSM outcomes of the N-1 repeater nodes; entry k-1 belongs to node k.
using Syndrome = std::vector<PauliLabel>;

Syndrome syndrome_from_index(std::uint64_t index, int n_links);
std::uint64_t syndrome_count(int n_links);  // 4^(N-1)

// Pauli correction applied at one node, as a function of the syndrome:
//   constant * prod_{k in product_of} s_k * table[s restricted to table_nodes]
// Nodes are numbered 1..N-1.  Everything the rule reads is listed in
// dependencies(), which is what the physicality check inspects.
struct CorrectionRule {
  PauliLabel constant;
  std::vector<int> product_of;
  std::vector<int> table_nodes;
  std::vector<PauliLabel> table;  // 4^|table_nodes| entries, or empty

  static CorrectionRule identity() { return {}; }
  static CorrectionRule fixed(PauliLabel p) { return {p, {}, {}, {}}; }
  static CorrectionRule product(std::vector<int> nodes) { return {{}, std::move(nodes), {}, {}}; }

  std::vector<int> dependencies() const;
  PauliLabel evaluate(const Syndrome& s) const;
};

enum class BuiltinProtocol { sequential, correct_at_end };

// Chain of N links.  Link k occupies (L_k, R_k); node 0 holds L_1, node N
// holds R_N and repeater node k holds (R_k, L_{k+1}).  Corrections act on
// the left qubit of each node, the BSM at node k projects (R_k, L_{k+1})
// onto Psi_{s_k} with the Pauli on L_{k+1}.
struct SwapAndCorrectProtocol {
  int n_links = 2;
  std::vector<int> bsm_order;               // permutation of 1..N-1
  std::vector<CorrectionRule> corrections;  // nodes 0..N
  std::optional<BuiltinProtocol> builtin;
};

SwapAndCorrectProtocol builtin_protocol(BuiltinProtocol kind, int n);
// Arbitrary physically implementable corrections at nodes 0..N-1 and a
// random BSM order; P_N is solved from the product condition.
SwapAndCorrectProtocol random_valid_protocol(int n, Rng& rng);

struct ProtocolReport {
  bool physical = true;
  bool correct = true;
  bool brute_force_checked = false;
  bool brute_force_ok = true;
  std::vector<Syndrome> failing;  // first few violating syndromes
  std::string message;

  bool valid() const { return physical && correct && brute_force_ok; }
};
ProtocolReport validate_protocol(const SwapAndCorrectProtocol& p);

struct ChainOutcome {
  double probability = 0.0;
  std::optional<DensityOperator> state;  // on (L1, R_N); empty if probability < 1e-14
  double fidelity = 0.0;
};

constexpr int kMaxBruteForceLinks = 5;

// Corrections then projections on the full tensor product of the links.
// `literal` conjugates the full state by every correction; otherwise the
// repeater corrections are folded into the projection vectors (same map).
ChainOutcome run_chain_postselected(const std::vector<DensityOperator>& links,
                                    const SwapAndCorrectProtocol& p, const Syndrome& s,
                                    bool literal = false);
DensityOperator run_chain_nonpostselected(const std::vector<DensityOperator>& links,
                                          const SwapAndCorrectProtocol& p);

BellDiagonalCoeffs bd_chain(const std::vector<BellDiagonalCoeffs>& coeffs);
// (prod F_k, 1/2 prod (2F_k - 1) + 1/2).  The lower bound always holds; the
// upper bound holds for two links, and for longer chains when every F_k >= 1/2.
std::pair<double, double> chain_fidelity_bounds(const std::vector<double>& F);
// Werner approximation of a chain: 3/4 prod_k w_k + 1/4.
double werner_chain_fidelity(const std::vector<double>& F);

struct OutcomeEntry {
  DensityOperator state;
  double probability = 0.0;
  std::uint64_t syndromes = 0;
  double fidelity = 0.0;
};

struct OutcomeDistribution {
  std::vector<OutcomeEntry> entries;
  std::uint64_t zero_probability_syndromes = 0;

  double total_probability() const;
  DensityOperator average() const;
};

constexpr int kMaxExactLinks = 8;
constexpr int kMaxMergedLinks = 14;
constexpr double kMergeTolerance = 1e-9;

// Syndrome-resolved outputs of n identical links.  With merge, intermediate
// states equal after rounding to kMergeTolerance are combined.
OutcomeDistribution outcome_distribution(const DensityOperator& link, int n,
                                         const SwapAndCorrectProtocol& p, bool merge = true);
// Distinct links: brute force, n <= 5.
OutcomeDistribution outcome_distribution(const std::vector<DensityOperator>& links,
                                         const SwapAndCorrectProtocol& p);

}  // namespace qrep
