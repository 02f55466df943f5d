#include "qrep/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "qrep/swap.hpp"

namespace qrep {

namespace {

constexpr double kZeroProbability = 1e-14;

std::string syndrome_string(const Syndrome& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k].name();
  os << ")";
  return os.str();
}

void check_links(const std::vector<DensityOperator>& links, const SwapAndCorrectProtocol& p) {
  if (static_cast<int>(links.size()) != p.n_links)
    throw DimensionError("chain: protocol expects " + std::to_string(p.n_links) + " links, got " +
                         std::to_string(links.size()));
  if (p.n_links > kMaxBruteForceLinks)
    throw SizeError("chain: brute-force path supports at most " +
                    std::to_string(kMaxBruteForceLinks) +
                    " links; use bd_chain or outcome_distribution for longer chains");
  for (const auto& l : links)
    if (l.num_qubits() != 2) throw DimensionError("chain: every link must be a 2-qubit state");
}

ComplexMatrix joint_state(const std::vector<DensityOperator>& links) {
  ComplexMatrix m = links[0].matrix();
  for (std::size_t k = 1; k < links.size(); ++k) m = kron(m, links[k].matrix());
  return m;
}

std::size_t correction_qubit(int node, int n) {
  if (node == 0) return 0;
  if (node == n) return static_cast<std::size_t>(2 * n - 1);
  return static_cast<std::size_t>(2 * node - 1);
}

ChainOutcome finish(ComplexMatrix out, const RegisterSet& regs) {
  ChainOutcome r;
  r.probability = clamp_unit(out.trace().real(), "chain probability");
  if (r.probability < kZeroProbability) {
    r.fidelity = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  out *= 1.0 / r.probability;
  r.state = DensityOperator(std::move(out), regs);
  r.fidelity = fidelity_to_pure(*r.state, bell_state(0, 0));
  return r;
}

ChainOutcome run_on_joint(const ComplexMatrix& joint, const SwapAndCorrectProtocol& p,
                          const Syndrome& s, bool literal) {
  const int n = p.n_links;
  const std::size_t nq = static_cast<std::size_t>(2 * n);
  if (static_cast<int>(s.size()) != n - 1) throw DimensionError("chain: syndrome length != N-1");
  std::vector<PauliLabel> corr(n + 1);
  for (int k = 0; k <= n; ++k) corr[k] = p.corrections[k].evaluate(s);

  std::vector<std::size_t> mid;
  for (std::size_t q = 1; q + 1 < nq; ++q) mid.push_back(q);

  ComplexMatrix out;
  if (literal) {
    ComplexMatrix m = joint;
    for (int k = 0; k <= n; ++k)
      if (!corr[k].is_identity()) m = conjugate(m, nq, corr[k].matrix(), {correction_qubit(k, n)});
    StateVector psi{1.0};
    for (int k = 1; k < n; ++k) psi = kron(psi, bell_state(s[k - 1]));
    out = contract_pure(m, nq, psi, mid);
  } else {
    // <b| (P (x) I) rho (P (x) I)^dagger |b> = <b'| rho |b'> with
    // |b'> = (P^dagger (x) I)|b>; end-node corrections act on the result.
    StateVector psi{1.0};
    for (int k = 1; k < n; ++k) {
      StateVector b = bell_state(s[k - 1]);
      if (!corr[k].is_identity()) b = kron(corr[k].matrix().adjoint(), pauli_i()) * b;
      psi = kron(psi, b);
    }
    out = contract_pure(joint, nq, psi, mid);
    if (!corr[0].is_identity()) out = conjugate(out, 2, corr[0].matrix(), {0});
    if (!corr[n].is_identity()) out = conjugate(out, 2, corr[n].matrix(), {1});
  }
  return finish(std::move(out), RegisterSet{"L1", "R" + std::to_string(n)});
}

std::vector<long long> merge_key(const ComplexMatrix& m) {
  std::vector<long long> key;
  key.reserve(2 * m.entries().size());
  for (const auto& z : m.entries()) {
    key.push_back(std::llround(z.real() / kMergeTolerance));
    key.push_back(std::llround(z.imag() / kMergeTolerance));
  }
  return key;
}

struct Accumulator {
  std::map<std::vector<long long>, std::size_t> index;
  OutcomeDistribution dist;

  void add(DensityOperator state, double prob, std::uint64_t count, bool merge) {
    if (merge) {
      auto key = merge_key(state.matrix());
      auto it = index.find(key);
      if (it != index.end()) {
        auto& e = dist.entries[it->second];
        e.probability += prob;
        e.syndromes += count;
        return;
      }
      index.emplace(std::move(key), dist.entries.size());
    }
    const double f = fidelity_to_pure(state, bell_state(0, 0));
    dist.entries.push_back({std::move(state), prob, count, f});
  }
};

}  // namespace

// --------------------------------------------------------------- syndromes

std::uint64_t syndrome_count(int n_links) {
  if (n_links < 1 || n_links > 32) throw DomainError("syndrome_count: unsupported chain length");
  return std::uint64_t{1} << (2 * (n_links - 1));
}

Syndrome syndrome_from_index(std::uint64_t index, int n_links) {
  Syndrome s(static_cast<std::size_t>(n_links - 1));
  for (int k = n_links - 2; k >= 0; --k) {
    s[static_cast<std::size_t>(k)] = PauliLabel::from_index(static_cast<int>(index & 3u));
    index >>= 2;
  }
  return s;
}

std::vector<int> CorrectionRule::dependencies() const {
  std::set<int> d(product_of.begin(), product_of.end());
  d.insert(table_nodes.begin(), table_nodes.end());
  return {d.begin(), d.end()};
}

PauliLabel CorrectionRule::evaluate(const Syndrome& s) const {
  PauliLabel v = constant;
  auto at = [&](int node) -> PauliLabel {
    if (node < 1 || node > static_cast<int>(s.size()))
      throw ValidationError("correction rule reads node " + std::to_string(node) +
                            " outside 1..N-1");
    return s[static_cast<std::size_t>(node - 1)];
  };
  for (int k : product_of) v = v * at(k);
  if (!table.empty()) {
    std::size_t idx = 0;
    for (int k : table_nodes) idx = idx * 4 + static_cast<std::size_t>(at(k).index());
    if (idx >= table.size()) throw ValidationError("correction table too small");
    v = v * table[idx];
  }
  return v;
}

// --------------------------------------------------------------- protocols

SwapAndCorrectProtocol builtin_protocol(BuiltinProtocol kind, int n) {
  if (n < 2) throw DomainError("builtin_protocol: need at least 2 links");
  SwapAndCorrectProtocol p;
  p.n_links = n;
  p.builtin = kind;
  p.bsm_order.resize(static_cast<std::size_t>(n - 1));
  std::iota(p.bsm_order.begin(), p.bsm_order.end(), 1);
  p.corrections.assign(static_cast<std::size_t>(n + 1), CorrectionRule::identity());
  if (kind == BuiltinProtocol::sequential) {
    for (int k = 2; k <= n; ++k) p.corrections[k] = CorrectionRule::product({k - 1});
  } else {
    std::vector<int> all(static_cast<std::size_t>(n - 1));
    std::iota(all.begin(), all.end(), 1);
    p.corrections[n] = CorrectionRule::product(all);
  }
  return p;
}

SwapAndCorrectProtocol random_valid_protocol(int n, Rng& rng) {
  if (n < 2) throw DomainError("random_valid_protocol: need at least 2 links");
  SwapAndCorrectProtocol p;
  p.n_links = n;
  p.bsm_order.resize(static_cast<std::size_t>(n - 1));
  std::iota(p.bsm_order.begin(), p.bsm_order.end(), 1);
  std::shuffle(p.bsm_order.begin(), p.bsm_order.end(), rng.engine());
  p.corrections.resize(static_cast<std::size_t>(n + 1));

  auto random_rule = [&](const std::vector<int>& allowed) {
    CorrectionRule r;
    r.constant = PauliLabel::from_index(rng.integer(0, 3));
    for (int k : allowed)
      if (rng.integer(0, 1)) r.table_nodes.push_back(k);
    r.table.resize(std::size_t{1} << (2 * r.table_nodes.size()));
    for (auto& t : r.table) t = PauliLabel::from_index(rng.integer(0, 3));
    return r;
  };
  std::vector<int> seen;
  for (int node : p.bsm_order) {
    p.corrections[node] = random_rule(seen);
    seen.push_back(node);
  }
  std::vector<int> all(static_cast<std::size_t>(n - 1));
  std::iota(all.begin(), all.end(), 1);
  p.corrections[0] = random_rule(all);

  // P_N(s) = P_0(s) * prod_j s_j P_j(s), tabulated over the whole syndrome.
  CorrectionRule last;
  last.table_nodes = all;
  const std::uint64_t count = syndrome_count(n);
  last.table.resize(count);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const Syndrome s = syndrome_from_index(idx, n);
    PauliLabel v = p.corrections[0].evaluate(s);
    for (int j = 1; j < n; ++j) v = v * s[j - 1] * p.corrections[j].evaluate(s);
    last.table[idx] = v;
  }
  p.corrections[n] = last;
  return p;
}

ProtocolReport validate_protocol(const SwapAndCorrectProtocol& p) {
  ProtocolReport rep;
  const int n = p.n_links;
  std::ostringstream msg;
  if (n < 2) {
    rep.physical = false;
    rep.message = "protocol needs at least 2 links";
    return rep;
  }
  if (static_cast<int>(p.corrections.size()) != n + 1) {
    rep.physical = false;
    rep.message = "protocol needs N+1 correction rules";
    return rep;
  }
  std::vector<int> order = p.bsm_order;
  std::vector<int> expect(static_cast<std::size_t>(n - 1));
  std::iota(expect.begin(), expect.end(), 1);
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != expect) {
    rep.physical = false;
    rep.message = "bsm_order is not a permutation of 1..N-1";
    return rep;
  }
  for (int k = 0; k <= n; ++k)
    for (int d : p.corrections[k].dependencies())
      if (d < 1 || d > n - 1) {
        rep.physical = false;
        msg << "node " << k << " reads nonexistent node " << d << "; ";
      }
  std::set<int> done;
  for (int node : order) {
    for (int d : p.corrections[node].dependencies())
      if (!done.count(d)) {
        rep.physical = false;
        msg << "node " << node << " reads outcome of node " << d
            << " before that BSM has happened; ";
      }
    done.insert(node);
  }
  if (!rep.physical) {
    rep.message = msg.str();
    return rep;
  }

  if (n <= kMaxExactLinks) {
    const std::uint64_t count = syndrome_count(n);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      const Syndrome s = syndrome_from_index(idx, n);
      PauliLabel v = p.corrections[0].evaluate(s) * p.corrections[n].evaluate(s);
      for (int j = 1; j < n; ++j) v = v * s[j - 1] * p.corrections[j].evaluate(s);
      if (!v.is_identity()) {
        rep.correct = false;
        if (rep.failing.size() < 4) rep.failing.push_back(s);
      }
    }
    if (!rep.correct)
      msg << "product condition fails, first failing syndrome "
          << syndrome_string(rep.failing.front()) << "; ";
  } else {
    msg << "product condition not enumerated for N > " << kMaxExactLinks << "; ";
  }

  if (n <= 4) {
    rep.brute_force_checked = true;
    const DensityOperator perfect = DensityOperator::from_pure(bell_state(0, 0), default_pair());
    const std::vector<DensityOperator> links(static_cast<std::size_t>(n), perfect);
    const ComplexMatrix joint = joint_state(links);
    const std::uint64_t count = syndrome_count(n);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      const Syndrome s = syndrome_from_index(idx, n);
      const ChainOutcome o = run_on_joint(joint, p, s, false);
      if (!o.state || std::abs(o.fidelity - 1.0) > 1e-10) {
        rep.brute_force_ok = false;
        if (rep.correct && rep.failing.size() < 4) rep.failing.push_back(s);
      }
    }
    if (!rep.brute_force_ok) msg << "perfect links are not mapped to Psi00 for every syndrome; ";
  }
  rep.message = rep.valid() ? "valid" : msg.str();
  return rep;
}

// ------------------------------------------------------------ brute force

ChainOutcome run_chain_postselected(const std::vector<DensityOperator>& links,
                                    const SwapAndCorrectProtocol& p, const Syndrome& s,
                                    bool literal) {
  check_links(links, p);
  return run_on_joint(joint_state(links), p, s, literal);
}

DensityOperator run_chain_nonpostselected(const std::vector<DensityOperator>& links,
                                          const SwapAndCorrectProtocol& p) {
  check_links(links, p);
  const ComplexMatrix joint = joint_state(links);
  ComplexMatrix sum(4);
  const std::uint64_t count = syndrome_count(p.n_links);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const ChainOutcome o = run_on_joint(joint, p, syndrome_from_index(idx, p.n_links), false);
    if (o.state) sum += cplx(o.probability) * o.state->matrix();
  }
  return DensityOperator(std::move(sum), RegisterSet{"L1", "R" + std::to_string(p.n_links)});
}

// ---------------------------------------------------------- Bell diagonal

BellDiagonalCoeffs bd_chain(const std::vector<BellDiagonalCoeffs>& coeffs) {
  if (coeffs.empty()) throw DomainError("bd_chain: need at least one link");
  BellDiagonalCoeffs acc = coeffs.front();
  for (std::size_t k = 1; k < coeffs.size(); ++k) acc = bd_swap(acc, coeffs[k]);
  return acc;
}

std::pair<double, double> chain_fidelity_bounds(const std::vector<double>& F) {
  double lo = 1.0, hi = 1.0;
  for (double f : F) {
    if (f < 0.0 || f > 1.0) throw DomainError("chain_fidelity_bounds: fidelity outside [0,1]");
    lo *= f;
    hi *= 2.0 * f - 1.0;
  }
  return {lo, 0.5 * hi + 0.5};
}

double werner_chain_fidelity(const std::vector<double>& F) {
  double w = 1.0;
  for (double f : F) w *= (4.0 * f - 1.0) / 3.0;
  return 0.75 * w + 0.25;
}

// ---------------------------------------------------- outcome distribution

double OutcomeDistribution::total_probability() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.probability;
  return s;
}

DensityOperator OutcomeDistribution::average() const {
  if (entries.empty()) throw DomainError("outcome distribution is empty");
  ComplexMatrix sum(4);
  for (const auto& e : entries) sum += cplx(e.probability) * e.state.matrix();
  return DensityOperator(std::move(sum), entries.front().state.registers());
}

OutcomeDistribution outcome_distribution(const DensityOperator& link, int n,
                                         const SwapAndCorrectProtocol& p, bool merge) {
  if (n < 2) throw DomainError("outcome_distribution: need at least 2 links");
  if (p.n_links != n) throw DimensionError("outcome_distribution: protocol length mismatch");
  if (link.num_qubits() != 2) throw DimensionError("outcome_distribution: link must be 2 qubits");
  if (!merge && n > kMaxExactLinks)
    throw UnsupportedError("outcome_distribution: exact enumeration supports n <= " +
                           std::to_string(kMaxExactLinks) +
                           "; use the merged recursion (merge = true) beyond that");
  if (!p.builtin) {
    if (n > kMaxBruteForceLinks)
      throw UnsupportedError(
          "outcome_distribution: custom protocols are enumerated by brute force, n <= 5");
    return outcome_distribution(std::vector<DensityOperator>(static_cast<std::size_t>(n), link), p);
  }
  // Both built-in protocols yield the same multiset of (probability, state):
  // a Pauli correction applied before a BSM only relabels its outcome.  The
  // sequential form is the one that factorises into pairwise swaps.
  const RegisterSet out_regs{"L1", "R" + std::to_string(n)};
  Accumulator cur;
  cur.add(link.relabeled(out_regs), 1.0, 1, merge);
  std::uint64_t zero = 0;
  for (int k = 2; k <= n; ++k) {
    Accumulator next;
    for (const auto& e : cur.dist.entries) {
      for (int o = 0; o < 4; ++o) {
        const SwapOutcome so = postselected_swap(e.state, link, PauliLabel::from_index(o));
        const double prob = e.probability * so.probability;
        if (!so.state || prob < kZeroProbability) {
          zero += e.syndromes * (std::uint64_t{1} << (2 * (n - k)));
          continue;
        }
        next.add(so.state->relabeled(out_regs), prob, e.syndromes, merge);
      }
    }
    cur = std::move(next);
  }
  cur.dist.zero_probability_syndromes = zero;
  return cur.dist;
}

OutcomeDistribution outcome_distribution(const std::vector<DensityOperator>& links,
                                         const SwapAndCorrectProtocol& p) {
  if (links.size() > static_cast<std::size_t>(kMaxBruteForceLinks))
    throw UnsupportedError("outcome_distribution: distinct links are supported up to n = 5");
  check_links(links, p);
  const ComplexMatrix joint = joint_state(links);
  Accumulator acc;
  const std::uint64_t count = syndrome_count(p.n_links);
  std::uint64_t zero = 0;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const ChainOutcome o = run_on_joint(joint, p, syndrome_from_index(idx, p.n_links), false);
    if (!o.state) {
      ++zero;
      continue;
    }
    acc.add(*o.state, o.probability, 1, true);
  }
  acc.dist.zero_probability_syndromes = zero;
  return acc.dist;
}

}  // namespace qrep
