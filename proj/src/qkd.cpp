#include "qrep/qkd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qrep/chain.hpp"
#include "qrep/errors.hpp"

namespace qrep {

namespace {

double correlator(const ComplexMatrix& m, const ComplexMatrix& pauli) {
  return (kron(pauli, pauli) * m).trace().real();
}

std::pair<double, double> pair_rates(const QberTriple& q, BasisPair b) {
  switch (b) {
    case BasisPair::XZ: return {q.qx, q.qz};
    case BasisPair::XY: return {q.qx, q.qy};
    case BasisPair::YZ: return {q.qy, q.qz};
  }
  return {0.0, 0.0};
}

// Values closer than this count as a tie in the basis-pair selection.
constexpr double kTieTolerance = 1e-12;

// Clamp round-off so that h never sees values just outside [0,1].
double unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

QberTriple qber(const DensityOperator& sigma) {
  if (sigma.num_qubits() != 2) throw DimensionError("qber: expects a two-qubit state");
  const ComplexMatrix& m = sigma.matrix();
  return {unit(0.5 * (1.0 - correlator(m, pauli_x()))), unit(0.5 * (1.0 + correlator(m, pauli_y()))),
          unit(0.5 * (1.0 - correlator(m, pauli_z())))};
}

QberTriple qber(const BellDiagonalCoeffs& c) {
  return {unit(c[1] + c[3]), unit(c[2] + c[1]), unit(c[2] + c[3])};
}

double binary_entropy(double x) {
  if (x < -1e-12 || x > 1.0 + 1e-12) throw DomainError("binary_entropy: argument outside [0,1]");
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

std::string to_string(BasisPair b) {
  switch (b) {
    case BasisPair::XZ: return "XZ";
    case BasisPair::XY: return "XY";
    case BasisPair::YZ: return "YZ";
  }
  return "?";
}

const std::array<BasisPair, 3>& all_basis_pairs() {
  static const std::array<BasisPair, 3> pairs = {BasisPair::XZ, BasisPair::XY, BasisPair::YZ};
  return pairs;
}

double skf(const QberTriple& q, BasisPair b) {
  const auto [a, c] = pair_rates(q, b);
  return std::max(0.0, 1.0 - binary_entropy(a) - binary_entropy(c));
}

double skf(const DensityOperator& sigma, BasisPair b) { return skf(qber(sigma), b); }

BasisChoice best_basis_skf(const QberTriple& q) {
  BasisChoice best{BasisPair::XZ, -1.0};
  for (BasisPair b : all_basis_pairs()) {
    const double v = skf(q, b);
    if (v > best.value + kTieTolerance) best = {b, v};  // earlier pairs win ties
  }
  return best;
}

BasisChoice best_basis_skf(const DensityOperator& sigma) { return best_basis_skf(qber(sigma)); }

std::string to_string(SkfMode m) {
  switch (m) {
    case SkfMode::postselected: return "postselected";
    case SkfMode::nonpostselected: return "nonpostselected";
    case SkfMode::bd_approx: return "bd_approx";
    case SkfMode::werner_approx: return "werner_approx";
  }
  return "?";
}

ChainSkf chain_skf_detail(const DensityOperator& link, int n, SkfMode mode) {
  if (n < 2) throw DomainError("chain_skf: need n >= 2 links");
  if (link.num_qubits() != 2) throw DimensionError("chain_skf: link must be a two-qubit state");
  ChainSkf out;
  auto finish = [&](const QberTriple& q) {
    for (std::size_t k = 0; k < 3; ++k) out.per_pair[k] = skf(q, all_basis_pairs()[k]);
  };
  switch (mode) {
    case SkfMode::postselected:
    case SkfMode::nonpostselected: {
      const SwapAndCorrectProtocol proto = builtin_protocol(BuiltinProtocol::correct_at_end, n);
      const OutcomeDistribution dist = outcome_distribution(link, n, proto, true);
      if (mode == SkfMode::nonpostselected) {
        finish(qber(dist.average()));
      } else {
        for (const auto& e : dist.entries) {
          const QberTriple q = qber(e.state);
          for (std::size_t k = 0; k < 3; ++k) out.per_pair[k] += e.probability * skf(q, all_basis_pairs()[k]);
        }
      }
      break;
    }
    case SkfMode::bd_approx: {
      const BellDiagonalCoeffs c = bd_twirl(link);
      finish(qber(bd_chain(std::vector<BellDiagonalCoeffs>(static_cast<std::size_t>(n), c))));
      break;
    }
    case SkfMode::werner_approx: {
      const double F = fidelity_to_pure(link, bell_state(0, 0));
      const double Fw = werner_chain_fidelity(std::vector<double>(static_cast<std::size_t>(n), F));
      const double q = 2.0 * (1.0 - Fw) / 3.0;
      finish({unit(q), unit(q), unit(q)});
      break;
    }
  }
  out.best = {BasisPair::XZ, out.per_pair[0]};
  for (std::size_t k = 1; k < 3; ++k)
    if (out.per_pair[k] > out.best.value + kTieTolerance) out.best = {all_basis_pairs()[k], out.per_pair[k]};
  return out;
}

double chain_skf(const DensityOperator& link, int n, SkfMode mode) {
  return chain_skf_detail(link, n, mode).best.value;
}

double opt_chain_skf_closed_form(double F, int n) {
  return std::max(0.0, 1.0 - binary_entropy(0.5 - 0.5 * std::pow(2.0 * F - 1.0, n)));
}

double werner_chain_skf_closed_form(double F, int n) {
  const double w = (4.0 * F - 1.0) / 3.0;
  return std::max(0.0, 1.0 - 2.0 * binary_entropy(0.5 - 0.5 * std::pow(w, n)));
}

std::vector<QkdRow> qkd_sweep(const DensityOperator& link, int n_min, int n_max) {
  if (n_min < 2 || n_max < n_min) throw DomainError("qkd_sweep: need 2 <= n_min <= n_max");
  std::vector<QkdRow> rows;
  for (int n = n_min; n <= n_max; ++n) {
    QkdRow r;
    r.n = n;
    r.skf_postselected = chain_skf(link, n, SkfMode::postselected);
    r.skf_bd = chain_skf(link, n, SkfMode::bd_approx);
    r.skf_werner = chain_skf(link, n, SkfMode::werner_approx);
    rows.push_back(r);
  }
  return rows;
}

std::string qkd_csv_header() { return "n,skf_postselected,skf_bd,skf_werner"; }

std::string qkd_csv_line(const QkdRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g", r.n, r.skf_postselected, r.skf_bd, r.skf_werner);
  return buf;
}

}  // namespace qrep
