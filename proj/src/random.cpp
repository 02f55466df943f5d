#include "qrep/random.hpp"

#include <cmath>

namespace qrep {

StateVector random_pure_state(std::size_t dim, Rng& rng) {
  StateVector v(dim);
  double n2 = 0.0;
  for (auto& z : v) {
    z = cplx(rng.normal(), rng.normal());
    n2 += std::norm(z);
  }
  const double s = 1.0 / std::sqrt(n2);
  for (auto& z : v) z *= s;
  return v;
}

DensityOperator random_density(Rng& rng, std::size_t nqubits) {
  const StateVector psi = random_pure_state(std::size_t{1} << (2 * nqubits), rng);
  std::vector<std::size_t> drop;
  for (std::size_t q = nqubits; q < 2 * nqubits; ++q) drop.push_back(q);
  ComplexMatrix m = partial_trace(ComplexMatrix::projector(psi), 2 * nqubits, drop);
  // remove round-off asymmetry
  ComplexMatrix h = m + m.adjoint();
  h *= 1.0 / h.trace().real();
  std::vector<std::string> labels;
  for (std::size_t q = 0; q < nqubits; ++q) labels.push_back(nqubits == 2 ? (q ? "B" : "A") : "q" + std::to_string(q));
  return DensityOperator(std::move(h), RegisterSet(labels));
}

BellDiagonalCoeffs random_bd(Rng& rng) {
  BellDiagonalCoeffs c;
  double s = 0.0;
  for (auto& l : c.lambda) {
    l = -std::log(1.0 - rng.uniform());
    s += l;
  }
  for (auto& l : c.lambda) l /= s;
  return c;
}

ComplexMatrix random_matrix(std::size_t dim, Rng& rng) {
  ComplexMatrix m(dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = cplx(rng.normal(), rng.normal());
  return m;
}

ComplexMatrix random_hermitian(std::size_t dim, Rng& rng) {
  ComplexMatrix g = random_matrix(dim, rng);
  ComplexMatrix h = g + g.adjoint();
  h *= 0.5;
  return h;
}

ComplexMatrix random_unitary(std::size_t dim, Rng& rng) {
  // Gram-Schmidt on the columns of a Ginibre matrix gives a Haar unitary.
  ComplexMatrix g = random_matrix(dim, rng);
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t k = 0; k < c; ++k) {
      cplx d = 0.0;
      for (std::size_t r = 0; r < dim; ++r) d += std::conj(g(r, k)) * g(r, c);
      for (std::size_t r = 0; r < dim; ++r) g(r, c) -= d * g(r, k);
    }
    double n2 = 0.0;
    for (std::size_t r = 0; r < dim; ++r) n2 += std::norm(g(r, c));
    const double s = 1.0 / std::sqrt(n2);
    for (std::size_t r = 0; r < dim; ++r) g(r, c) *= s;
  }
  return g;
}

DensityOperator random_with_fidelity(double F, Rng& rng) {
  // Mix a random state with either |Psi00> or a random state supported on
  // the orthogonal complement so that the Psi00 overlap hits F exactly.
  const StateVector b = bell_state(0, 0);
  const ComplexMatrix P = ComplexMatrix::projector(b);
  const ComplexMatrix Q = ComplexMatrix::identity(4) - P;
  const DensityOperator base = random_density(rng);
  const double f0 = std::real(inner(b, base.matrix() * b));
  ComplexMatrix target;
  double t;
  if (f0 >= F) {
    const DensityOperator r = random_density(rng);
    ComplexMatrix perp = Q * r.matrix() * Q;
    perp *= 1.0 / perp.trace().real();
    t = (f0 - F) / f0;  // weight on perp: (1-t) f0 = F
    target = cplx(1.0 - t) * base.matrix() + cplx(t) * perp;
  } else {
    t = (F - f0) / (1.0 - f0);  // weight on Psi00: t + (1-t) f0 = F
    target = cplx(1.0 - t) * base.matrix() + cplx(t) * P;
  }
  ComplexMatrix h = target + target.adjoint();
  h *= 0.5;
  return DensityOperator(std::move(h), default_pair());
}

}  // namespace qrep
