#include "qrep/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qrep {

// ---------------------------------------------------------------- matrices

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, cplx(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<cplx> entries)
    : dim_(dim), a_(std::move(entries)) {
  if (a_.size() != dim_ * dim_)
    throw DimensionError("ComplexMatrix: entry count does not equal dim^2");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t k = 0; k < dim; ++k) m(k, k) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::projector(const StateVector& psi) {
  ComplexMatrix m(psi.size());
  for (std::size_t r = 0; r < psi.size(); ++r)
    for (std::size_t c = 0; c < psi.size(); ++c) m(r, c) = psi[r] * std::conj(psi[c]);
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<double>& d) {
  ComplexMatrix m(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) m(k, k) = d[k];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) m(c, r) = std::conj((*this)(r, c));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) m(c, r) = (*this)(r, c);
  return m;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) t += (*this)(k, k);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : a_) m = std::max(m, std::abs(z));
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw DimensionError("matrix sum: dimension mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw DimensionError("matrix difference: dimension mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : a_) z *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.dim();
  if (b.dim() != n) throw DimensionError("matrix product: dimension mismatch");
  ComplexMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      const cplx* brow = b.data() + k * n;
      cplx* crow = c.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  return c;
}

StateVector operator*(const ComplexMatrix& a, const StateVector& v) {
  if (v.size() != a.dim()) throw DimensionError("matrix-vector product: dimension mismatch");
  StateVector out(v.size(), 0.0);
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) out[r] += a(r, c) * v[c];
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix m(na * nb);
  for (std::size_t r1 = 0; r1 < na; ++r1)
    for (std::size_t c1 = 0; c1 < na; ++c1) {
      const cplx x = a(r1, c1);
      if (x == cplx(0.0, 0.0)) continue;
      for (std::size_t r2 = 0; r2 < nb; ++r2)
        for (std::size_t c2 = 0; c2 < nb; ++c2) m(r1 * nb + r2, c1 * nb + c2) = x * b(r2, c2);
    }
  return m;
}

StateVector kron(const StateVector& a, const StateVector& b) {
  StateVector v(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) v[i * b.size() + j] = a[i] * b[j];
  return v;
}

cplx inner(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) throw DimensionError("inner product: dimension mismatch");
  cplx s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k)
    m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
  return m;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = r; c < m.dim(); ++c)
      if (std::abs(m(r, c) - std::conj(m(c, r))) > tol) return false;
  return true;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  return max_abs_diff(m.adjoint() * m, ComplexMatrix::identity(m.dim())) <= tol;
}

// ------------------------------------------------------------- eigenvalues

namespace {

double conj_if(double x) { return x; }
cplx conj_if(cplx x) { return std::conj(x); }
double abs2(double x) { return x * x; }
double abs2(cplx x) { return std::norm(x); }

// Implicit QL on a symmetric tridiagonal matrix; e[k] couples k and k+1.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (++iter > 200) throw Error("eigensolver: QL iteration did not converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool early = false;
      for (std::size_t ii = m; ii-- > l;) {
        const double f = s * e[ii];
        const double b = c * e[ii];
        r = std::hypot(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          d[ii + 1] -= p;
          e[m] = 0.0;
          early = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[ii + 1] - p;
        r = (d[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        d[ii + 1] = g + p;
        g = c * r - b;
      }
      if (early) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (true);
  }
  std::sort(d.begin(), d.end());
}

// Householder reduction of a Hermitian (or real symmetric) matrix to real
// symmetric tridiagonal form; returns eigenvalues.
template <typename T>
std::vector<double> hermitian_eigs(std::vector<T> a, std::size_t n) {
  auto A = [&](std::size_t r, std::size_t c) -> T& { return a[r * n + c]; };
  std::vector<T> v(n), p(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm2 = 0.0;
    for (std::size_t r = k + 1; r < n; ++r) xnorm2 += abs2(A(r, k));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) continue;
    const T x0 = A(k + 1, k);
    const double ax0 = std::abs(x0);
    const T phase = ax0 > 0.0 ? x0 / ax0 : T(1.0);
    // v = x + phase*|x| e1, H = I - 2 v v^dagger / |v|^2
    std::fill(v.begin(), v.end(), T(0.0));
    for (std::size_t r = k + 1; r < n; ++r) v[r] = A(r, k);
    v[k + 1] += phase * xnorm;
    double vnorm2 = 0.0;
    for (std::size_t r = k + 1; r < n; ++r) vnorm2 += abs2(v[r]);
    if (vnorm2 == 0.0) continue;
    const double inv = 1.0 / std::sqrt(vnorm2);
    for (std::size_t r = k + 1; r < n; ++r) v[r] *= inv;
    // p = A v over the active block (rows/cols k..n-1)
    for (std::size_t r = k; r < n; ++r) {
      T s = 0.0;
      for (std::size_t c = k + 1; c < n; ++c) s += A(r, c) * v[c];
      p[r] = s;
    }
    T K = 0.0;
    for (std::size_t r = k + 1; r < n; ++r) K += conj_if(v[r]) * p[r];
    const double Kr = std::real(K);
    // w = p - K v ; A <- A - 2 v w^dagger - 2 w v^dagger
    for (std::size_t r = k; r < n; ++r) p[r] -= Kr * v[r];
    for (std::size_t r = k; r < n; ++r)
      for (std::size_t c = k; c < n; ++c)
        A(r, c) -= 2.0 * (v[r] * conj_if(p[c]) + p[r] * conj_if(v[c]));
  }
  std::vector<double> d(n), e(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) d[k] = std::real(A(k, k));
  for (std::size_t k = 0; k + 1 < n; ++k) e[k] = std::abs(A(k + 1, k));
  tridiagonal_ql(d, e);
  return d;
}

}  // namespace

std::vector<double> eigenvalues_hermitian(const ComplexMatrix& m) {
  if (!is_hermitian(m, 1e-10 * std::max(1.0, m.max_abs())))
    throw ValidationError("eigenvalues_hermitian: matrix is not Hermitian");
  return hermitian_eigs(m.entries(), m.dim());
}

std::vector<double> eigenvalues_symmetric(const std::vector<double>& a, std::size_t n) {
  if (a.size() != n * n) throw DimensionError("eigenvalues_symmetric: size mismatch");
  return hermitian_eigs(a, n);
}

double min_eigenvalue(const ComplexMatrix& m) {
  if (m.dim() == 0) throw DimensionError("min_eigenvalue: empty matrix");
  return eigenvalues_hermitian(m).front();
}

// ------------------------------------------------------------------ Paulis

PauliLabel PauliLabel::from_index(int k) {
  if (k < 0 || k > 3) throw ValidationError("PauliLabel index must be in 0..3");
  return {k >> 1, k & 1};
}

ComplexMatrix PauliLabel::matrix() const {
  ComplexMatrix m = ComplexMatrix::identity(2);
  if (j) m = pauli_z();
  if (i) m = pauli_x() * m;
  return m;
}

std::string PauliLabel::name() const {
  static const char* names[4] = {"I", "Z", "X", "XZ"};
  return names[index()];
}

const ComplexMatrix& pauli_i() {
  static const ComplexMatrix m = ComplexMatrix::identity(2);
  return m;
}
const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m(2, {0.0, 1.0, 1.0, 0.0});
  return m;
}
const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m(2, {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0});
  return m;
}
const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m(2, {1.0, 0.0, 0.0, -1.0});
  return m;
}

// --------------------------------------------------------------- registers

RegisterSet::RegisterSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (std::size_t a = 0; a < labels_.size(); ++a)
    for (std::size_t b = a + 1; b < labels_.size(); ++b)
      if (labels_[a] == labels_[b])
        throw RegisterError("register collision: label '" + labels_[a] + "' repeated");
}

RegisterSet::RegisterSet(std::initializer_list<std::string> labels)
    : RegisterSet(std::vector<std::string>(labels)) {}

bool RegisterSet::contains(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t RegisterSet::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw RegisterError("unknown register label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

RegisterSet RegisterSet::concat(const RegisterSet& other) const {
  std::vector<std::string> all = labels_;
  all.insert(all.end(), other.labels_.begin(), other.labels_.end());
  return RegisterSet(std::move(all));
}

std::string RegisterSet::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < labels_.size(); ++k) os << (k ? "," : "") << labels_[k];
  os << ")";
  return os.str();
}

// ---------------------------------------------------------- density states

namespace {

void check_structure(const ComplexMatrix& m, const RegisterSet& regs) {
  if (m.dim() != (std::size_t{1} << regs.size()))
    throw DimensionError("density operator: dim " + std::to_string(m.dim()) +
                         " does not match " + std::to_string(regs.size()) + " registers");
  if (!is_hermitian(m, 1e-10)) throw ValidationError("density operator: not Hermitian");
  const cplx t = m.trace();
  if (std::abs(t - 1.0) > 1e-10)
    throw ValidationError("density operator: trace " + std::to_string(t.real()) + " != 1");
}

void check_psd(const ComplexMatrix& m) {
  const double lmin = min_eigenvalue(m);
  if (lmin < -1e-9)
    throw ValidationError("density operator: negative eigenvalue " + std::to_string(lmin));
}

}  // namespace

DensityOperator::DensityOperator(ComplexMatrix m, RegisterSet regs, bool check)
    : m_(std::move(m)), regs_(std::move(regs)) {
  check_structure(m_, regs_);
  if (check && m_.dim() <= 64) check_psd(m_);
}

DensityOperator DensityOperator::from_pure(const StateVector& psi, RegisterSet regs) {
  const double n2 = std::real(inner(psi, psi));
  if (std::abs(n2 - 1.0) > 1e-10) throw ValidationError("pure state is not normalised");
  return DensityOperator(ComplexMatrix::projector(psi), std::move(regs), false);
}

DensityOperator DensityOperator::relabeled(RegisterSet regs) const {
  if (regs.size() != regs_.size()) throw DimensionError("relabel: register count mismatch");
  DensityOperator d;
  d.m_ = m_;
  d.regs_ = std::move(regs);
  return d;
}

void DensityOperator::validate() const {
  check_structure(m_, regs_);
  check_psd(m_);
}

StateVector bell_state(int i, int j) {
  if ((i != 0 && i != 1) || (j != 0 && j != 1))
    throw ValidationError("bell_state: labels must be bits");
  const double s = 1.0 / std::sqrt(2.0);
  // (I (x) X^i Z^j)(|00> + |11>)/sqrt2 ; Z^j gives the |11> term a sign (-1)^j,
  // X^i flips the second bit.
  StateVector v(4, 0.0);
  v[0 * 2 + (0 ^ i)] += s;
  v[1 * 2 + (1 ^ i)] += (j ? -s : s);
  return v;
}

StateVector bell_state(PauliLabel l) { return bell_state(l.i, l.j); }

// ------------------------------------------------------ positional helpers

namespace {

std::size_t scatter(std::size_t local, const std::vector<std::size_t>& qubits, std::size_t n) {
  const std::size_t k = qubits.size();
  std::size_t full = 0;
  for (std::size_t t = 0; t < k; ++t)
    if ((local >> (k - 1 - t)) & 1u) full |= std::size_t{1} << (n - 1 - qubits[t]);
  return full;
}

std::vector<std::size_t> complement(const std::vector<std::size_t>& qubits, std::size_t n) {
  std::vector<bool> used(n, false);
  for (auto q : qubits) {
    if (q >= n) throw RegisterError("qubit position out of range");
    if (used[q]) throw RegisterError("qubit position repeated");
    used[q] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t q = 0; q < n; ++q)
    if (!used[q]) rest.push_back(q);
  return rest;
}

std::vector<std::size_t> offsets(const std::vector<std::size_t>& qubits, std::size_t n) {
  std::vector<std::size_t> off(std::size_t{1} << qubits.size());
  for (std::size_t l = 0; l < off.size(); ++l) off[l] = scatter(l, qubits, n);
  return off;
}

void check_dim(const ComplexMatrix& m, std::size_t nqubits) {
  if (m.dim() != (std::size_t{1} << nqubits)) throw DimensionError("matrix dim != 2^nqubits");
}

std::vector<std::size_t> positions_of(const RegisterSet& regs, const RegisterSet& sub) {
  std::vector<std::size_t> pos;
  for (const auto& l : sub.labels()) pos.push_back(regs.index_of(l));
  return pos;
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t n,
                            const std::vector<std::size_t>& drop) {
  check_dim(m, n);
  const auto keep = complement(drop, n);
  const auto ko = offsets(keep, n);
  const auto dof = offsets(drop, n);
  ComplexMatrix out(ko.size());
  for (std::size_t a = 0; a < ko.size(); ++a)
    for (std::size_t b = 0; b < ko.size(); ++b) {
      cplx s = 0.0;
      for (auto d : dof) s += m(ko[a] | d, ko[b] | d);
      out(a, b) = s;
    }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t n,
                                const std::vector<std::size_t>& qubits) {
  check_dim(m, n);
  complement(qubits, n);  // range / duplicate check
  std::size_t mask = 0;
  for (auto q : qubits) mask |= std::size_t{1} << (n - 1 - q);
  const std::size_t dim = m.dim();
  ComplexMatrix out(dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      const std::size_t r2 = (r & ~mask) | (c & mask);
      const std::size_t c2 = (c & ~mask) | (r & mask);
      out(r2, c2) = m(r, c);
    }
  return out;
}

ComplexMatrix apply_left(const ComplexMatrix& m, std::size_t n, const ComplexMatrix& op,
                         const std::vector<std::size_t>& qubits) {
  check_dim(m, n);
  if (op.dim() != (std::size_t{1} << qubits.size()))
    throw DimensionError("apply_left: operator size does not match qubit count");
  const auto rest = complement(qubits, n);
  const auto qo = offsets(qubits, n);
  const auto ro = offsets(rest, n);
  const std::size_t k = qo.size(), dim = m.dim();
  ComplexMatrix out(dim);
  std::vector<cplx> buf(k);
  for (auto base : ro)
    for (std::size_t c = 0; c < dim; ++c) {
      for (std::size_t l = 0; l < k; ++l) buf[l] = m(base | qo[l], c);
      for (std::size_t l2 = 0; l2 < k; ++l2) {
        cplx s = 0.0;
        for (std::size_t l = 0; l < k; ++l) s += op(l2, l) * buf[l];
        out(base | qo[l2], c) = s;
      }
    }
  return out;
}

ComplexMatrix conjugate(const ComplexMatrix& m, std::size_t n, const ComplexMatrix& op,
                        const std::vector<std::size_t>& qubits) {
  ComplexMatrix t = apply_left(m, n, op, qubits);
  const auto rest = complement(qubits, n);
  const auto qo = offsets(qubits, n);
  const auto ro = offsets(rest, n);
  const std::size_t k = qo.size(), dim = m.dim();
  ComplexMatrix out(dim);
  std::vector<cplx> buf(k);
  for (std::size_t r = 0; r < dim; ++r)
    for (auto base : ro) {
      for (std::size_t l = 0; l < k; ++l) buf[l] = t(r, base | qo[l]);
      for (std::size_t l2 = 0; l2 < k; ++l2) {
        cplx s = 0.0;
        for (std::size_t l = 0; l < k; ++l) s += buf[l] * std::conj(op(l2, l));
        out(r, base | qo[l2]) = s;
      }
    }
  return out;
}

ComplexMatrix embed(const ComplexMatrix& op, std::size_t n, const std::vector<std::size_t>& qubits) {
  return apply_left(ComplexMatrix::identity(std::size_t{1} << n), n, op, qubits);
}

ComplexMatrix contract_pure(const ComplexMatrix& m, std::size_t n, const StateVector& psi,
                            const std::vector<std::size_t>& qubits) {
  check_dim(m, n);
  if (psi.size() != (std::size_t{1} << qubits.size()))
    throw DimensionError("contract_pure: vector size does not match qubit count");
  const auto rest = complement(qubits, n);
  const auto qo = offsets(qubits, n);
  const auto ro = offsets(rest, n);
  std::vector<std::size_t> nz;
  for (std::size_t l = 0; l < psi.size(); ++l)
    if (psi[l] != cplx(0.0, 0.0)) nz.push_back(l);
  ComplexMatrix out(ro.size());
  for (std::size_t a = 0; a < ro.size(); ++a)
    for (std::size_t b = 0; b < ro.size(); ++b) {
      cplx s = 0.0;
      for (auto u : nz) {
        const cplx cu = std::conj(psi[u]);
        for (auto v : nz) s += cu * psi[v] * m(ro[a] | qo[u], ro[b] | qo[v]);
      }
      out(a, b) = s;
    }
  return out;
}

// -------------------------------------------------------- labeled wrappers

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  RegisterSet regs = a.registers().concat(b.registers());
  return DensityOperator(kron(a.matrix(), b.matrix()), std::move(regs), false);
}

DensityOperator partial_trace(const DensityOperator& rho, const RegisterSet& drop) {
  const auto pos = positions_of(rho.registers(), drop);
  std::vector<std::string> kept;
  for (const auto& l : rho.registers().labels())
    if (!drop.contains(l)) kept.push_back(l);
  return DensityOperator(partial_trace(rho.matrix(), rho.num_qubits(), pos), RegisterSet(kept),
                         false);
}

ComplexMatrix partial_transpose(const DensityOperator& rho, const RegisterSet& regs) {
  return partial_transpose(rho.matrix(), rho.num_qubits(), positions_of(rho.registers(), regs));
}

DensityOperator apply_local(const DensityOperator& rho, const ComplexMatrix& u,
                            const std::string& reg) {
  if (u.dim() != 2) throw DimensionError("apply_local: expected a 2x2 operator");
  if (!is_unitary(u, 1e-10)) throw ValidationError("apply_local: operator is not unitary");
  const std::size_t q = rho.registers().index_of(reg);
  return DensityOperator(conjugate(rho.matrix(), rho.num_qubits(), u, {q}), rho.registers(),
                         false);
}

double clamp_unit(double v, const char* what, double slack) {
  if (v < -slack || v > 1.0 + slack)
    throw ValidationError(std::string(what) + " outside [0,1]: " + std::to_string(v));
  return std::clamp(v, 0.0, 1.0);
}

double fidelity_to_pure(const DensityOperator& rho, const StateVector& psi) {
  if (psi.size() != rho.dim()) throw DimensionError("fidelity_to_pure: dimension mismatch");
  const cplx f = inner(psi, rho.matrix() * psi);
  return clamp_unit(f.real(), "fidelity");
}

}  // namespace qrep
