#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "qrep/errors.hpp"

namespace qrep {

using cplx = std::complex<double>;
using StateVector = std::vector<cplx>;

// Square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  ComplexMatrix(std::size_t dim, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix projector(const StateVector& psi);
  static ComplexMatrix diagonal(const std::vector<double>& d);

  std::size_t dim() const { return dim_; }
  cplx& operator()(std::size_t r, std::size_t c) { return a_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * dim_ + c]; }
  const std::vector<cplx>& entries() const { return a_; }
  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  cplx trace() const;
  double max_abs() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> a_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
StateVector operator*(const ComplexMatrix& a, const StateVector& v);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
StateVector kron(const StateVector& a, const StateVector& b);
cplx inner(const StateVector& a, const StateVector& b);  // <a|b>
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10);
bool is_unitary(const ComplexMatrix& m, double tol = 1e-10);

// Eigenvalues of a Hermitian matrix in ascending order (Householder
// tridiagonalisation followed by implicit QL).
std::vector<double> eigenvalues_hermitian(const ComplexMatrix& m);
// Same for a real symmetric row-major n x n matrix.
std::vector<double> eigenvalues_symmetric(const std::vector<double>& a, std::size_t n);
double min_eigenvalue(const ComplexMatrix& m);

// Pauli X^i Z^j; index k = 2i + j.  Global phases are dropped.
struct PauliLabel {
  int i = 0;
  int j = 0;

  int index() const { return 2 * i + j; }
  static PauliLabel from_index(int k);
  PauliLabel operator*(PauliLabel o) const { return {i ^ o.i, j ^ o.j}; }
  bool operator==(const PauliLabel& o) const { return i == o.i && j == o.j; }
  bool operator!=(const PauliLabel& o) const { return !(*this == o); }
  bool is_identity() const { return i == 0 && j == 0; }
  ComplexMatrix matrix() const;  // X^i Z^j
  std::string name() const;      // I, Z, X, XZ
};

const ComplexMatrix& pauli_i();
const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();

// Ordered, duplicate-free list of qubit labels.  The first label is the most
// significant qubit of the tensor index.
class RegisterSet {
 public:
  RegisterSet() = default;
  RegisterSet(std::vector<std::string> labels);
  RegisterSet(std::initializer_list<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& operator[](std::size_t k) const { return labels_[k]; }
  bool contains(const std::string& label) const;
  std::size_t index_of(const std::string& label) const;
  RegisterSet concat(const RegisterSet& other) const;
  bool operator==(const RegisterSet& o) const { return labels_ == o.labels_; }
  std::string to_string() const;

 private:
  std::vector<std::string> labels_;
};

// Hermitian, unit-trace, positive semidefinite matrix over labeled qubits.
class DensityOperator {
 public:
  DensityOperator() = default;
  // Hermiticity and trace are always checked; positivity is checked for
  // dims up to 64 unless check_psd is false.
  DensityOperator(ComplexMatrix m, RegisterSet regs, bool check_psd = true);

  static DensityOperator from_pure(const StateVector& psi, RegisterSet regs);

  const ComplexMatrix& matrix() const { return m_; }
  const RegisterSet& registers() const { return regs_; }
  std::size_t dim() const { return m_.dim(); }
  std::size_t num_qubits() const { return regs_.size(); }
  DensityOperator relabeled(RegisterSet regs) const;

  // Full check including the eigenvalue test; throws ValidationError.
  void validate() const;

 private:
  ComplexMatrix m_;
  RegisterSet regs_;
};

StateVector bell_state(int i, int j);
StateVector bell_state(PauliLabel l);

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
DensityOperator partial_trace(const DensityOperator& rho, const RegisterSet& drop);
ComplexMatrix partial_transpose(const DensityOperator& rho, const RegisterSet& regs);
DensityOperator apply_local(const DensityOperator& rho, const ComplexMatrix& u,
                            const std::string& reg);
double fidelity_to_pure(const DensityOperator& rho, const StateVector& psi);

// Positional helpers working on raw matrices over n qubits.  Qubit 0 is the
// most significant bit of the index.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t nqubits,
                            const std::vector<std::size_t>& drop);
ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t nqubits,
                                const std::vector<std::size_t>& qubits);
// (op on `qubits`) * m
ComplexMatrix apply_left(const ComplexMatrix& m, std::size_t nqubits,
                         const ComplexMatrix& op, const std::vector<std::size_t>& qubits);
// op m op^dagger
ComplexMatrix conjugate(const ComplexMatrix& m, std::size_t nqubits, const ComplexMatrix& op,
                        const std::vector<std::size_t>& qubits);
// op acting on `qubits`, identity elsewhere, as a full 2^n matrix.
ComplexMatrix embed(const ComplexMatrix& op, std::size_t nqubits,
                    const std::vector<std::size_t>& qubits);
// (<psi| (x) I) m (|psi> (x) I), psi living on `qubits`; the result acts on
// the remaining qubits in their original order.
ComplexMatrix contract_pure(const ComplexMatrix& m, std::size_t nqubits, const StateVector& psi,
                            const std::vector<std::size_t>& qubits);

// Clamp a value that should lie in [0,1]; deviations above `slack` throw.
double clamp_unit(double v, const char* what, double slack = 1e-9);

}  // namespace qrep
