// qstate.hpp
// Exact states and algebra for small qubit registers: the four Bell states,
// the four-qubit Smolin state, depolarizing noise, tensor products, partial
// trace and partial transpose.
//
// Conventions shared by the whole library:
//   - qubits are numbered 1..n
//   - qubit 1 occupies the most significant bit of a computational-basis
//     index, so for n = 2 the basis order is |00>, |01>, |10>, |11>

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qss {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kAlgebraTol = 1e-10;  // tolerance for algebraic identities
inline constexpr double kPsdSlack = 1e-9;     // eigenvalue slack on PSD checks

// --------------------------------------------------------------------------
// Bell labels and their fixed 2-bit encoding:
//   PhiPlus -> 00, PhiMinus -> 01, PsiPlus -> 10, PsiMinus -> 11

enum class BellLabel : int { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

inline constexpr std::array<BellLabel, 4> kBellLabels = {
    BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus};

inline int bell_bits(BellLabel label) { return static_cast<int>(label); }

inline BellLabel bell_from_bits(int bits) {
  if (bits < 0 || bits > 3) {
    throw std::invalid_argument("bell_from_bits: bits must be in [0, 3]");
  }
  return static_cast<BellLabel>(bits);
}

inline const char* to_string(BellLabel label) {
  switch (label) {
    case BellLabel::PhiPlus:  return "PhiPlus";
    case BellLabel::PhiMinus: return "PhiMinus";
    case BellLabel::PsiPlus:  return "PsiPlus";
    case BellLabel::PsiMinus: return "PsiMinus";
  }
  return "?";
}

// --------------------------------------------------------------------------
// Index helpers for the qubit-1-most-significant convention.

// Bit position of `qubit` inside an n-qubit basis index.
inline int qubit_bit_position(int n_qubits, int qubit) { return n_qubits - qubit; }

inline void check_qubit_index(int n_qubits, int qubit, const char* who) {
  if (qubit < 1 || qubit > n_qubits) {
    throw std::invalid_argument(std::string(who) + ": qubit index " +
                                std::to_string(qubit) + " out of range 1.." +
                                std::to_string(n_qubits));
  }
}

// Kronecker product; the left factor holds the more significant qubits.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Smallest eigenvalue of a Hermitian matrix.
inline double min_hermitian_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// --------------------------------------------------------------------------

class DensityMatrix;

// Pure n-qubit state vector with unit norm.
class PureState {
 public:
  PureState(int n_qubits, Vector amplitudes)
      : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    if (n_qubits_ < 1) {
      throw std::invalid_argument("PureState: need at least one qubit");
    }
    if (amps_.size() != (Eigen::Index{1} << n_qubits_)) {
      throw std::invalid_argument("PureState: amplitude vector has wrong length");
    }
    if (std::abs(amps_.squaredNorm() - 1.0) > kAlgebraTol) {
      throw std::invalid_argument("PureState: amplitudes are not normalized");
    }
  }

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }

  Complex inner(const PureState& other) const {
    if (other.n_qubits_ != n_qubits_) {
      throw std::invalid_argument("PureState::inner: qubit count mismatch");
    }
    return amps_.dot(other.amps_);  // Eigen's dot conjugates the left argument
  }

  DensityMatrix density() const;  // |psi><psi|

 private:
  int n_qubits_;
  Vector amps_;
};

// Dense density matrix. The constructor enforces Hermiticity and unit trace;
// positive semidefiniteness is cheap to check but not re-verified on every
// construction (see min_eigenvalue()).
class DensityMatrix {
 public:
  DensityMatrix(int n_qubits, Matrix entries)
      : n_qubits_(n_qubits), m_(std::move(entries)) {
    if (n_qubits_ < 0) {
      throw std::invalid_argument("DensityMatrix: negative qubit count");
    }
    const Eigen::Index d = Eigen::Index{1} << n_qubits_;
    if (m_.rows() != d || m_.cols() != d) {
      throw std::invalid_argument("DensityMatrix: entries must be 2^n x 2^n");
    }
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol) {
      throw std::invalid_argument("DensityMatrix: entries are not Hermitian");
    }
    if (std::abs(m_.trace().real() - 1.0) > kAlgebraTol ||
        std::abs(m_.trace().imag()) > kAlgebraTol) {
      throw std::invalid_argument("DensityMatrix: trace must be 1");
    }
  }

  static DensityMatrix maximally_mixed(int n_qubits) {
    const Eigen::Index d = Eigen::Index{1} << n_qubits;
    return DensityMatrix(n_qubits, Matrix::Identity(d, d) / static_cast<double>(d));
  }

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& entries() const { return m_; }

  double purity() const { return (m_ * m_).trace().real(); }
  double min_eigenvalue() const { return min_hermitian_eigenvalue(m_); }

 private:
  int n_qubits_;
  Matrix m_;
};

inline DensityMatrix PureState::density() const {
  return DensityMatrix(n_qubits_, amps_ * amps_.adjoint());
}

// --------------------------------------------------------------------------
// Named states

inline PureState bell_state(BellLabel label) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  switch (label) {
    case BellLabel::PhiPlus:  v(0b00) = r; v(0b11) = r;  break;
    case BellLabel::PhiMinus: v(0b00) = r; v(0b11) = -r; break;
    case BellLabel::PsiPlus:  v(0b01) = r; v(0b10) = r;  break;
    case BellLabel::PsiMinus: v(0b01) = r; v(0b10) = -r; break;
  }
  return PureState(2, std::move(v));
}

// Equal mixture of the four two-pair Bell products: qubits (1,2) and (3,4)
// always carry the same Bell state.
inline DensityMatrix smolin_state() {
  Matrix m = Matrix::Zero(16, 16);
  for (BellLabel label : kBellLabels) {
    const Matrix pair = bell_state(label).density().entries();
    m += 0.25 * kron(pair, pair);
  }
  return DensityMatrix(4, std::move(m));
}

// --------------------------------------------------------------------------
// Operations

// (1-p)/2^n * I + p * rho: mixes toward the maximally mixed state.
inline DensityMatrix depolarize(const DensityMatrix& rho, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("depolarize: p must lie in [0, 1]");
  }
  const Eigen::Index d = rho.dim();
  Matrix m = ((1.0 - p) / static_cast<double>(d)) * Matrix::Identity(d, d) +
             p * rho.entries();
  return DensityMatrix(rho.n_qubits(), std::move(m));
}

// Tensor product; the qubits of `a` become the more significant ones.
inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(a.n_qubits() + b.n_qubits(), kron(a.entries(), b.entries()));
}

namespace detail {

// Validates a 1-based qubit set and returns it sorted ascending.
inline std::vector<int> checked_sorted_qubits(int n_qubits, std::vector<int> qubits,
                                              const char* who, bool allow_empty) {
  if (!allow_empty && qubits.empty()) {
    throw std::invalid_argument(std::string(who) + ": qubit set must be nonempty");
  }
  std::sort(qubits.begin(), qubits.end());
  for (size_t i = 0; i < qubits.size(); ++i) {
    check_qubit_index(n_qubits, qubits[i], who);
    if (i > 0 && qubits[i] == qubits[i - 1]) {
      throw std::invalid_argument(std::string(who) + ": duplicate qubit index");
    }
  }
  return qubits;
}

}  // namespace detail

// Reduced state on `keep` (1-based set); remaining qubits are traced out.
// The kept qubits appear in the result in ascending original order.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
  const int n = rho.n_qubits();
  keep = detail::checked_sorted_qubits(n, std::move(keep), "partial_trace",
                                       /*allow_empty=*/false);
  const int k = static_cast<int>(keep.size());
  const int t = n - k;

  std::vector<int> keep_shift(k), trace_shift(t);
  {
    std::vector<bool> kept(n + 1, false);
    for (int q : keep) kept[q] = true;
    int ti = 0;
    for (int q = 1, ki = 0; q <= n; ++q) {
      if (kept[q]) keep_shift[ki++] = qubit_bit_position(n, q);
      else trace_shift[ti++] = qubit_bit_position(n, q);
    }
  }

  // Scatter a compact index into the bit positions listed in `shifts`
  // (shifts are ordered most significant first).
  auto scatter = [](long compact, const std::vector<int>& shifts) {
    long out = 0;
    const int bits = static_cast<int>(shifts.size());
    for (int i = 0; i < bits; ++i) {
      if ((compact >> (bits - 1 - i)) & 1) out |= long{1} << shifts[i];
    }
    return out;
  };

  const long dk = long{1} << k;
  const long dt = long{1} << t;
  Matrix out = Matrix::Zero(dk, dk);
  for (long a = 0; a < dk; ++a) {
    const long ra = scatter(a, keep_shift);
    for (long b = 0; b < dk; ++b) {
      const long rb = scatter(b, keep_shift);
      Complex sum = 0.0;
      for (long c = 0; c < dt; ++c) {
        const long rc = scatter(c, trace_shift);
        sum += rho.entries()(ra | rc, rb | rc);
      }
      out(a, b) = sum;
    }
  }
  return DensityMatrix(k, std::move(out));
}

// Transpose on the chosen subsystem only. The result is Hermitian with unit
// trace but need not be positive, so it is returned as a raw matrix.
inline Matrix partial_transpose(const DensityMatrix& rho, std::vector<int> subsystem) {
  const int n = rho.n_qubits();
  subsystem = detail::checked_sorted_qubits(n, std::move(subsystem),
                                            "partial_transpose", /*allow_empty=*/true);
  long mask = 0;
  for (int q : subsystem) mask |= long{1} << qubit_bit_position(n, q);

  const long d = rho.dim();
  Matrix out(d, d);
  for (long r = 0; r < d; ++r) {
    for (long c = 0; c < d; ++c) {
      // Swap the subsystem bits between row and column.
      const long rr = (r & ~mask) | (c & mask);
      const long cc = (c & ~mask) | (r & mask);
      out(r, c) = rho.entries()(rr, cc);
    }
  }
  return out;
}

}  // namespace qss
