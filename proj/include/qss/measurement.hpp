// measurement.hpp
// Born-rule projective measurement: single-qubit measurements along
// arbitrary Bloch directions, joint Bell-basis measurement on a qubit pair,
// exact correlation functions, and seeded sampling with post-measurement
// state updates.

#pragma once

#include "qss/qstate.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <utility>

namespace qss {

// Branches with probability below this are treated as impossible.
inline constexpr double kBranchEps = 1e-12;

// Requested a measurement branch whose probability is numerically zero.
struct DegenerateBranchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --------------------------------------------------------------------------
// Seeded counter-based generator (splitmix64). Identical seeds give
// bit-identical streams. split(tag) derives an independent child stream from
// the current state without advancing the parent, so per-party and per-copy
// streams all replay from one master seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n); bias is at most n / 2^64.
  uint32_t next_below(uint32_t n) {
    return static_cast<uint32_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  Rng split(uint64_t tag) const {
    uint64_t z = state_ ^ (0x632BE59BD9B4E019ull * (tag + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return Rng(z ^ (z >> 31));
  }

 private:
  uint64_t state_;
};

// --------------------------------------------------------------------------
// A +/-1-valued single-qubit observable given by a unit Bloch direction:
// the measured operator is x*X + y*Y + z*Z.
struct MeasurementSetting {
  double x = 0.0, y = 0.0, z = 1.0;

  MeasurementSetting() = default;
  MeasurementSetting(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
    if (std::abs(x * x + y * y + z * z - 1.0) > kAlgebraTol) {
      throw std::invalid_argument("MeasurementSetting: direction must be unit length");
    }
  }

  static MeasurementSetting pauli_x() { return {1.0, 0.0, 0.0}; }
  static MeasurementSetting pauli_y() { return {0.0, 1.0, 0.0}; }
  static MeasurementSetting pauli_z() { return {0.0, 0.0, 1.0}; }
};

// 2x2 matrix of the observable dir . (X, Y, Z).
inline Matrix bloch_observable(const MeasurementSetting& s) {
  Matrix m(2, 2);
  m(0, 0) = Complex(s.z, 0.0);
  m(0, 1) = Complex(s.x, -s.y);
  m(1, 0) = Complex(s.x, s.y);
  m(1, 1) = Complex(-s.z, 0.0);
  return m;
}

struct MeasurementOutcome {
  int value;             // +1 or -1
  double probability;    // Born probability of this branch
  DensityMatrix post_state;
};

namespace detail {

// out = (op on `qubit`) * m, with op 2x2. O(d^2).
inline Matrix apply_left_one_qubit(const Matrix& m, const Matrix& op, int qubit, int n) {
  const long d = m.rows();
  const long bit = long{1} << qubit_bit_position(n, qubit);
  Matrix out(d, d);
  for (long r = 0; r < d; ++r) {
    const long r0 = r & ~bit;
    const long r1 = r0 | bit;
    if ((r & bit) == 0) out.row(r) = op(0, 0) * m.row(r0) + op(0, 1) * m.row(r1);
    else out.row(r) = op(1, 0) * m.row(r0) + op(1, 1) * m.row(r1);
  }
  return out;
}

// out = m * (op on `qubit`). O(d^2).
inline Matrix apply_right_one_qubit(const Matrix& m, const Matrix& op, int qubit, int n) {
  const long d = m.rows();
  const long bit = long{1} << qubit_bit_position(n, qubit);
  Matrix out(d, d);
  for (long c = 0; c < d; ++c) {
    const long c0 = c & ~bit;
    const long c1 = c0 | bit;
    if ((c & bit) == 0) out.col(c) = m.col(c0) * op(0, 0) + m.col(c1) * op(1, 0);
    else out.col(c) = m.col(c0) * op(0, 1) + m.col(c1) * op(1, 1);
  }
  return out;
}

}  // namespace detail

// Deterministic branch of a single-qubit measurement: projects onto the
// `sign` eigenspace of the observable and renormalizes.
inline MeasurementOutcome project_qubit(const DensityMatrix& rho, int qubit,
                                        const MeasurementSetting& setting, int sign) {
  const int n = rho.n_qubits();
  check_qubit_index(n, qubit, "project_qubit");
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("project_qubit: sign must be +1 or -1");
  }
  const Matrix proj =
      0.5 * (Matrix::Identity(2, 2) + static_cast<double>(sign) * bloch_observable(setting));
  Matrix pm = detail::apply_left_one_qubit(rho.entries(), proj, qubit, n);
  const double p = pm.trace().real();
  if (p < kBranchEps) {
    throw DegenerateBranchError("project_qubit: branch probability is numerically zero");
  }
  Matrix post = detail::apply_right_one_qubit(pm, proj, qubit, n) / p;
  return MeasurementOutcome{sign, p, DensityMatrix(n, std::move(post))};
}

// Samples the +/-1 outcome by the Born rule and collapses the state.
// A branch with probability below kBranchEps is never selected.
inline MeasurementOutcome measure_qubit(const DensityMatrix& rho, int qubit,
                                        const MeasurementSetting& setting, Rng& rng) {
  const int n = rho.n_qubits();
  check_qubit_index(n, qubit, "measure_qubit");
  // p(+1) = (1 + <O>)/2 with <O> the single-qubit expectation.
  const Matrix om = detail::apply_left_one_qubit(rho.entries(), bloch_observable(setting),
                                                 qubit, n);
  const double p_plus = std::clamp(0.5 * (1.0 + om.trace().real()), 0.0, 1.0);
  int sign = rng.next_unit() < p_plus ? 1 : -1;
  if (sign == 1 && p_plus < kBranchEps) sign = -1;
  if (sign == -1 && 1.0 - p_plus < kBranchEps) sign = 1;
  return project_qubit(rho, qubit, setting, sign);
}

// --------------------------------------------------------------------------
// Bell-basis measurement on a qubit pair.

namespace detail {

struct PairIndex {
  int n;
  long bit_a, bit_b;   // bit masks of the two pair qubits
  long rest_mask;
  std::vector<long> rest_indices;  // full-index contribution of each compact rest index

  PairIndex(int n_qubits, std::pair<int, int> pair) : n(n_qubits) {
    check_qubit_index(n, pair.first, "bell_measure");
    check_qubit_index(n, pair.second, "bell_measure");
    if (pair.first == pair.second) {
      throw std::invalid_argument("bell_measure: pair must name two distinct qubits");
    }
    bit_a = long{1} << qubit_bit_position(n, pair.first);
    bit_b = long{1} << qubit_bit_position(n, pair.second);
    const long d = long{1} << n;
    rest_mask = (d - 1) & ~(bit_a | bit_b);
    rest_indices.reserve(d >> 2);
    for (long i = 0; i < d; ++i) {
      if ((i & (bit_a | bit_b)) == 0) {
        // enumerate indices with pair bits clear, in increasing order: this
        // maps compact rest indices to full-index bit patterns while keeping
        // the relative order of the remaining qubits
        if ((i & rest_mask) == i) rest_indices.push_back(i);
      }
    }
  }

  long full_index(int pair_bits, long rest) const {
    long out = rest_indices[rest];
    if (pair_bits & 2) out |= bit_a;  // first pair qubit = high bit of the Bell vector
    if (pair_bits & 1) out |= bit_b;
    return out;
  }
};

}  // namespace detail

// Probability of each Bell outcome on the pair, in BellLabel order.
inline std::array<double, 4> bell_probabilities(const DensityMatrix& rho,
                                                std::pair<int, int> pair) {
  const detail::PairIndex ix(rho.n_qubits(), pair);
  const long dr = long{1} << (rho.n_qubits() - 2);
  std::array<double, 4> probs{};
  for (BellLabel label : kBellLabels) {
    const Vector& b = bell_state(label).amplitudes();
    double p = 0.0;
    for (long r = 0; r < dr; ++r) {
      Complex acc = 0.0;
      for (int u = 0; u < 4; ++u) {
        if (b(u) == Complex(0.0)) continue;
        for (int v = 0; v < 4; ++v) {
          if (b(v) == Complex(0.0)) continue;
          acc += std::conj(b(u)) * rho.entries()(ix.full_index(u, r), ix.full_index(v, r)) * b(v);
        }
      }
      p += acc.real();
    }
    probs[bell_bits(label)] = std::max(p, 0.0);
  }
  return probs;
}

// Post-measurement state of the remaining qubits given a Bell outcome on the
// pair; returns (branch probability, residual state with the pair traced out).
inline std::pair<double, DensityMatrix> bell_branch(const DensityMatrix& rho,
                                                    std::pair<int, int> pair,
                                                    BellLabel label) {
  const detail::PairIndex ix(rho.n_qubits(), pair);
  const int nr = rho.n_qubits() - 2;
  const long dr = long{1} << nr;
  const Vector& b = bell_state(label).amplitudes();
  Matrix res = Matrix::Zero(dr, dr);
  for (long r = 0; r < dr; ++r) {
    for (long s = 0; s < dr; ++s) {
      Complex acc = 0.0;
      for (int u = 0; u < 4; ++u) {
        if (b(u) == Complex(0.0)) continue;
        for (int v = 0; v < 4; ++v) {
          if (b(v) == Complex(0.0)) continue;
          acc += std::conj(b(u)) * rho.entries()(ix.full_index(u, r), ix.full_index(v, s)) * b(v);
        }
      }
      res(r, s) = acc;
    }
  }
  const double p = res.trace().real();
  if (p < kBranchEps) {
    throw DegenerateBranchError("bell_branch: branch probability is numerically zero");
  }
  res /= p;
  return {p, DensityMatrix(nr, std::move(res))};
}

inline BellLabel sample_bell_label(const DensityMatrix& rho, std::pair<int, int> pair,
                                   Rng& rng) {
  const std::array<double, 4> probs = bell_probabilities(rho, pair);
  const double u = rng.next_unit() * (probs[0] + probs[1] + probs[2] + probs[3]);
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    acc += probs[i];
    if (u < acc && probs[i] >= kBranchEps) return bell_from_bits(i);
  }
  // Roundoff fallback: take the most likely label.
  const int best = static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                                    probs.begin());
  return bell_from_bits(best);
}

// Joint Bell measurement on `pair`: samples a label by the Born rule and
// returns it with the normalized residual state of the remaining qubits.
inline std::pair<BellLabel, DensityMatrix> bell_measure(const DensityMatrix& rho,
                                                        std::pair<int, int> pair,
                                                        Rng& rng) {
  const BellLabel label = sample_bell_label(rho, pair, rng);
  return {label, bell_branch(rho, pair, label).second};
}

// --------------------------------------------------------------------------
// Exact correlation function: Tr(rho * prod_i dir_i . sigma), one setting
// per qubit. No sampling.
inline double expectation(const DensityMatrix& rho,
                          const std::vector<MeasurementSetting>& settings) {
  const int n = rho.n_qubits();
  if (static_cast<int>(settings.size()) != n) {
    throw std::invalid_argument("expectation: need exactly one setting per qubit");
  }
  Matrix obs = Matrix::Identity(1, 1);
  for (const MeasurementSetting& s : settings) obs = kron(obs, bloch_observable(s));
  return (rho.entries() * obs).trace().real();
}

// --------------------------------------------------------------------------
// Joint sampler for measuring every qubit at once in a fixed product of
// single-qubit bases. Produces the same outcome distribution as measuring
// the qubits one at a time with measure_qubit (the projectors commute);
// sampling costs one uniform draw per shot, which keeps large security
// checks cheap.
//
// Pattern encoding: bit (n - q) of the pattern is 1 when qubit q reads -1,
// mirroring the basis-index convention.
class ProductMeasurementSampler {
 public:
  ProductMeasurementSampler(const DensityMatrix& rho,
                            const std::vector<MeasurementSetting>& settings)
      : n_(rho.n_qubits()) {
    if (static_cast<int>(settings.size()) != n_) {
      throw std::invalid_argument("ProductMeasurementSampler: one setting per qubit");
    }
    const long npat = long{1} << n_;
    probs_.resize(npat);
    cdf_.resize(npat);
    double total = 0.0;
    for (long pattern = 0; pattern < npat; ++pattern) {
      Matrix proj = Matrix::Identity(1, 1);
      for (int q = 1; q <= n_; ++q) {
        const double sign = outcome_sign(pattern, q, n_);
        proj = kron(proj, 0.5 * (Matrix::Identity(2, 2) +
                                 sign * bloch_observable(settings[q - 1])));
      }
      const double p = std::max((rho.entries() * proj).trace().real(), 0.0);
      probs_[pattern] = p;
      total += p;
      cdf_[pattern] = total;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::logic_error("ProductMeasurementSampler: probabilities do not sum to 1");
    }
  }

  int n_qubits() const { return n_; }
  double probability(long pattern) const { return probs_[pattern]; }

  long sample(Rng& rng) const {
    const double u = rng.next_unit() * cdf_.back();
    for (size_t i = 0; i + 1 < cdf_.size(); ++i) {
      if (u < cdf_[i]) return static_cast<long>(i);
    }
    return static_cast<long>(cdf_.size()) - 1;
  }

  static int outcome_sign(long pattern, int qubit, int n_qubits) {
    return ((pattern >> qubit_bit_position(n_qubits, qubit)) & 1) ? -1 : 1;
  }

  // Product of all per-qubit outcomes for a pattern.
  static int product_sign(long pattern) {
    return (std::popcount(static_cast<unsigned long>(pattern)) & 1) ? -1 : 1;
  }

 private:
  int n_;
  std::vector<double> probs_, cdf_;
};

}  // namespace qss
