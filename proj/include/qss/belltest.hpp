// belltest.hpp
// Two-setting Bell functionals: exact and sampled evaluation of the
// four-qubit functional
//
//   E(1,1,1,1) + E(1,1,1,2) + E(2,2,2,1) - E(2,2,2,2)   (local bound 2)
//
// plus the standard two-qubit CHSH value and the security verdict rule.
//
// Term convention: the last argument slot of E carries qubit 1's setting
// index and the first three slots carry qubits 2..4, i.e. qubit 1 toggles
// between the rotated directions within a term group while qubits 2..4
// switch between X and Y as a block. This is the assignment under which the
// four-qubit functional reaches 2*sqrt(2) on the Smolin state.

#pragma once

#include "qss/measurement.hpp"
#include "qss/stats.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace qss {

inline constexpr double kLocalBound = 2.0;
inline const double kMaxViolation = 2.0 * std::sqrt(2.0);

// Two measurement settings per qubit; settings are addressed by
// (qubit 1..4, setting index 1..2).
struct SettingsTable {
  std::array<std::array<MeasurementSetting, 2>, 4> directions;

  const MeasurementSetting& at(int qubit, int setting_index) const {
    if (qubit < 1 || qubit > 4 || setting_index < 1 || setting_index > 2) {
      throw std::invalid_argument("SettingsTable::at: index out of range");
    }
    return directions[qubit - 1][setting_index - 1];
  }
};

// Qubit 1: (X+Y)/sqrt(2) and (X-Y)/sqrt(2); qubits 2..4: X and Y.
inline SettingsTable default_settings() {
  const double r = 1.0 / std::sqrt(2.0);
  SettingsTable t;
  t.directions[0] = {MeasurementSetting(r, r, 0.0), MeasurementSetting(r, -r, 0.0)};
  for (int q = 2; q <= 4; ++q) {
    t.directions[q - 1] = {MeasurementSetting::pauli_x(), MeasurementSetting::pauli_y()};
  }
  return t;
}

// One term of the four-qubit functional: which setting index each qubit
// uses, and the sign the term enters the combination with.
struct Chsh4Combo {
  std::array<int, 4> setting_for_qubit;  // [qubit-1] -> 1 or 2
  double sign;
};

inline const std::array<Chsh4Combo, 4>& chsh4_combos() {
  static const std::array<Chsh4Combo, 4> combos = {{
      {{1, 1, 1, 1}, 1.0},   // E(1,1,1,1)
      {{2, 1, 1, 1}, 1.0},   // E(1,1,1,2)
      {{1, 2, 2, 2}, 1.0},   // E(2,2,2,1)
      {{2, 2, 2, 2}, -1.0},  // E(2,2,2,2)
  }};
  return combos;
}

inline std::vector<MeasurementSetting> combo_settings(const SettingsTable& table,
                                                      int combo_index) {
  const Chsh4Combo& combo = chsh4_combos()[combo_index];
  std::vector<MeasurementSetting> s;
  s.reserve(4);
  for (int q = 1; q <= 4; ++q) s.push_back(table.at(q, combo.setting_for_qubit[q - 1]));
  return s;
}

enum class EvalMode { Exact, Sampled };

struct BellFunctionalResult {
  double value = 0.0;
  std::array<double, 4> components{};  // the four E terms, in combo order
  EvalMode mode = EvalMode::Exact;
  long long sample_count = 0;          // 0 for exact
  double std_error = 0.0;              // 0 for exact
  std::array<long long, 4> component_counts{};
  std::array<double, 4> component_std_errors{};
  bool conclusive = true;  // false when a setting combination got no samples
};

enum class Verdict { Secure, Insecure, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Secure:       return "Secure";
    case Verdict::Insecure:     return "Insecure";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

enum class ScheduleMode { UniformRandom, RoundRobin };

// Exact value of the four-qubit functional via the trace formula.
inline BellFunctionalResult chsh4_exact(const DensityMatrix& rho,
                                        const SettingsTable& table) {
  if (rho.n_qubits() != 4) {
    throw std::invalid_argument("chsh4_exact: state must have 4 qubits");
  }
  BellFunctionalResult out;
  out.mode = EvalMode::Exact;
  std::array<double, 4> signs{};
  for (int c = 0; c < 4; ++c) {
    out.components[c] = expectation(rho, combo_settings(table, c));
    signs[c] = chsh4_combos()[c].sign;
  }
  out.value = combine_terms(out.components, {0, 0, 0, 0}, signs).first;
  return out;
}

// Monte-Carlo estimate: each round assigns one of the four setting
// combinations (uniformly at random, or round-robin), measures all four
// qubits, and tallies the +/-1 outcome product for that combination.
inline BellFunctionalResult chsh4_sampled(const DensityMatrix& rho,
                                          const SettingsTable& table, long long rounds,
                                          Rng& rng,
                                          ScheduleMode schedule = ScheduleMode::UniformRandom) {
  if (rho.n_qubits() != 4) {
    throw std::invalid_argument("chsh4_sampled: state must have 4 qubits");
  }
  if (rounds < 4) {
    throw std::invalid_argument("chsh4_sampled: need at least 4 rounds");
  }

  std::vector<ProductMeasurementSampler> samplers;
  samplers.reserve(4);
  for (int c = 0; c < 4; ++c) samplers.emplace_back(rho, combo_settings(table, c));

  std::array<SampleAccumulator, 4> acc;
  for (long long round = 0; round < rounds; ++round) {
    const int c = schedule == ScheduleMode::UniformRandom
                      ? static_cast<int>(rng.next_below(4))
                      : static_cast<int>(round & 3);
    const long pattern = samplers[c].sample(rng);
    acc[c].add(static_cast<double>(ProductMeasurementSampler::product_sign(pattern)));
  }

  BellFunctionalResult out;
  out.mode = EvalMode::Sampled;
  out.sample_count = rounds;
  std::array<double, 4> means{}, errs{}, signs{};
  for (int c = 0; c < 4; ++c) {
    out.component_counts[c] = acc[c].count();
    signs[c] = chsh4_combos()[c].sign;
    if (acc[c].count() == 0) {
      out.conclusive = false;
      continue;
    }
    means[c] = acc[c].mean();
    errs[c] = acc[c].std_error();
  }
  out.components = means;
  out.component_std_errors = errs;
  if (out.conclusive) {
    std::tie(out.value, out.std_error) = combine_terms(means, errs, signs);
  } else {
    out.value = 0.0;
    out.std_error = std::numeric_limits<double>::infinity();
  }
  return out;
}

// Standard two-qubit CHSH combination E(1,1)+E(1,2)+E(2,1)-E(2,2).
inline double chsh2_exact(const DensityMatrix& rho,
                          const std::array<std::array<MeasurementSetting, 2>, 2>& settings) {
  if (rho.n_qubits() != 2) {
    throw std::invalid_argument("chsh2_exact: state must have 2 qubits");
  }
  auto term = [&](int a, int b) {
    return expectation(rho, {settings[0][a - 1], settings[1][b - 1]});
  };
  return term(1, 1) + term(1, 2) + term(2, 1) - term(2, 2);
}

// Settings reaching 2*sqrt(2) on |Phi+>: qubit 1 measures Z and X, qubit 2
// measures (Z+X)/sqrt(2) and (Z-X)/sqrt(2).
inline std::array<std::array<MeasurementSetting, 2>, 2> chsh2_optimal_settings() {
  const double r = 1.0 / std::sqrt(2.0);
  return {{{MeasurementSetting::pauli_z(), MeasurementSetting::pauli_x()},
           {MeasurementSetting(r, 0.0, r), MeasurementSetting(-r, 0.0, r)}}};
}

// Secure iff the estimate clears the local bound by confidence_k standard
// errors. Exact results carry zero error, so the rule degenerates to
// value > 2. Results with an unsampled combination are inconclusive.
inline Verdict violation_threshold_check(const BellFunctionalResult& result,
                                         double confidence_k) {
  if (!result.conclusive) return Verdict::Inconclusive;
  return result.value - confidence_k * result.std_error > kLocalBound
             ? Verdict::Secure
             : Verdict::Insecure;
}

}  // namespace qss
