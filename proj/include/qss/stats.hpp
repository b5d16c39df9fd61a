// stats.hpp
// Finite-sample estimation for +/-1 correlation experiments: mergeable
// accumulators and the signed combination of independent term estimates.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace qss {

// Counts, sum and sum of squares of a stream of +/-1 samples. Accumulators
// merge associatively, so partial tallies can be combined in any order.
class SampleAccumulator {
 public:
  void add(double x) {
    if (x != 1.0 && x != -1.0) {
      throw std::invalid_argument("SampleAccumulator::add: sample must be +1 or -1");
    }
    ++count_;
    sum_ += x;
    sum_sq_ += x * x;
  }

  void merge(const SampleAccumulator& other) {
    count_ += other.count_;
    sum_ += other.sum_;
    sum_sq_ += other.sum_sq_;
  }

  long long count() const { return count_; }
  double sum() const { return sum_; }
  double sum_of_squares() const { return sum_sq_; }

  double mean() const {
    require_samples();
    return sum_ / static_cast<double>(count_);
  }

  // Standard error of the mean; for +/-1 samples this is
  // sqrt((1 - mean^2) / count).
  double std_error() const {
    require_samples();
    const double m = mean();
    const double var = std::max(sum_sq_ / static_cast<double>(count_) - m * m, 0.0);
    return std::sqrt(var / static_cast<double>(count_));
  }

 private:
  void require_samples() const {
    if (count_ == 0) throw std::logic_error("SampleAccumulator: no samples");
  }

  long long count_ = 0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

// Signed sum of four independently estimated terms with quadrature error
// propagation. Default signs match the (+, +, +, -) Bell combination.
inline std::pair<double, double> combine_terms(
    const std::array<double, 4>& means, const std::array<double, 4>& std_errors,
    const std::array<double, 4>& signs = {1.0, 1.0, 1.0, -1.0}) {
  double value = 0.0;
  double var = 0.0;
  for (int i = 0; i < 4; ++i) {
    value += signs[i] * means[i];
    var += std_errors[i] * std_errors[i];
  }
  return {value, std::sqrt(var)};
}

}  // namespace qss
