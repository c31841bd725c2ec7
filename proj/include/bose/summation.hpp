#pragma once

#include <span>

namespace bose {

// Neumaier-compensated running sum. Adding the same values in the same order
// always yields the same bits; that order is the caller's contract.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(std::span<const double> xs) {
    for (double x : xs) add(x);
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

}  // namespace bose
