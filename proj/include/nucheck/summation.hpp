#pragma once

#include <cmath>
#include <complex>

namespace nucheck {

/// Neumaier-compensated accumulator. The order of additions fully determines
/// the result, so callers that fix the order get bit-stable sums.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexCompensatedSum {
 public:
  ComplexCompensatedSum& operator+=(std::complex<double> x) {
    re_ += x.real();
    im_ += x.imag();
    return *this;
  }

  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace nucheck
