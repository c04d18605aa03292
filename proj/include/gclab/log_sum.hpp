#pragma once

#include <cmath>
#include <limits>

namespace gclab {

// Accumulates sum_j exp(l_j) from log-terms l_j with a running exponent
// shift, so no intermediate ever overflows.
class LogSum {
 public:
  void add_log(double l) {
    if (l == -std::numeric_limits<double>::infinity()) return;
    if (!(l > shift_)) {
      scaled_ += std::exp(l - shift_);
      return;
    }
    scaled_ = scaled_ * std::exp(shift_ - l) + 1.0;
    shift_ = l;
  }

  void add(double value) {
    if (value > 0.0) add_log(std::log(value));
  }

  // log of the accumulated sum; -inf when nothing positive was added.
  double log() const {
    if (scaled_ == 0.0) return -std::numeric_limits<double>::infinity();
    return shift_ + std::log(scaled_);
  }

  double max_log() const { return shift_; }
  bool empty() const { return scaled_ == 0.0; }

 private:
  double shift_ = -std::numeric_limits<double>::infinity();
  double scaled_ = 0.0;
};

}  // namespace gclab
