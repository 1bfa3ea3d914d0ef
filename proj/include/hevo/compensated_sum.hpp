// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace hevo {

// Neumaier's variant of Kahan summation. Results depend only on the order of
// add() calls, which callers keep index-ascending.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace hevo
