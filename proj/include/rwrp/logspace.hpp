#pragma once

#include <cmath>
#include <limits>

namespace rwrp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Streaming log-sum-exp: add terms one at a time in a fixed order.
struct LogSum {
  double m = kNegInf;
  double s = 0.0;

  void add(double t) {
    if (t == kNegInf) return;
    if (t > m) {
      s = s * std::exp(m - t) + 1.0;
      m = t;
    } else {
      s += std::exp(t - m);
    }
  }
  double value() const { return m == kNegInf ? kNegInf : m + std::log(s); }
};

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// |a-b| treating equal infinities as no change.
inline double log_change(double a, double b) {
  if (a == b) return 0.0;
  if (std::isinf(a) || std::isinf(b)) return kPosInf;
  return std::fabs(a - b);
}

}  // namespace rwrp
