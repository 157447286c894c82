#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace ccdim {

/// Compensated (Kahan) accumulator. Summation order is part of the
/// determinism contract: callers must feed terms in a fixed order.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

/// Shortest decimal string that parses back to exactly `v`.
/// Stable across runs, so CSV/JSON output is byte-reproducible.
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace ccdim
