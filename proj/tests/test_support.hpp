#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ccdim/system.hpp"

namespace testsup {

inline std::string config_path(const char* name) {
  return std::string(CCDIM_CONFIG_DIR) + "/" + name;
}

inline ccdim::System load_fixture(const char* name) {
  return ccdim::load_system_file(config_path(name));
}

/// Oracle-side bisection for a strictly decreasing function with
/// f(lo) > 0 > f(hi). Independent of the library's root finding.
inline double bisect_root(const std::function<double(double)>& f, double lo,
                          double hi) {
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Root of sum |r_j|^s = 1: the classical similarity-dimension equation.
inline double affine_dimension_oracle(const std::vector<double>& ratios) {
  auto f = [&](double s) {
    double z = -1.0;
    for (double r : ratios) z += std::pow(std::fabs(r), s);
    return z;
  };
  double hi = 1.0;
  while (f(hi) > 0.0) hi *= 2.0;
  return bisect_root(f, 0.0, hi);
}

inline ccdim::Word random_word(std::mt19937_64& rng, int alphabet, int length) {
  std::uniform_int_distribution<int> letter(1, alphabet);
  std::vector<int> ls(static_cast<std::size_t>(length));
  for (auto& l : ls) l = letter(rng);
  return ccdim::Word(std::move(ls));
}

inline bool leq_tol(double a, double b, double rel = 1e-12) {
  return a <= b + rel * std::max(std::fabs(a), std::fabs(b));
}

inline bool geq_tol(double a, double b, double rel = 1e-12) {
  return leq_tol(b, a, rel);
}

}  // namespace testsup
