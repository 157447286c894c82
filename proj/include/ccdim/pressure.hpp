#pragma once

#include <vector>

#include "ccdim/system.hpp"

namespace ccdim {

/// Two-sided bound on the pressure P(t) from the depth-n partition sum:
///   L = (log Z_n(t) - 3 t ln xi) / n,   U = (log Z_n(t) + 3 t ln xi) / n.
/// Z_{n+p} <= xi^{3t} Z_n Z_p makes log Z + 3t ln xi subadditive along
/// aligned blocks, so U >= P; the mirrored inequality gives L <= P.
struct PressureBracket {
  int depth = 0;
  double t = 0.0;
  double logZ = 0.0;
  double L = 0.0;
  double U = 0.0;

  double midpoint() const { return 0.5 * (L + U); }
};

/// Certified enclosure of the zero h of the pressure: h_lo and h_hi are the
/// bisection roots of L and U. Contains the true h whenever the defining
/// data (b, B, c, gamma) are valid.
struct DimensionEnclosure {
  double h_lo = 0.0;
  double h_hi = 0.0;
  int depth = 0;
  double tol = 0.0;
  double xi = 1.0;
  double xi_emp = 1.0;       // informational, never replaces xi^3
  double width_bound = 0.0;  // 6 h_hi ln xi / (n ln b)
  bool certified = false;

  double width() const { return h_hi - h_lo; }
  double midpoint() const { return 0.5 * (h_lo + h_hi); }
};

/// Streams Z_n(t) = sum over {1..N}^n of diam(J_sigma)^t with compensated
/// summation. The reduction is decomposed into a fixed set of prefix tasks
/// combined in lexicographic order, so the result is bit-identical for any
/// worker count; with `cache` the per-word diameters are stored once and
/// reused across t (same arithmetic, same bits).
class PartitionEvaluator {
 public:
  PartitionEvaluator(const System& system, int depth, int threads = 1,
                     bool cache = false);

  double sum_pow(double t) const;  // Z_n(t)
  double log_sum(double t) const;  // log Z_n(t)
  int depth() const { return depth_; }

 private:
  const System* system_;
  int depth_;
  int threads_;
  int task_depth_;
  std::vector<Word> task_prefixes_;              // lex order
  std::vector<std::vector<double>> cached_diams_;  // per task; empty => stream
};

/// log Z_n(t); deterministic bit-for-bit regardless of worker count.
double partition_log_sum(const System& system, int depth, double t,
                         int threads = 1);

/// Smallest depth >= requested that the schedule's block structure accepts
/// (a multiple of the cycle length; anything for constant schedules).
int aligned_depth(const System& system, int requested);

/// Requires t >= 0 and an aligned depth. For prefix_periodic schedules the
/// bracket is computed on the cycle subsystem (the prefix is a finite
/// bi-Lipschitz change and does not move the dimension, but it does break
/// the finite-depth subadditivity bound).
PressureBracket pressure_bracket(const System& system, int depth, double t,
                                 int threads = 1);

DimensionEnclosure dimension_enclosure(const System& system, int depth,
                                       double tol = 1e-12, int threads = 1);

std::vector<PressureBracket> pressure_curve(const System& system, int depth,
                                            const std::vector<double>& t_grid,
                                            int threads = 1);

/// Checks xi^{-3t} <= Z_n(t) <= xi^{3t} at t in {h_lo, midpoint, h_hi}.
/// Holds by construction of the enclosure roots; a failure signals
/// inconsistent defining data.
struct CorollaryCheck {
  struct Probe {
    double t = 0.0;
    double sum = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool pass = false;
  };
  bool ok = false;
  Probe at_h_lo, at_mid, at_h_hi;
};

CorollaryCheck corollary_check(const System& system, int depth,
                               const DimensionEnclosure& enclosure,
                               int threads = 1);

}  // namespace ccdim
