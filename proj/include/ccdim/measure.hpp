#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ccdim/pressure.hpp"
#include "ccdim/system.hpp"

namespace ccdim {

/// Finite-stage cylinder weight
///   nu_n(C(sigma)) = sum_{|tau|=n} diam(J_{sigma tau})^h
///                  / sum_{|omega|=|sigma|+n} diam(J_omega)^h
/// together with the n-independent enclosure [d^h/eta, d^h eta], eta = xi^{9h}.
struct MeasureEstimate {
  Word word;
  int stage = 0;
  double h = 0.0;
  double value = 0.0;
  double enclosure_lo = 0.0;
  double enclosure_hi = 0.0;
};

MeasureEstimate nu(const System& system, const Word& sigma, int stage,
                   double h);

std::pair<double, double> measure_enclosure(const System& system,
                                            const Word& sigma, double h);

/// Antichain of first basic intervals with diam <= r (parent still > r),
/// in lexicographic word order. A disjoint cover of the limit set at scale r.
struct MoranCover {
  double r = 0.0;
  std::vector<BasicInterval> elements;
};

MoranCover moran_cover(const System& system, double r);

/// Number of cover intervals meeting the closed ball [x - r, x + r].
int ball_intersection_count(const MoranCover& cover, double x, double r);

/// M = floor(4 xi B): certified cap on ball intersections with an r-Moran cover.
long long moran_ball_bound(const System& system);

struct BoxCount {
  double r = 0.0;
  std::size_t count = 0;
  double certified_upper = 0.0;  // eta (xi B)^h r^{-h} at h = h_hi
};

/// Moran-cover cardinality as the box-count proxy (a valid cover by sets of
/// diameter <= r, within the factor M of optimal).
BoxCount box_count(const System& system, double r,
                   const DimensionEnclosure& enclosure);

struct BoxDimFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;
  std::vector<BoxCount> points;
};

/// OLS slope of log N_r against -log r over >= 4 radii spanning >= 2 decades.
BoxDimFit boxdim_regress(const System& system, const std::vector<double>& radii,
                         const DimensionEnclosure& enclosure);

/// Certified Hausdorff/packing measure bounds at the dimension:
///   eta^{-1} M^{-1} <= H^h(E) <= xi^{3h},  P^h(E) <= 2^h eta xi^h B^h.
/// All constants are evaluated at h = h_hi, where each is largest, so the
/// upper bounds stay valid and the lower bound stays safe for the true h
/// anywhere in the enclosure.
struct CertifiedBounds {
  double h_lo = 0.0;
  double h_hi = 0.0;
  long long M = 0;
  double hausdorff_lower = 0.0;
  double hausdorff_upper = 0.0;
  double packing_upper = 0.0;
  bool certified = false;
};

CertifiedBounds certified_bounds(const System& system,
                                 const DimensionEnclosure& enclosure);

}  // namespace ccdim
