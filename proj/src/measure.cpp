#include "ccdim/measure.hpp"

#include <algorithm>
#include <cmath>

#include "ccdim/numeric.hpp"

namespace ccdim {

namespace {

void check_h(double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw InputError("h must be a positive finite real, got " +
                     std::to_string(h));
}

}  // namespace

MeasureEstimate nu(const System& system, const Word& sigma, int stage,
                   double h) {
  if (stage < 1)
    throw InputError("measure stage must be >= 1, got " + std::to_string(stage));
  check_h(h);
  const int N = system.alphabet();
  KahanSum numerator;
  for_each_extension(sigma, N, stage, [&](const Word& w) {
    numerator.add(std::pow(system.word_diam(w.letters()), h));
  });
  KahanSum denominator;
  for_each_word(N, sigma.length() + stage, [&](const Word& w) {
    denominator.add(std::pow(system.word_diam(w.letters()), h));
  });
  MeasureEstimate out;
  out.word = sigma;
  out.stage = stage;
  out.h = h;
  out.value = numerator.value() / denominator.value();
  std::tie(out.enclosure_lo, out.enclosure_hi) =
      measure_enclosure(system, sigma, h);
  return out;
}

std::pair<double, double> measure_enclosure(const System& system,
                                            const Word& sigma, double h) {
  check_h(h);
  const double d = sigma.empty() ? 1.0 : system.basic_interval(sigma).diam();
  const double eta = std::pow(system.constants().xi, 9.0 * h);
  const double base = std::pow(d, h);
  return {base / eta, base * eta};
}

MoranCover moran_cover(const System& system, double r) {
  if (!(r > 0.0 && r < 1.0))
    throw InputError("Moran radius must lie in (0, 1), got " + std::to_string(r));
  MoranCover cover;
  cover.r = r;
  const int N = system.alphabet();
  const double floor_bound =
      r / (system.constants().xi * system.constants().B);
  // Descend while diam > r; the first interval at or below r is emitted, so
  // its parent was still above r. The comparison carries a small relative
  // guard: folded endpoints leave ~1e-14 noise on diam, and a level-
  // homogeneous system probed exactly at a level diameter must emit the
  // whole level, not a noise-selected refinement of it.
  const double r_guard = r * (1.0 + 1e-11);
  auto descend = [&](auto&& self, const Word& word) -> void {
    for (int j = 1; j <= N; ++j) {
      const Word child = word.extended(j);
      BasicInterval interval = system.basic_interval(child);
      if (interval.diam() <= r_guard) {
        if (interval.diam() <= floor_bound * (1.0 - 1e-12))
          throw NumericError(
              "Moran element at word " + child.str(N) + " has diameter " +
              format_double(interval.diam()) +
              " below the bounded-distortion floor xi^-1 B^-1 r = " +
              format_double(floor_bound) + "; defining data look inconsistent");
        cover.elements.push_back(std::move(interval));
      } else {
        self(self, child);
      }
    }
  };
  descend(descend, Word{});
  return cover;
}

int ball_intersection_count(const MoranCover& cover, double x, double r) {
  int count = 0;
  for (const auto& e : cover.elements)
    if (e.hi >= x - r && e.lo <= x + r) ++count;
  return count;
}

long long moran_ball_bound(const System& system) {
  return static_cast<long long>(
      std::floor(4.0 * system.constants().xi * system.constants().B));
}

BoxCount box_count(const System& system, double r,
                   const DimensionEnclosure& enclosure) {
  const MoranCover cover = moran_cover(system, r);
  const double h = enclosure.h_hi;
  const double xi = system.constants().xi;
  const double B = system.constants().B;
  BoxCount out;
  out.r = r;
  out.count = cover.elements.size();
  out.certified_upper =
      std::pow(xi, 9.0 * h) * std::pow(xi * B, h) * std::pow(r, -h);
  return out;
}

BoxDimFit boxdim_regress(const System& system, const std::vector<double>& radii,
                         const DimensionEnclosure& enclosure) {
  if (radii.size() < 4)
    throw InputError("box-dimension regression needs at least 4 radii, got " +
                     std::to_string(radii.size()));
  double r_min = 1.0, r_max = 0.0;
  for (double r : radii) {
    if (!(r > 0.0 && r < 1.0))
      throw InputError("regression radius must lie in (0, 1), got " +
                       std::to_string(r));
    r_min = std::min(r_min, r);
    r_max = std::max(r_max, r);
  }
  if (r_max / r_min < 100.0)
    throw InputError("regression radii must span at least two decades");

  BoxDimFit fit;
  fit.points.reserve(radii.size());
  std::vector<double> xs, ys;
  for (double r : radii) {
    BoxCount bc = box_count(system, r, enclosure);
    xs.push_back(-std::log(r));
    ys.push_back(std::log(static_cast<double>(bc.count)));
    fit.points.push_back(bc);
  }
  const double m = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mean_x = sx / m, mean_y = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += resid * resid;
  }
  fit.stderr_slope = std::sqrt(std::max(0.0, sse / (m - 2.0)) / sxx);
  return fit;
}

CertifiedBounds certified_bounds(const System& system,
                                 const DimensionEnclosure& enclosure) {
  const double xi = system.constants().xi;
  const double B = system.constants().B;
  CertifiedBounds out;
  out.h_lo = enclosure.h_lo;
  out.h_hi = enclosure.h_hi;
  out.M = moran_ball_bound(system);
  const double h = enclosure.h_hi;
  const double eta = std::pow(xi, 9.0 * h);
  out.hausdorff_lower = 1.0 / (eta * static_cast<double>(out.M));
  out.hausdorff_upper = std::pow(xi, 3.0 * h);
  out.packing_upper =
      std::pow(2.0, h) * eta * std::pow(xi, h) * std::pow(B, h);
  out.certified = enclosure.certified;
  return out;
}

}  // namespace ccdim
