#include "ccdim/pressure.hpp"

#include <cmath>

#include "ccdim/numeric.hpp"
#include "ccdim/parallel.hpp"

namespace ccdim {

namespace {

constexpr std::uint64_t kCacheCap = std::uint64_t{1} << 22;

void check_depth(int depth) {
  if (depth < 1)
    throw InputError("depth must be >= 1, got " + std::to_string(depth));
}

void check_t(double t) {
  if (!(t >= 0.0))
    throw InputError("t < 0 is unsupported (the dimension is positive)");
}

void check_alignment(const System& system, int depth) {
  const Schedule& sched = system.schedule();
  if (sched.kind == ScheduleKind::Constant) return;
  const int q = sched.cycle_length();
  if (depth % q != 0)
    throw InputError("depth " + std::to_string(depth) +
                     " must be a multiple of the schedule period " +
                     std::to_string(q) + " for a sound pressure bracket");
}

// Pressure work runs on the cycle subsystem when a prefix is present.
struct PressureSystem {
  System owned;
  const System* active;

  explicit PressureSystem(const System& system) {
    if (system.dimension_uses_cycle_only()) {
      owned = system.cycle_system();
      active = &owned;
    } else {
      active = &system;
    }
  }
};

struct RootBracket {
  double lo = 0.0;
  double hi = 0.0;
};

// f is continuous and convex with f(a) >= 0 > f(b); keeps the sign
// invariant f(lo) >= 0 > f(hi), so lo never exceeds the root.
template <typename F>
RootBracket bisect_sign_change(F&& f, double a, double b, double tol) {
  int guard = 0;
  while (b - a > tol && ++guard <= 200) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (f(mid) >= 0.0) a = mid;
    else b = mid;
  }
  return {a, b};
}

}  // namespace

PartitionEvaluator::PartitionEvaluator(const System& system, int depth,
                                       int threads, bool cache)
    : system_(&system), depth_(depth), threads_(threads) {
  check_depth(depth);
  const int N = system.alphabet();
  int task_depth = 0;
  std::uint64_t tasks = 1;
  while (task_depth < depth && tasks < 32) {
    tasks *= static_cast<std::uint64_t>(N);
    ++task_depth;
  }
  task_depth_ = task_depth;
  task_prefixes_.reserve(tasks);
  for_each_word(N, task_depth_,
                [&](const Word& w) { task_prefixes_.push_back(w); });

  if (cache && level_size(N, depth) <= kCacheCap) {
    cached_diams_.resize(task_prefixes_.size());
    const int suffix = depth_ - task_depth_;
    run_tasks(task_prefixes_.size(), threads_, [&](std::size_t i) {
      auto& slot = cached_diams_[i];
      slot.reserve(static_cast<std::size_t>(level_size(N, suffix)));
      for_each_extension(task_prefixes_[i], N, suffix, [&](const Word& w) {
        slot.push_back(system_->word_diam(w.letters()));
      });
    });
  }
}

double PartitionEvaluator::sum_pow(double t) const {
  check_t(t);
  const int N = system_->alphabet();
  const int suffix = depth_ - task_depth_;
  std::vector<double> partials(task_prefixes_.size(), 0.0);
  run_tasks(task_prefixes_.size(), threads_, [&](std::size_t i) {
    KahanSum acc;
    if (!cached_diams_.empty()) {
      for (double d : cached_diams_[i]) acc.add(std::pow(d, t));
    } else {
      for_each_extension(task_prefixes_[i], N, suffix, [&](const Word& w) {
        acc.add(std::pow(system_->word_diam(w.letters()), t));
      });
    }
    partials[i] = acc.value();
  });
  KahanSum total;
  for (double p : partials) total.add(p);
  return total.value();
}

double PartitionEvaluator::log_sum(double t) const {
  const double sum = sum_pow(t);
  // Z_n(t) is a sum of positives; zero can only mean floating underflow,
  // which happens when a bracket search is pushed to absurd t.
  if (!(sum > 0.0))
    throw NumericError("partition sum Z_" + std::to_string(depth_) +
                       "(t) underflowed at t = " + std::to_string(t) +
                       "; defining data look inconsistent");
  return std::log(sum);
}

double partition_log_sum(const System& system, int depth, double t,
                         int threads) {
  return PartitionEvaluator(system, depth, threads).log_sum(t);
}

int aligned_depth(const System& system, int requested) {
  check_depth(requested);
  const System* S = &system;
  System owned;
  if (system.dimension_uses_cycle_only()) {
    owned = system.cycle_system();
    S = &owned;
  }
  if (S->schedule().kind == ScheduleKind::Constant) return requested;
  const int q = S->schedule().cycle_length();
  return ((requested + q - 1) / q) * q;
}

PressureBracket pressure_bracket(const System& system, int depth, double t,
                                 int threads) {
  check_depth(depth);
  check_t(t);
  PressureSystem ps(system);
  check_alignment(*ps.active, depth);
  PartitionEvaluator ev(*ps.active, depth, threads);
  PressureBracket out;
  out.depth = depth;
  out.t = t;
  out.logZ = ev.log_sum(t);
  const double spread = 3.0 * t * std::log(ps.active->constants().xi);
  out.L = (out.logZ - spread) / depth;
  out.U = (out.logZ + spread) / depth;
  return out;
}

DimensionEnclosure dimension_enclosure(const System& system, int depth,
                                       double tol, int threads) {
  check_depth(depth);
  if (!(tol > 0.0)) throw InputError("bisection tolerance must be positive");
  PressureSystem ps(system);
  const System& S = *ps.active;
  check_alignment(S, depth);
  PartitionEvaluator ev(S, depth, threads, /*cache=*/true);

  const double lnxi = std::log(S.constants().xi);
  const double n = depth;
  auto lower_bound = [&](double t) { return (ev.log_sum(t) - 3.0 * t * lnxi) / n; };
  auto upper_bound = [&](double t) { return (ev.log_sum(t) + 3.0 * t * lnxi) / n; };

  // P(0) = log N > 0; log N / log b bounds the zero for the exact pressure,
  // and doubling covers the bracket slack.
  double T = std::log(static_cast<double>(S.alphabet())) /
             std::log(S.constants().b);
  int doublings = 0;
  while (upper_bound(T) >= 0.0) {
    T *= 2.0;
    if (++doublings > 60)
      throw NumericError(
          "failed to bracket the zero of the upper pressure bound after 60 "
          "doublings; defining data look inconsistent");
  }

  const RootBracket upper = bisect_sign_change(upper_bound, 0.0, T, tol);
  const RootBracket lower = bisect_sign_change(lower_bound, 0.0, T, tol);

  DimensionEnclosure out;
  out.h_lo = lower.lo;
  out.h_hi = upper.hi;
  out.depth = depth;
  out.tol = tol;
  out.xi = S.constants().xi;
  out.width_bound =
      6.0 * out.h_hi * lnxi / (n * std::log(S.constants().b));
  out.certified = S.constants().certified;
  out.xi_emp = S.empirical_xi(std::max(2, std::min(depth, 10)), 2000);
  return out;
}

std::vector<PressureBracket> pressure_curve(const System& system, int depth,
                                            const std::vector<double>& t_grid,
                                            int threads) {
  check_depth(depth);
  PressureSystem ps(system);
  check_alignment(*ps.active, depth);
  PartitionEvaluator ev(*ps.active, depth, threads, t_grid.size() > 2);
  const double lnxi = std::log(ps.active->constants().xi);
  std::vector<PressureBracket> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    check_t(t);
    PressureBracket row;
    row.depth = depth;
    row.t = t;
    row.logZ = ev.log_sum(t);
    const double spread = 3.0 * t * lnxi;
    row.L = (row.logZ - spread) / depth;
    row.U = (row.logZ + spread) / depth;
    out.push_back(row);
  }
  return out;
}

CorollaryCheck corollary_check(const System& system, int depth,
                               const DimensionEnclosure& enclosure,
                               int threads) {
  check_depth(depth);
  PressureSystem ps(system);
  const System& S = *ps.active;
  check_alignment(S, depth);
  PartitionEvaluator ev(S, depth, threads, /*cache=*/true);
  const double xi = S.constants().xi;
  auto probe = [&](double t) {
    CorollaryCheck::Probe p;
    p.t = t;
    p.sum = ev.sum_pow(t);
    p.lower = std::pow(xi, -3.0 * t);
    p.upper = std::pow(xi, 3.0 * t);
    // Slack covers the bisection residue mapped through log Z.
    p.pass = p.sum >= p.lower * (1.0 - 1e-9) && p.sum <= p.upper * (1.0 + 1e-9);
    return p;
  };
  CorollaryCheck out;
  out.at_h_lo = probe(enclosure.h_lo);
  out.at_mid = probe(enclosure.midpoint());
  out.at_h_hi = probe(enclosure.h_hi);
  out.ok = out.at_h_lo.pass && out.at_mid.pass && out.at_h_hi.pass;
  return out;
}

}  // namespace ccdim
