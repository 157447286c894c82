#include "ccdim/system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ccdim {

namespace {

using nlohmann::json;

constexpr int kDerivGridPoints = 4097;
constexpr int kHolderPairs = 10000;
constexpr double kGapTolerance = 1e-12;
constexpr double kEndpointTolerance = 1e-9;

double to_original(double rlo, double rw, double x) { return rlo + rw * x; }

double spec_value(const BranchSpec& spec, double rlo, double rw, double x);

double forward_eval(const ForwardBranch& br, double rlo, double rw, double y) {
  return (br.f.eval(to_original(rlo, rw, y)) - rlo) / rw;
}

double forward_deriv(const ForwardBranch& br, double rlo, double rw, double y) {
  return br.df.eval(to_original(rlo, rw, y));
}

// Solves f(y) = x on the branch domain: bisection to width 1e-14, then two
// Newton polish steps. Bisection is unconditionally safe for the audited
// monotone branch; Newton restores the last digits.
double invert_forward(const ForwardBranch& br, double rlo, double rw, double x) {
  double a = br.lo, b = br.hi;
  double fa = forward_eval(br, rlo, rw, a) - x;
  double fb = forward_eval(br, rlo, rw, b) - x;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) {
    if (std::fabs(fa) <= kEndpointTolerance) return a;
    if (std::fabs(fb) <= kEndpointTolerance) return b;
    throw NumericError("forward branch does not bracket a preimage of x = " +
                       std::to_string(x) + " (non-monotone f?)");
  }
  int guard = 0;
  while (b - a > 1e-14) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = forward_eval(br, rlo, rw, mid) - x;
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
    if (++guard > 200)
      throw NumericError("forward-branch bisection failed to converge");
  }
  double y = 0.5 * (a + b);
  for (int i = 0; i < 2; ++i) {
    const double d = forward_deriv(br, rlo, rw, y);
    if (d == 0.0)
      throw NumericError("f'(y) = 0 encountered while inverting a forward branch");
    y -= (forward_eval(br, rlo, rw, y) - x) / d;
    y = std::clamp(y, br.lo, br.hi);
  }
  return y;
}

double spec_value(const BranchSpec& spec, double rlo, double rw, double x) {
  if (const auto* aff = std::get_if<AffineBranch>(&spec))
    return aff->a + aff->r * x;
  if (const auto* inv = std::get_if<InverseBranch>(&spec))
    return (inv->phi.eval(to_original(rlo, rw, x)) - rlo) / rw;
  const auto& fwd = std::get<ForwardBranch>(spec);
  return invert_forward(fwd, rlo, rw, x);
}

double spec_deriv(const BranchSpec& spec, double rlo, double rw, double x) {
  if (const auto* aff = std::get_if<AffineBranch>(&spec)) return aff->r;
  if (const auto* inv = std::get_if<InverseBranch>(&spec))
    return inv->dphi.eval(to_original(rlo, rw, x));
  const auto& fwd = std::get<ForwardBranch>(spec);
  const double y = invert_forward(fwd, rlo, rw, x);
  const double d = forward_deriv(fwd, rlo, rw, y);
  if (d == 0.0)
    throw NumericError("f'(phi(x)) = 0 encountered (violates bounded expansion)");
  return 1.0 / d;
}

// |f'| extremes plus strict-monotonicity screen over a 4097-point grid.
// For explicit-inverse branches the grid runs over x in J and uses
// |f'(phi(x))| = 1/|phi'(x)|.
struct BranchDerivStats {
  double min_fprime;
  double max_fprime;
};

BranchDerivStats grid_audit_branch(const BranchSpec& spec, double rlo, double rw,
                                   const std::string& label) {
  double min_fp = std::numeric_limits<double>::infinity();
  double max_fp = 0.0;
  if (const auto* aff = std::get_if<AffineBranch>(&spec)) {
    const double fp = 1.0 / std::fabs(aff->r);
    return {fp, fp};
  }
  const auto* inv = std::get_if<InverseBranch>(&spec);
  const auto* fwd = std::get_if<ForwardBranch>(&spec);
  const double lo = inv ? 0.0 : fwd->lo;
  const double hi = inv ? 1.0 : fwd->hi;
  double prev_value = 0.0;
  int direction = 0;
  for (int i = 0; i < kDerivGridPoints; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(kDerivGridPoints - 1);
    double value, fprime;
    if (inv) {
      value = spec_value(spec, rlo, rw, x);
      const double dphi = inv->dphi.eval(to_original(rlo, rw, x));
      if (std::fabs(dphi) >= 1.0)
        throw InputError(label + ": not uniformly contracting, |phi'(" +
                         std::to_string(x) + ")| = " + std::to_string(std::fabs(dphi)));
      if (dphi == 0.0)
        throw InputError(label + ": phi'(" + std::to_string(x) +
                         ") = 0 (unbounded expansion)");
      fprime = 1.0 / std::fabs(dphi);
    } else {
      value = forward_eval(*fwd, rlo, rw, x);
      fprime = std::fabs(forward_deriv(*fwd, rlo, rw, x));
      if (fprime <= 1.0)
        throw InputError(label + ": expansion violation, |f'(" +
                         std::to_string(x) + ")| = " + std::to_string(fprime));
    }
    if (i > 0) {
      const double step = value - prev_value;
      const int dir = step > 0.0 ? 1 : step < 0.0 ? -1 : 0;
      if (dir == 0 || (direction != 0 && dir != direction))
        throw InputError(label + ": not strictly monotone near x = " +
                         std::to_string(x));
      direction = dir;
    }
    prev_value = value;
    min_fp = std::min(min_fp, fprime);
    max_fp = std::max(max_fp, fprime);
  }
  if (min_fp <= 1.0)
    throw InputError(label + ": expansion violation, sampled inf |f'| = " +
                     std::to_string(min_fp));
  return {min_fp, max_fp};
}

// Samples the Holder quotient |f'(u) - f'(v)| / |u - v|^gamma of f' over the
// branch domain. For explicit inverses u = phi(x), v = phi(y) with x, y in J.
double holder_audit_branch(const BranchSpec& spec, double rlo, double rw,
                           double gamma, std::mt19937_64& rng) {
  if (std::holds_alternative<AffineBranch>(spec)) return 0.0;
  const auto* inv = std::get_if<InverseBranch>(&spec);
  const auto* fwd = std::get_if<ForwardBranch>(&spec);
  const double lo = inv ? 0.0 : fwd->lo;
  const double hi = inv ? 1.0 : fwd->hi;
  std::uniform_real_distribution<double> unif(lo, hi);
  double worst = 0.0;
  for (int i = 0; i < kHolderPairs; ++i) {
    const double x = unif(rng);
    const double y = unif(rng);
    double u, v, fpu, fpv;
    if (inv) {
      u = spec_value(spec, rlo, rw, x);
      v = spec_value(spec, rlo, rw, y);
      fpu = 1.0 / inv->dphi.eval(to_original(rlo, rw, x));
      fpv = 1.0 / inv->dphi.eval(to_original(rlo, rw, y));
    } else {
      u = x;
      v = y;
      fpu = forward_deriv(*fwd, rlo, rw, x);
      fpv = forward_deriv(*fwd, rlo, rw, y);
    }
    const double dist = std::fabs(u - v);
    if (dist < 1e-13) continue;
    const double quotient = std::fabs(fpu - fpv) / std::pow(dist, gamma);
    worst = std::max(worst, quotient);
  }
  return worst;
}

bool stage_all_affine(const Stage& stage) {
  return std::all_of(stage.branches.begin(), stage.branches.end(),
                     [](const BranchSpec& b) {
                       return std::holds_alternative<AffineBranch>(b);
                     });
}

bool stage_certified(const Stage& stage) {
  if (stage_all_affine(stage)) return true;
  return stage.holder.supplied && stage.holder.certified && stage.b_supplied &&
         stage.B_supplied;
}

SystemConstants compute_constants(const std::vector<Stage>& stages,
                                  const std::set<int>& used) {
  SystemConstants k;
  k.b = std::numeric_limits<double>::infinity();
  k.B = 0.0;
  k.c = 0.0;
  k.gamma = 1.0;
  k.certified = true;
  for (int idx : used) {
    const Stage& st = stages[static_cast<std::size_t>(idx)];
    k.b = std::min(k.b, st.b);
    k.B = std::max(k.B, st.B);
    k.c = std::max(k.c, st.holder.c);
    k.gamma = std::min(k.gamma, st.holder.gamma);
    k.certified = k.certified && stage_certified(st);
  }
  k.xi = distortion_constant(k.c, k.b, k.gamma);
  return k;
}

double json_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw InputError(where + ": missing or non-numeric field \"" + key + "\"");
  return j[key].get<double>();
}

MapExpr parse_expr_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string())
    throw InputError(where + ": missing or non-string field \"" + key + "\"");
  try {
    return MapExpr::parse(j[key].get<std::string>());
  } catch (const ParseError& e) {
    throw InputError(where + ": bad expression in \"" + key + "\": " + e.what());
  }
}

}  // namespace

double distortion_constant(double c, double b, double gamma) {
  if (!(b > 1.0))
    throw InputError("distortion constant requires b > 1, got b = " +
                     std::to_string(b));
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw InputError("Holder exponent must lie in (0, 1], got " +
                     std::to_string(gamma));
  if (c < 0.0)
    throw InputError("Holder constant must be nonnegative, got " +
                     std::to_string(c));
  return std::exp(c / (std::pow(b, gamma) - 1.0));
}

int Schedule::stage_index(long k) const {
  if (k < 1)
    throw InputError("stage position must be >= 1, got " + std::to_string(k));
  switch (kind) {
    case ScheduleKind::Constant:
      return cycle[0];
    case ScheduleKind::Periodic:
      return cycle[static_cast<std::size_t>((k - 1) % cycle_length())];
    case ScheduleKind::PrefixPeriodic: {
      const long m = prefix_length();
      if (k <= m) return prefix[static_cast<std::size_t>(k - 1)];
      return cycle[static_cast<std::size_t>((k - 1 - m) % cycle_length())];
    }
  }
  throw InputError("invalid schedule kind");
}

std::string Schedule::describe() const {
  switch (kind) {
    case ScheduleKind::Constant:
      return "constant";
    case ScheduleKind::Periodic:
      return "periodic(p=" + std::to_string(cycle_length()) + ")";
    case ScheduleKind::PrefixPeriodic:
      return "prefix(" + std::to_string(prefix_length()) + ")+cycle(" +
             std::to_string(cycle_length()) + ")";
  }
  return "?";
}

int AddressSpec::letter_at(int i) const {
  if (i < prefix.length()) return prefix.letter(i);
  if (cycle.empty())
    throw InputError("address needs a nonempty cycle beyond its prefix");
  return cycle.letter((i - prefix.length()) % cycle.length());
}

Word AddressSpec::head(int n) const {
  std::vector<int> letters;
  letters.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) letters.push_back(letter_at(i));
  return Word(std::move(letters));
}

const Stage& System::stage_at(long k) const {
  return stages_[static_cast<std::size_t>(schedule_.stage_index(k))];
}

double System::branch_value(long k, int j, double x) const {
  const Stage& st = stage_at(k);
  if (j < 1 || j > alphabet_)
    throw InputError("branch index " + std::to_string(j) + " outside 1.." +
                     std::to_string(alphabet_));
  return spec_value(st.branches[static_cast<std::size_t>(j - 1)], rescale_lo_,
                    rescale_w_, x);
}

double System::branch_deriv(long k, int j, double x) const {
  const Stage& st = stage_at(k);
  if (j < 1 || j > alphabet_)
    throw InputError("branch index " + std::to_string(j) + " outside 1.." +
                     std::to_string(alphabet_));
  return spec_deriv(st.branches[static_cast<std::size_t>(j - 1)], rescale_lo_,
                    rescale_w_, x);
}

BasicInterval System::basic_interval(const Word& word) const {
  if (word.empty())
    throw InputError("basic_interval requires a nonempty word");
  return block_interval(1, word);
}

BasicInterval System::block_interval(long start_stage, const Word& word) const {
  double p = 0.0, q = 1.0;
  for (int i = word.length() - 1; i >= 0; --i) {
    const long k = start_stage + i;
    const Stage& st = stage_at(k);
    const int j = word.letter(i);
    if (j < 1 || j > alphabet_)
      throw InputError("word letter " + std::to_string(j) + " outside 1.." +
                       std::to_string(alphabet_));
    const BranchSpec& spec = st.branches[static_cast<std::size_t>(j - 1)];
    p = spec_value(spec, rescale_lo_, rescale_w_, p);
    q = spec_value(spec, rescale_lo_, rescale_w_, q);
  }
  BasicInterval out;
  out.word = word;
  out.lo = std::min(p, q);
  out.hi = std::max(p, q);
  return out;
}

double System::word_diam(std::span<const int> letters) const {
  double p = 0.0, q = 1.0;
  for (std::size_t i = letters.size(); i-- > 0;) {
    const Stage& st = stage_at(static_cast<long>(i) + 1);
    const BranchSpec& spec =
        st.branches[static_cast<std::size_t>(letters[i] - 1)];
    p = spec_value(spec, rescale_lo_, rescale_w_, p);
    q = spec_value(spec, rescale_lo_, rescale_w_, q);
  }
  return std::fabs(q - p);
}

double System::composed_deriv(const Word& word, double x) const {
  double y = x;
  double deriv = 1.0;
  for (int i = word.length() - 1; i >= 0; --i) {
    deriv *= branch_deriv(i + 1, word.letter(i), y);
    y = branch_value(i + 1, word.letter(i), y);
  }
  return deriv;
}

double System::empirical_xi(int depth, int samples, std::uint64_t seed) const {
  if (depth < 2)
    throw InputError("empirical_xi needs depth >= 2, got " + std::to_string(depth));
  if (samples < 1)
    throw InputError("empirical_xi needs at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> letter(1, alphabet_);
  double worst = 1.0;
  for (int s = 0; s < samples; ++s) {
    std::uniform_int_distribution<int> len_sigma(1, depth - 1);
    const int ls = len_sigma(rng);
    std::uniform_int_distribution<int> len_tau(1, depth - ls);
    const int lt = len_tau(rng);
    std::vector<int> letters(static_cast<std::size_t>(ls + lt));
    for (auto& l : letters) l = letter(rng);
    const Word sigma_tau{letters};
    const Word sigma = sigma_tau.truncated(ls);
    const Word tau{std::vector<int>(letters.begin() + ls, letters.end())};
    const double d_sigma = basic_interval(sigma).diam();
    const double d_tau = block_interval(ls + 1, tau).diam();
    const double d_cat = basic_interval(sigma_tau).diam();
    const double ratio = d_cat / (d_sigma * d_tau);
    worst = std::max(worst, std::max(ratio, 1.0 / ratio));
  }
  return worst;
}

System System::cycle_system() const {
  System out = *this;
  out.schedule_.kind = schedule_.cycle_length() == 1 ? ScheduleKind::Constant
                                                     : ScheduleKind::Periodic;
  out.schedule_.prefix.clear();
  out.schedule_.cycle = schedule_.cycle;
  std::set<int> used(schedule_.cycle.begin(), schedule_.cycle.end());
  out.constants_ = compute_constants(stages_, used);
  return out;
}

StageAudit audit_stage(const Stage& stage, double rescale_lo, double rescale_w,
                       std::uint64_t seed) {
  StageAudit audit;
  audit.b = std::numeric_limits<double>::infinity();
  audit.B = 0.0;
  std::mt19937_64 rng(seed);
  for (std::size_t j = 0; j < stage.branches.size(); ++j) {
    const auto stats = grid_audit_branch(stage.branches[j], rescale_lo, rescale_w,
                                         "branch " + std::to_string(j + 1));
    audit.b = std::min(audit.b, stats.min_fprime);
    audit.B = std::max(audit.B, stats.max_fprime);
    audit.c_est = std::max(
        audit.c_est, holder_audit_branch(stage.branches[j], rescale_lo, rescale_w,
                                         stage.holder.gamma, rng));
  }
  if (stage.holder.supplied)
    audit.holder_ok = audit.c_est <= stage.holder.c * (1.0 + 1e-9) + 1e-12;
  return audit;
}

BasicInterval code_point(const System& system, const AddressSpec& address,
                         int depth) {
  if (depth < 1)
    throw InputError("code_point needs depth >= 1, got " + std::to_string(depth));
  return system.basic_interval(address.head(depth));
}

System load_system_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config root must be a JSON object");

  System sys;

  double ilo = 0.0, ihi = 1.0;
  if (j.contains("interval")) {
    const auto& iv = j["interval"];
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
      throw InputError("\"interval\" must be an array of two numbers");
    ilo = iv[0].get<double>();
    ihi = iv[1].get<double>();
    if (!(ilo < ihi)) throw InputError("\"interval\" must satisfy lo < hi");
  }
  sys.original_ = {ilo, ihi};
  sys.rescale_lo_ = ilo;
  sys.rescale_w_ = ihi - ilo;

  if (!j.contains("stages") || !j["stages"].is_array() || j["stages"].empty())
    throw InputError("config needs a nonempty \"stages\" array");

  int alphabet = 0;
  for (std::size_t s = 0; s < j["stages"].size(); ++s) {
    const auto& js = j["stages"][s];
    const std::string where = "stage " + std::to_string(s);
    if (!js.is_object() || !js.contains("branches") || !js["branches"].is_array())
      throw InputError(where + ": needs a \"branches\" array");
    Stage stage;
    for (std::size_t bidx = 0; bidx < js["branches"].size(); ++bidx) {
      const auto& jb = js["branches"][bidx];
      const std::string bwhere = where + " branch " + std::to_string(bidx + 1);
      if (!jb.is_object() || !jb.contains("mode") || !jb["mode"].is_string())
        throw InputError(bwhere + ": needs a \"mode\" string");
      const std::string mode = jb["mode"].get<std::string>();
      if (mode == "affine") {
        AffineBranch br;
        const double a = json_number(jb, "a", bwhere);
        br.r = json_number(jb, "r", bwhere);
        if (!(std::fabs(br.r) > 0.0 && std::fabs(br.r) < 1.0))
          throw InputError(bwhere + ": affine ratio must satisfy 0 < |r| < 1");
        br.a = (a + (br.r - 1.0) * ilo) / sys.rescale_w_;
        stage.branches.emplace_back(br);
      } else if (mode == "explicit_inverse") {
        InverseBranch br;
        br.phi = parse_expr_field(jb, "phi", bwhere);
        br.dphi = br.phi.derivative();
        stage.branches.emplace_back(std::move(br));
      } else if (mode == "forward_branch") {
        ForwardBranch br;
        br.f = parse_expr_field(jb, "f", bwhere);
        br.df = br.f.derivative();
        if (!jb.contains("domain") || !jb["domain"].is_array() ||
            jb["domain"].size() != 2)
          throw InputError(bwhere + ": needs \"domain\": [u, v]");
        const double u = jb["domain"][0].get<double>();
        const double v = jb["domain"][1].get<double>();
        if (!(u < v)) throw InputError(bwhere + ": domain must satisfy u < v");
        br.lo = (u - ilo) / sys.rescale_w_;
        br.hi = (v - ilo) / sys.rescale_w_;
        if (br.lo < -kEndpointTolerance || br.hi > 1.0 + kEndpointTolerance)
          throw InputError(bwhere + ": domain escapes the interval J");
        stage.branches.emplace_back(std::move(br));
      } else {
        throw InputError(bwhere + ": unknown mode \"" + mode + "\"");
      }
    }
    const int n = static_cast<int>(stage.branches.size());
    if (n < 2) throw InputError(where + ": needs at least two branches");
    if (alphabet == 0) alphabet = n;
    else if (n != alphabet)
      throw InputError(where + ": has " + std::to_string(n) +
                       " branches but earlier stages have " +
                       std::to_string(alphabet));

    if (js.contains("holder")) {
      const auto& jh = js["holder"];
      if (!jh.is_object()) throw InputError(where + ": \"holder\" must be an object");
      stage.holder.supplied = true;
      stage.holder.c = json_number(jh, "c", where + " holder");
      stage.holder.gamma = jh.contains("gamma")
                               ? json_number(jh, "gamma", where + " holder")
                               : 1.0;
      stage.holder.certified = jh.value("certified", false);
      if (stage.holder.c < 0.0)
        throw InputError(where + ": Holder constant c must be >= 0");
      if (!(stage.holder.gamma > 0.0 && stage.holder.gamma <= 1.0))
        throw InputError(where + ": Holder exponent gamma must lie in (0, 1]");
      // Supplied constants refer to original coordinates; rescale to J = [0,1].
      stage.holder.c *= std::pow(sys.rescale_w_, stage.holder.gamma);
    }

    // Branch images, normalized. Forward branches own their domain.
    for (const auto& spec : stage.branches) {
      double lo, hi;
      if (const auto* fwd = std::get_if<ForwardBranch>(&spec)) {
        lo = fwd->lo;
        hi = fwd->hi;
        const double f_lo = forward_eval(*fwd, ilo, sys.rescale_w_, fwd->lo);
        const double f_hi = forward_eval(*fwd, ilo, sys.rescale_w_, fwd->hi);
        const double end_a = std::min(f_lo, f_hi);
        const double end_b = std::max(f_lo, f_hi);
        if (std::fabs(end_a) > kEndpointTolerance ||
            std::fabs(end_b - 1.0) > kEndpointTolerance)
          throw InputError(where + ": forward branch image [" +
                           std::to_string(end_a) + ", " + std::to_string(end_b) +
                           "] does not cover J to 1e-9");
      } else {
        const double v0 = spec_value(spec, ilo, sys.rescale_w_, 0.0);
        const double v1 = spec_value(spec, ilo, sys.rescale_w_, 1.0);
        lo = std::min(v0, v1);
        hi = std::max(v0, v1);
      }
      if (lo < -kEndpointTolerance || hi > 1.0 + kEndpointTolerance)
        throw InputError(where + ": branch image [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "] escapes the interval J");
      stage.images.emplace_back(lo, hi);
    }

    // Net property (ii) needs genuine gaps between branch images.
    std::vector<std::pair<double, double>> sorted = stage.images;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      if (sorted[i + 1].first - sorted[i].second < kGapTolerance)
        throw InputError(where + ": branch images [" +
                         std::to_string(sorted[i].first) + ", " +
                         std::to_string(sorted[i].second) + "] and [" +
                         std::to_string(sorted[i + 1].first) + ", " +
                         std::to_string(sorted[i + 1].second) +
                         "] overlap or touch");
    }

    try {
      stage.audit = audit_stage(stage, ilo, sys.rescale_w_);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    if (stage.holder.supplied && !stage.audit.holder_ok)
      throw InputError(where + ": supplied Holder constant c = " +
                       std::to_string(stage.holder.c) +
                       " falsified by sampling (c_est = " +
                       std::to_string(stage.audit.c_est) + ")");
    if (!stage.holder.supplied) {
      stage.holder.c = stage.audit.c_est;
      if (stage_all_affine(stage)) {
        stage.holder.c = 0.0;  // derivative constant per branch, exactly
        stage.holder.certified = true;
      }
    }

    stage.b = stage.audit.b;
    stage.B = stage.audit.B;
    if (js.contains("b")) {
      stage.b = json_number(js, "b", where);
      stage.b_supplied = true;
      if (!(stage.b > 1.0))
        throw InputError(where + ": supplied b must be > 1");
      if (stage.b > stage.audit.b * (1.0 + 1e-9))
        throw InputError(where + ": supplied b = " + std::to_string(stage.b) +
                         " exceeds the sampled inf |f'| = " +
                         std::to_string(stage.audit.b));
    }
    if (js.contains("B")) {
      stage.B = json_number(js, "B", where);
      stage.B_supplied = true;
      if (stage.B < stage.audit.B * (1.0 - 1e-9))
        throw InputError(where + ": supplied B = " + std::to_string(stage.B) +
                         " is below the sampled sup |f'| = " +
                         std::to_string(stage.audit.B));
    }
    sys.stages_.push_back(std::move(stage));
  }
  sys.alphabet_ = alphabet;

  Schedule sched;
  if (j.contains("schedule")) {
    const auto& jsch = j["schedule"];
    if (!jsch.is_object() || !jsch.contains("kind") || !jsch["kind"].is_string())
      throw InputError("\"schedule\" needs a \"kind\" string");
    const std::string kind = jsch["kind"].get<std::string>();
    auto read_indices = [&](const char* key) {
      std::vector<int> out;
      if (!jsch.contains(key) || !jsch[key].is_array())
        throw InputError("schedule kind \"" + kind + "\" needs an array \"" +
                         key + "\"");
      for (const auto& e : jsch[key]) {
        if (!e.is_number_integer())
          throw InputError("schedule \"" + std::string(key) +
                           "\" must hold stage indices");
        const int idx = e.get<int>();
        if (idx < 0 || idx >= static_cast<int>(sys.stages_.size()))
          throw InputError("schedule stage index " + std::to_string(idx) +
                           " out of range");
        out.push_back(idx);
      }
      return out;
    };
    if (kind == "constant") {
      sched.kind = ScheduleKind::Constant;
      int idx = jsch.value("stage", 0);
      if (idx < 0 || idx >= static_cast<int>(sys.stages_.size()))
        throw InputError("schedule stage index " + std::to_string(idx) +
                         " out of range");
      sched.cycle = {idx};
    } else if (kind == "periodic") {
      sched.kind = ScheduleKind::Periodic;
      sched.cycle = read_indices("cycle");
      if (sched.cycle.empty()) throw InputError("periodic schedule has an empty cycle");
    } else if (kind == "prefix_periodic") {
      sched.kind = ScheduleKind::PrefixPeriodic;
      sched.prefix = read_indices("prefix");
      sched.cycle = read_indices("cycle");
      if (sched.cycle.empty())
        throw InputError("prefix_periodic schedule has an empty cycle");
    } else {
      throw InputError("unknown schedule kind \"" + kind + "\"");
    }
  } else {
    sched.kind = ScheduleKind::Constant;
    sched.cycle = {0};
  }
  sys.schedule_ = std::move(sched);

  std::set<int> used(sys.schedule_.cycle.begin(), sys.schedule_.cycle.end());
  used.insert(sys.schedule_.prefix.begin(), sys.schedule_.prefix.end());
  sys.constants_ = compute_constants(sys.stages_, used);
  return sys;
}

System load_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_system_text(buf.str());
}

}  // namespace ccdim
