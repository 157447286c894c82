#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ccdim/errors.hpp"
#include "ccdim/expr.hpp"
#include "ccdim/words.hpp"

namespace ccdim {

/// phi(x) = a + r*x with 0 < |r| < 1 (normalized coordinates).
struct AffineBranch {
  double a = 0.0;
  double r = 0.0;
};

/// Branch inverse given directly as an expression on J (original coordinates).
struct InverseBranch {
  MapExpr phi;
  MapExpr dphi;
};

/// Branch given by the forward map f (expression in original coordinates)
/// on the domain [lo, hi] (stored normalized); the inverse is recovered
/// numerically.
struct ForwardBranch {
  MapExpr f;
  MapExpr df;
  double lo = 0.0;
  double hi = 0.0;
};

using BranchSpec = std::variant<AffineBranch, InverseBranch, ForwardBranch>;

struct HolderData {
  double c = 0.0;
  double gamma = 1.0;
  bool certified = false;
  bool supplied = false;
};

/// Grid/sampling audit of one stage's defining data.
struct StageAudit {
  double b = 0.0;      // min over grid of |f'|
  double B = 0.0;      // max over grid of |f'|
  double c_est = 0.0;  // max sampled Holder quotient of f'
  bool holder_ok = true;
};

struct Stage {
  std::vector<BranchSpec> branches;
  std::vector<std::pair<double, double>> images;  // normalized, per branch
  HolderData holder;
  StageAudit audit;
  double b = 0.0;  // effective expansion bounds (supplied override or audit)
  double B = 0.0;
  bool b_supplied = false;
  bool B_supplied = false;
};

enum class ScheduleKind { Constant, Periodic, PrefixPeriodic };

/// Finite description of the stage sequence: stage_index(k) for k >= 1.
struct Schedule {
  ScheduleKind kind = ScheduleKind::Constant;
  std::vector<int> prefix;  // stage indices, PrefixPeriodic only
  std::vector<int> cycle;   // nonempty; Constant uses cycle = {i}

  int stage_index(long k) const;
  int cycle_length() const { return static_cast<int>(cycle.size()); }
  int prefix_length() const { return static_cast<int>(prefix.size()); }
  std::string describe() const;
};

/// Global constants over the schedule's distinct stages:
/// b = inf b_k, B = sup B_k, c = sup c_k, gamma = inf gamma_k,
/// xi = exp(c / (b^gamma - 1)).
struct SystemConstants {
  double b = 0.0;
  double B = 0.0;
  double c = 0.0;
  double gamma = 1.0;
  double xi = 1.0;
  bool certified = false;
};

struct BasicInterval {
  Word word;
  double lo = 0.0;
  double hi = 1.0;
  double diam() const { return hi - lo; }
};

double distortion_constant(double c, double b, double gamma);

/// Eventually periodic symbolic address: prefix then repeating cycle.
struct AddressSpec {
  Word prefix;
  Word cycle;

  int letter_at(int i) const;  // 0-based
  Word head(int n) const;
};

/// A validated cookie-cutter-like system, normalized to J = [0, 1].
/// Immutable after load; all evaluation is pure and thread-safe.
class System {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x5eedc0ffee123457ull;

  int alphabet() const { return alphabet_; }
  const Schedule& schedule() const { return schedule_; }
  const std::vector<Stage>& stages() const { return stages_; }
  const SystemConstants& constants() const { return constants_; }
  std::pair<double, double> original_interval() const { return original_; }

  const Stage& stage_at(long k) const;

  /// phi_{k,j}(x) for x in [0,1]; j is 1-based.
  double branch_value(long k, int j, double x) const;
  /// phi'_{k,j}(x), signed.
  double branch_deriv(long k, int j, double x) const;

  /// J_sigma, built by folding the branch chain right to left (innermost
  /// stage first). Requires a nonempty word.
  BasicInterval basic_interval(const Word& word) const;

  /// Like basic_interval but the first letter uses stage `start_stage`.
  /// Accepts the empty word (returns the whole space).
  BasicInterval block_interval(long start_stage, const Word& word) const;

  /// diam(J_sigma) from raw letters, for enumeration hot loops.
  double word_diam(std::span<const int> letters) const;

  /// Chain-rule product phi'_sigma(x), signed.
  double composed_deriv(const Word& word, double x) const;

  /// Worst sampled two-sided defect of |J_{sigma tau}| versus
  /// |J_sigma| * |J_tau|, where tau is built from the stages following
  /// sigma. Informational only; certified bounds always use xi^3.
  double empirical_xi(int depth, int samples,
                      std::uint64_t seed = kDefaultSeed) const;

  /// The periodic system spanned by the cycle stages alone (drops the
  /// prefix). A finite prefix of C^{1+gamma} stages does not change the
  /// dimension, so pressure work runs on this subsystem.
  System cycle_system() const;
  bool dimension_uses_cycle_only() const {
    return schedule_.kind == ScheduleKind::PrefixPeriodic;
  }

 private:
  friend System load_system_text(const std::string&);

  int alphabet_ = 0;
  std::vector<Stage> stages_;
  Schedule schedule_;
  SystemConstants constants_;
  std::pair<double, double> original_ = {0.0, 1.0};
  double rescale_lo_ = 0.0;  // original = rescale_lo_ + rescale_w_ * normalized
  double rescale_w_ = 1.0;
};

/// Parses and validates the JSON config (see README for the schema).
System load_system_text(const std::string& json_text);
System load_system_file(const std::string& path);

/// Re-runs the defining-data audit of a loaded stage (4097-point derivative
/// grid per branch, 10^4 random Holder pairs per branch).
StageAudit audit_stage(const Stage& stage, double rescale_lo, double rescale_w,
                       std::uint64_t seed = System::kDefaultSeed);

/// J_{sigma|_n} for the address's length-n prefix; nested in n.
BasicInterval code_point(const System& system, const AddressSpec& address,
                         int depth);

}  // namespace ccdim
