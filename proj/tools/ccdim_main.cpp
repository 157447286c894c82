#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ccdim/measure.hpp"
#include "ccdim/numeric.hpp"
#include "ccdim/parallel.hpp"
#include "ccdim/pressure.hpp"
#include "ccdim/system.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using ccdim::format_double;

struct GlobalOpts {
  std::string config;
  int threads = 0;
  bool no_banner = false;
  std::string out;
};

int resolve_thread_request(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("CCDIM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return ccdim::resolve_threads(0);
}

void print_banner(const GlobalOpts& opts) {
  if (opts.no_banner) return;
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::cout << "# ccdim " << kVersion << " - run at " << stamp << "\n";
}

// CSV goes to --out when given, stdout otherwise.
class CsvTarget {
 public:
  explicit CsvTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_)
        throw ccdim::InputError("cannot open output file \"" + path + "\"");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string certification_label(const ccdim::System& sys) {
  return sys.constants().certified ? "certified" : "sampled-constants";
}

void print_system_summary(const ccdim::System& sys, std::ostream& os) {
  const auto& k = sys.constants();
  const auto [ilo, ihi] = sys.original_interval();
  os << "system: N=" << sys.alphabet()
     << ", schedule=" << sys.schedule().describe() << ", interval=["
     << format_double(ilo) << ", " << format_double(ihi) << "]\n";
  for (std::size_t s = 0; s < sys.stages().size(); ++s) {
    const auto& st = sys.stages()[s];
    os << "stage " << s << ": b_k=" << format_double(st.b)
       << " B_k=" << format_double(st.B)
       << " c=" << format_double(st.holder.c)
       << " gamma=" << format_double(st.holder.gamma)
       << " c_est=" << format_double(st.audit.c_est)
       << " holder_ok=" << (st.audit.holder_ok ? "yes" : "no") << "\n";
  }
  os << "constants: b=" << format_double(k.b) << " B=" << format_double(k.B)
     << " c=" << format_double(k.c) << " gamma=" << format_double(k.gamma)
     << "\n";
  os << "xi = " << format_double(k.xi) << "\n";
}

int cmd_validate(const GlobalOpts& opts, bool as_json) {
  const ccdim::System sys = ccdim::load_system_file(opts.config);
  const double xi_emp = sys.empirical_xi(8, 2000);
  if (as_json) {
    nlohmann::json j;
    j["N"] = sys.alphabet();
    j["schedule"] = sys.schedule().describe();
    j["b"] = sys.constants().b;
    j["B"] = sys.constants().B;
    j["c"] = sys.constants().c;
    j["gamma"] = sys.constants().gamma;
    j["xi"] = sys.constants().xi;
    j["xi_emp"] = xi_emp;
    j["certification"] = certification_label(sys);
    std::cout << j.dump(2) << "\n";
  } else {
    print_system_summary(sys, std::cout);
    std::cout << "xi_emp(depth 8, 2000 samples) = " << format_double(xi_emp)
              << "\n";
    std::cout << "certification: " << certification_label(sys) << "\n";
  }
  return 0;
}

int cmd_dim(const GlobalOpts& opts, int depth, double tol, bool as_json) {
  const ccdim::System sys = ccdim::load_system_file(opts.config);
  const int threads = resolve_thread_request(opts.threads);
  const int eff_depth = ccdim::aligned_depth(sys, depth);
  if (eff_depth != depth)
    std::cerr << "note: depth rounded up to " << eff_depth
              << " to align with the schedule period\n";
  const auto t0 = std::chrono::steady_clock::now();
  const ccdim::DimensionEnclosure enc =
      ccdim::dimension_enclosure(sys, eff_depth, tol, threads);
  const ccdim::CorollaryCheck check =
      ccdim::corollary_check(sys, eff_depth, enc, threads);
  const ccdim::CertifiedBounds bounds = ccdim::certified_bounds(sys, enc);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  std::cerr << "wall time: " << ms << " ms\n";

  if (as_json) {
    nlohmann::json j;
    j["h_lo"] = enc.h_lo;
    j["h_hi"] = enc.h_hi;
    j["depth"] = enc.depth;
    j["xi"] = enc.xi;
    j["certified_width_bound"] = enc.width_bound;
    j["xi_emp"] = enc.xi_emp;
    j["tol"] = enc.tol;
    j["width"] = enc.width();
    j["midpoint_heuristic"] = enc.midpoint();
    j["corollary_ok"] = check.ok;
    j["M"] = bounds.M;
    j["hausdorff_lower"] = bounds.hausdorff_lower;
    j["hausdorff_upper"] = bounds.hausdorff_upper;
    j["packing_upper"] = bounds.packing_upper;
    j["certification"] = certification_label(sys);
    j["dimension_from_cycle_subsystem"] = sys.dimension_uses_cycle_only();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "h_lo = " << format_double(enc.h_lo) << "\n";
    std::cout << "h_hi = " << format_double(enc.h_hi) << "\n";
    std::cout << "width = " << format_double(enc.width())
              << " (certified bound " << format_double(enc.width_bound)
              << ", tol " << format_double(enc.tol) << ")\n";
    std::cout << "midpoint = " << format_double(enc.midpoint())
              << " (heuristic)\n";
    std::cout << "xi = " << format_double(enc.xi)
              << ", xi_emp = " << format_double(enc.xi_emp) << "\n";
    std::cout << "corollary check: " << (check.ok ? "PASS" : "FAIL") << " (sums "
              << format_double(check.at_h_lo.sum) << ", "
              << format_double(check.at_mid.sum) << ", "
              << format_double(check.at_h_hi.sum) << ")\n";
    std::cout << "M = " << bounds.M
              << ", hausdorff in [" << format_double(bounds.hausdorff_lower)
              << ", " << format_double(bounds.hausdorff_upper)
              << "], packing <= " << format_double(bounds.packing_upper) << "\n";
    if (sys.dimension_uses_cycle_only())
      std::cout << "note: pressure computed on the cycle subsystem (prefix is "
                   "dimension-neutral)\n";
    std::cout << "certification: " << certification_label(sys) << "\n";
  }
  return check.ok ? 0 : 1;
}

int cmd_pressure(const GlobalOpts& opts, double t_min, double t_max, int steps,
                 int depth) {
  const ccdim::System sys = ccdim::load_system_file(opts.config);
  const int threads = resolve_thread_request(opts.threads);
  if (steps < 1) throw ccdim::InputError("--steps must be >= 1");
  if (t_min < 0.0 || t_max < t_min)
    throw ccdim::InputError("need 0 <= t-min <= t-max");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    grid.push_back(steps == 1 ? t_min
                              : t_min + (t_max - t_min) * static_cast<double>(i) /
                                            static_cast<double>(steps - 1));
  const int eff_depth = ccdim::aligned_depth(sys, depth);
  if (eff_depth != depth)
    std::cerr << "note: depth rounded up to " << eff_depth
              << " to align with the schedule period\n";
  const auto rows = ccdim::pressure_curve(sys, eff_depth, grid, threads);
  CsvTarget target(opts.out);
  auto& os = target.stream();
  os << "t,logZ,L,U,midpoint\n";
  for (const auto& row : rows)
    os << format_double(row.t) << ',' << format_double(row.logZ) << ','
       << format_double(row.L) << ',' << format_double(row.U) << ','
       << format_double(row.midpoint()) << "\n";
  return 0;
}

int cmd_moran(const GlobalOpts& opts, double r) {
  const ccdim::System sys = ccdim::load_system_file(opts.config);
  const ccdim::MoranCover cover = ccdim::moran_cover(sys, r);
  CsvTarget target(opts.out);
  auto& os = target.stream();
  os << "word,lo,hi,diam\n";
  for (const auto& e : cover.elements)
    os << e.word.str(sys.alphabet()) << ',' << format_double(e.lo) << ','
       << format_double(e.hi) << ',' << format_double(e.diam()) << "\n";
  return 0;
}

int cmd_measure(const GlobalOpts& opts, const std::string& sigma_text,
                int stage, int depth, const std::string& h_which) {
  const ccdim::System sys = ccdim::load_system_file(opts.config);
  const int threads = resolve_thread_request(opts.threads);
  const ccdim::Word sigma = ccdim::Word::parse(sigma_text, sys.alphabet());
  const int eff_depth = ccdim::aligned_depth(sys, depth);
  const ccdim::DimensionEnclosure enc =
      ccdim::dimension_enclosure(sys, eff_depth, 1e-12, threads);
  double h;
  if (h_which == "mid") h = enc.midpoint();
  else if (h_which == "lo") h = enc.h_lo;
  else if (h_which == "hi") h = enc.h_hi;
  else throw ccdim::InputError("--h-which must be one of mid, lo, hi");
  const ccdim::MeasureEstimate est = ccdim::nu(sys, sigma, stage, h);
  // Sensitivity of nu to the unknown h across the enclosure (stderr so the
  // CSV stays clean).
  if (enc.width() > 0.0) {
    const double lo_v = ccdim::nu(sys, sigma, stage, enc.h_lo).value;
    const double hi_v = ccdim::nu(sys, sigma, stage, enc.h_hi).value;
    std::cerr << "h = " << format_double(h) << " (" << h_which
              << " of depth-" << eff_depth << " enclosure); nu(h_lo) = "
              << format_double(lo_v) << ", nu(h_hi) = " << format_double(hi_v)
              << "\n";
  } else {
    std::cerr << "h = " << format_double(h) << "\n";
  }
  CsvTarget target(opts.out);
  auto& os = target.stream();
  os << "word,nu,enclosure_lo,enclosure_hi\n";
  os << est.word.str(sys.alphabet()) << ',' << format_double(est.value) << ','
     << format_double(est.enclosure_lo) << ',' << format_double(est.enclosure_hi)
     << "\n";
  return 0;
}

int cmd_boxcount(const GlobalOpts& opts, double r_min, double r_max, int points,
                 int depth) {
  const ccdim::System sys = ccdim::load_system_file(opts.config);
  const int threads = resolve_thread_request(opts.threads);
  if (points < 2) throw ccdim::InputError("--points must be >= 2");
  if (!(r_min > 0.0 && r_min < r_max && r_max < 1.0))
    throw ccdim::InputError("need 0 < r-min < r-max < 1");
  const int eff_depth = ccdim::aligned_depth(sys, depth);
  const ccdim::DimensionEnclosure enc =
      ccdim::dimension_enclosure(sys, eff_depth, 1e-12, threads);
  CsvTarget target(opts.out);
  auto& os = target.stream();
  os << "r,count,certified_upper\n";
  const double log_max = std::log(r_max), log_min = std::log(r_min);
  for (int i = 0; i < points; ++i) {
    const double r = std::exp(log_max + (log_min - log_max) *
                                            static_cast<double>(i) /
                                            static_cast<double>(points - 1));
    const ccdim::BoxCount bc = ccdim::box_count(sys, r, enc);
    os << format_double(bc.r) << ',' << bc.count << ','
       << format_double(bc.certified_upper) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified dimension enclosures for cookie-cutter-like sets"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--threads", opts.threads,
                 "worker threads (0 = CCDIM_THREADS env or all cores)");
  app.add_flag("--no-banner", opts.no_banner, "suppress the timestamp banner");

  auto add_config = [&](CLI::App* sub) {
    sub->fallthrough();  // lets --threads / --no-banner follow the subcommand
    sub->add_option("config", opts.config, "system config (JSON)")->required();
  };

  bool json_validate = false, json_dim = false;
  int dim_depth = 10, pressure_depth = 10, measure_stage = 4, measure_depth = 10;
  int box_points = 8, box_depth = 10, pressure_steps = 11;
  double dim_tol = 1e-12, t_min = 0.0, t_max = 1.0, moran_r = 0.1;
  double box_rmin = 1e-4, box_rmax = 0.25;
  std::string measure_sigma = "-", measure_hwhich = "mid";

  CLI::App* validate = app.add_subcommand("validate", "check a config and print its defining data");
  add_config(validate);
  validate->add_flag("--json", json_validate, "emit JSON");

  CLI::App* dim = app.add_subcommand("dim", "certified dimension enclosure");
  add_config(dim);
  dim->add_option("--depth", dim_depth, "partition depth n");
  dim->add_option("--tol", dim_tol, "bisection tolerance");
  dim->add_flag("--json", json_dim, "emit JSON");

  CLI::App* pressure = app.add_subcommand("pressure", "pressure brackets over a t grid (CSV)");
  add_config(pressure);
  pressure->add_option("--t-min", t_min, "grid start");
  pressure->add_option("--t-max", t_max, "grid end");
  pressure->add_option("--steps", pressure_steps, "grid points");
  pressure->add_option("--depth", pressure_depth, "partition depth n");
  pressure->add_option("--out", opts.out, "CSV output file (default stdout)");

  CLI::App* moran = app.add_subcommand("moran", "r-Moran covering (CSV)");
  add_config(moran);
  moran->add_option("--r", moran_r, "cover radius in (0,1)")->required();
  moran->add_option("--out", opts.out, "CSV output file (default stdout)");

  CLI::App* measure = app.add_subcommand("measure", "finite-stage measure of a cylinder (CSV)");
  add_config(measure);
  measure->add_option("--sigma", measure_sigma, "cylinder word (digit string, \"-\" = whole space)");
  measure->add_option("--stage", measure_stage, "approximation stage n");
  measure->add_option("--depth", measure_depth, "enclosure depth used for h");
  measure->add_option("--h-which", measure_hwhich, "h to plug in: mid, lo, hi");
  measure->add_option("--out", opts.out, "CSV output file (default stdout)");

  CLI::App* boxcount = app.add_subcommand("boxcount", "box counts over a radius grid (CSV)");
  add_config(boxcount);
  boxcount->add_option("--r-min", box_rmin, "smallest radius");
  boxcount->add_option("--r-max", box_rmax, "largest radius");
  boxcount->add_option("--points", box_points, "number of radii (log-spaced)");
  boxcount->add_option("--depth", box_depth, "enclosure depth used for the bound");
  boxcount->add_option("--out", opts.out, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    print_banner(opts);
    if (app.got_subcommand(validate)) return cmd_validate(opts, json_validate);
    if (app.got_subcommand(dim)) return cmd_dim(opts, dim_depth, dim_tol, json_dim);
    if (app.got_subcommand(pressure))
      return cmd_pressure(opts, t_min, t_max, pressure_steps, pressure_depth);
    if (app.got_subcommand(moran)) return cmd_moran(opts, moran_r);
    if (app.got_subcommand(measure))
      return cmd_measure(opts, measure_sigma, measure_stage, measure_depth,
                         measure_hwhich);
    if (app.got_subcommand(boxcount))
      return cmd_boxcount(opts, box_rmin, box_rmax, box_points, box_depth);
  } catch (const ccdim::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ccdim::EvalDomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ccdim::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
