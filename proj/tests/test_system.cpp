#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ccdim/pressure.hpp"
#include "ccdim/system.hpp"
#include "test_support.hpp"

using ccdim::AddressSpec;
using ccdim::InputError;
using ccdim::System;
using ccdim::Word;
using testsup::load_fixture;

TEST_CASE("middle-third Cantor loads with exact constants") {
  const System sys = load_fixture("cantor.json");
  CHECK(sys.alphabet() == 2);
  CHECK(sys.constants().b == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sys.constants().B == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sys.constants().c == 0.0);
  CHECK(sys.constants().xi == 1.0);  // affine => c = 0 => xi = exp(0)
  CHECK(sys.constants().certified);
  CHECK(sys.schedule().describe() == "constant");
}

TEST_CASE("overlapping branch images are rejected") {
  const char* overlap = R"({
    "stages": [{"branches": [
      {"mode": "affine", "a": 0.0, "r": 0.4},
      {"mode": "affine", "a": 0.3, "r": 0.4}
    ]}]
  })";
  CHECK_THROWS_WITH_AS(ccdim::load_system_text(overlap),
                       doctest::Contains("overlap"), InputError);
}

TEST_CASE("touching branch images are rejected") {
  const char* touching = R"({
    "stages": [{"branches": [
      {"mode": "affine", "a": 0.0, "r": 0.5},
      {"mode": "affine", "a": 0.5, "r": 0.5}
    ]}]
  })";
  CHECK_THROWS_AS(ccdim::load_system_text(touching), InputError);
}

TEST_CASE("non-contracting branches are rejected") {
  const char* expanding_ratio = R"({
    "stages": [{"branches": [
      {"mode": "affine", "a": 0.0, "r": 1.2},
      {"mode": "affine", "a": 0.5, "r": 0.3}
    ]}]
  })";
  CHECK_THROWS_AS(ccdim::load_system_text(expanding_ratio), InputError);

  const char* weak_inverse = R"({
    "stages": [{"branches": [
      {"mode": "explicit_inverse", "phi": "0.5*x + 0.3*x^2"},
      {"mode": "affine", "a": 0.85, "r": 0.1}
    ]}]
  })";
  CHECK_THROWS_WITH_AS(ccdim::load_system_text(weak_inverse),
                       doctest::Contains("not uniformly contracting"),
                       InputError);
}

TEST_CASE("empty or malformed configs fail with diagnostics") {
  CHECK_THROWS_AS(ccdim::load_system_text("{}"), InputError);
  CHECK_THROWS_AS(ccdim::load_system_text("not json"), InputError);
  CHECK_THROWS_AS(ccdim::load_system_text(R"({"stages": []})"), InputError);
  CHECK_THROWS_AS(
      ccdim::load_system_text(
          R"({"stages": [{"branches": [{"mode": "affine", "a": 0.0, "r": 0.3}]}]})"),
      InputError);  // single branch
  CHECK_THROWS_AS(ccdim::load_system_file("/nonexistent/x.json"), InputError);
}

TEST_CASE("perturbed Cantor: images, audit, and distortion constant") {
  const System sys = load_fixture("perturbed.json");
  const auto& stage = sys.stages()[0];
  // phi_1([0,1]) = [0, 1/3 + 0.01], phi_2([0,1]) = [0.6, 0.6 + 1/3 + 0.01]
  CHECK(stage.images[0].first == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(stage.images[0].second ==
        doctest::Approx(0.3433333333333333).epsilon(1e-15));
  CHECK(stage.images[1].first == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(stage.images[1].second ==
        doctest::Approx(0.9433333333333334).epsilon(1e-15));

  // audit grid hits the endpoints, where |phi'| = 1/3 and 1/3 + 0.02
  CHECK(stage.audit.b == doctest::Approx(2.8301886792452833).epsilon(1e-12));
  CHECK(stage.audit.B == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(stage.audit.c_est <= 0.54);       // sup |f''| = 0.02 / (1/3)^3
  CHECK(stage.audit.c_est > 0.3);         // sampling should get reasonably close
  CHECK(stage.audit.holder_ok);

  // supplied authoritative constants make the system certified
  CHECK(sys.constants().certified);
  const double xi_expected = std::exp(0.54 / (2.830188679245283 - 1.0));
  CHECK(sys.constants().xi == doctest::Approx(xi_expected).epsilon(1e-15));
  CHECK(sys.constants().xi == doctest::Approx(1.3431955937881292).epsilon(1e-12));
}

TEST_CASE("a falsified supplied Holder constant is rejected") {
  const char* lying = R"({
    "stages": [{
      "branches": [
        {"mode": "explicit_inverse", "phi": "x/3 + 0.01*x^2"},
        {"mode": "explicit_inverse", "phi": "0.6 + x/3 + 0.01*x^2"}
      ],
      "holder": {"c": 0.01, "gamma": 1.0, "certified": true}
    }]
  })";
  CHECK_THROWS_WITH_AS(ccdim::load_system_text(lying),
                       doctest::Contains("falsified"), InputError);
}

TEST_CASE("branch inverses and derivatives") {
  const System cantor = load_fixture("cantor.json");
  CHECK(cantor.branch_value(1, 2, 0.5) ==
        doctest::Approx(0.8333333333333333).epsilon(1e-15));
  CHECK(cantor.branch_deriv(1, 1, 0.25) == 0.3333333333333333);

  const System perturbed = load_fixture("perturbed.json");
  CHECK(perturbed.branch_value(1, 1, 1.0) ==
        doctest::Approx(0.3433333333333333).epsilon(1e-15));

  const System tent = load_fixture("tent25.json");
  // f = 2.5 x on [0, 0.4]: phi(0.5) = 0.2, phi' = 0.4
  CHECK(tent.branch_value(1, 1, 0.5) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(tent.branch_deriv(1, 1, 0.5) == doctest::Approx(0.4).epsilon(1e-12));
  // decreasing branch f = 2.5 - 2.5 x on [0.6, 1]
  CHECK(tent.branch_value(1, 2, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tent.branch_value(1, 2, 1.0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(tent.branch_deriv(1, 2, 0.3) == doctest::Approx(-0.4).epsilon(1e-12));

  CHECK_THROWS_AS(cantor.branch_value(1, 3, 0.5), InputError);
  CHECK_THROWS_AS(cantor.branch_value(0, 1, 0.5), InputError);
}

TEST_CASE("Cantor built from forward branches matches the affine route") {
  const char* forward_cantor = R"({
    "stages": [{"branches": [
      {"mode": "forward_branch", "f": "3*x", "domain": [0.0, 0.3333333333333333]},
      {"mode": "forward_branch", "f": "3*x - 2", "domain": [0.6666666666666666, 1.0]}
    ]}]
  })";
  const System sys = ccdim::load_system_text(forward_cantor);
  CHECK(sys.branch_value(1, 1, 0.5) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(sys.branch_deriv(1, 1, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const System affine = load_fixture("cantor.json");
  for (double x : {0.0, 0.25, 0.7, 1.0})
    for (int j : {1, 2})
      CHECK(sys.branch_value(1, j, x) ==
            doctest::Approx(affine.branch_value(1, j, x)).epsilon(1e-12));
}

TEST_CASE("branch derivative magnitudes respect [1/B, 1/b]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const char* name :
       {"cantor.json", "halfquarter.json", "perturbed.json", "tent25.json"}) {
    const System sys = load_fixture(name);
    const double lo = 1.0 / sys.constants().B;
    const double hi = 1.0 / sys.constants().b;
    std::uniform_int_distribution<int> branch(1, sys.alphabet());
    for (int i = 0; i < 250; ++i) {
      const double d = std::fabs(sys.branch_deriv(1, branch(rng), unif(rng)));
      CHECK(testsup::geq_tol(d, lo, 1e-9));
      CHECK(testsup::leq_tol(d, hi, 1e-9));
    }
  }
}

TEST_CASE("distortion constant formula") {
  CHECK(ccdim::distortion_constant(0.0, 3.0, 1.0) == 1.0);
  CHECK(ccdim::distortion_constant(1.0, 2.0, 1.0) ==
        doctest::Approx(2.718281828459045).epsilon(1e-15));
  CHECK_THROWS_AS(ccdim::distortion_constant(1.0, 0.9, 1.0), InputError);
  CHECK_THROWS_AS(ccdim::distortion_constant(1.0, 2.0, 1.5), InputError);
}

TEST_CASE("empirical xi") {
  const System cantor = load_fixture("cantor.json");
  CHECK(std::fabs(cantor.empirical_xi(8, 2000) - 1.0) <= 1e-9);

  const System perturbed = load_fixture("perturbed.json");
  const double xi_hat = perturbed.empirical_xi(10, 10000);
  const double xi3 = std::pow(perturbed.constants().xi, 3.0);
  CHECK(xi_hat >= 1.0);
  CHECK(xi_hat <= xi3);
  // regression baseline for the fixed default seed
  CHECK(xi_hat == doctest::Approx(1.045600712510631).epsilon(1e-12));

  CHECK_THROWS_AS(cantor.empirical_xi(1, 100), InputError);
}

TEST_CASE("basic intervals of the Cantor system") {
  const System sys = load_fixture("cantor.json");
  const auto j21 = sys.basic_interval(Word{2, 1});
  CHECK(j21.lo == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(j21.hi == doctest::Approx(7.0 / 9.0).epsilon(1e-15));

  // digit-expansion oracle: letters (1,2,1,2) are ternary digits 0,2,0,2
  const auto j1212 = sys.basic_interval(Word{1, 2, 1, 2});
  CHECK(j1212.lo == doctest::Approx(20.0 / 81.0).epsilon(1e-14));
  CHECK(j1212.hi == doctest::Approx(21.0 / 81.0).epsilon(1e-14));

  for (int n : {1, 3, 6}) {
    std::mt19937_64 rng(n);
    const Word w = testsup::random_word(rng, 2, n);
    CHECK(sys.basic_interval(w).diam() ==
          doctest::Approx(std::pow(3.0, -n)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sys.basic_interval(Word{}), InputError);
}

TEST_CASE("block intervals shift the stage sequence") {
  const System period2 = load_fixture("period2.json");
  CHECK(period2.basic_interval(Word{1}).diam() ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(period2.block_interval(2, Word{1}).diam() ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(period2.block_interval(3, Word{1}).diam() ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(period2.block_interval(1, Word{}).diam() == 1.0);
}

TEST_CASE("composed derivative comparable to the interval diameter") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const char* name : {"cantor.json", "perturbed.json", "tent25.json"}) {
    const System sys = load_fixture(name);
    const double xi = sys.constants().xi;
    for (int i = 0; i < 200; ++i) {
      const Word w = testsup::random_word(rng, sys.alphabet(),
                                          1 + static_cast<int>(rng() % 8));
      const double diam = sys.basic_interval(w).diam();
      const double deriv = std::fabs(sys.composed_deriv(w, unif(rng)));
      CHECK(testsup::geq_tol(deriv, diam / xi, 1e-9));
      CHECK(testsup::leq_tol(deriv, diam * xi, 1e-9));
    }
  }
}

TEST_CASE("coding map enclosures") {
  const System sys = load_fixture("cantor.json");
  const AddressSpec leftmost{Word{}, Word{1}};
  const auto j4 = ccdim::code_point(sys, leftmost, 4);
  CHECK(j4.lo == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(j4.hi == doctest::Approx(1.0 / 81.0).epsilon(1e-14));

  const AddressSpec rightmost{Word{}, Word{2}};
  const auto j3 = ccdim::code_point(sys, rightmost, 3);
  CHECK(j3.lo == doctest::Approx(26.0 / 27.0).epsilon(1e-14));
  CHECK(j3.hi == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    const AddressSpec addr{testsup::random_word(rng, 2, 3),
                           testsup::random_word(rng, 2, 1 + (int)(rng() % 3))};
    if (addr.cycle.empty()) continue;
    for (int n = 1; n < 8; ++n) {
      const auto outer = ccdim::code_point(sys, addr, n);
      const auto inner = ccdim::code_point(sys, addr, n + 1);
      CHECK(inner.lo >= outer.lo - 1e-15);
      CHECK(inner.hi <= outer.hi + 1e-15);
    }
  }
}

TEST_CASE("schedules resolve stages correctly") {
  const System period2 = load_fixture("period2.json");
  CHECK(&period2.stage_at(1) == &period2.stages()[0]);
  CHECK(&period2.stage_at(2) == &period2.stages()[1]);
  CHECK(&period2.stage_at(3) == &period2.stages()[0]);
  CHECK(period2.constants().b == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(period2.constants().B == doctest::Approx(4.0).epsilon(1e-12));

  const System prefix13 = load_fixture("prefix13.json");
  CHECK(&prefix13.stage_at(1) == &prefix13.stages()[1]);
  CHECK(&prefix13.stage_at(2) == &prefix13.stages()[0]);
  CHECK(&prefix13.stage_at(5) == &prefix13.stages()[0]);
  CHECK(prefix13.dimension_uses_cycle_only());

  const System cycle = prefix13.cycle_system();
  CHECK(cycle.schedule().kind == ccdim::ScheduleKind::Constant);
  CHECK(&cycle.stage_at(1) == &cycle.stages()[0]);
  CHECK(cycle.constants().b == doctest::Approx(3.0).epsilon(1e-12));
  // the full system's constants include the prefix stage (1/0.45 < 3)
  CHECK(prefix13.constants().b == doctest::Approx(1.0 / 0.45).epsilon(1e-12));
}

TEST_CASE("orientation-reversing affine branches") {
  const char* reversing = R"({
    "stages": [{"branches": [
      {"mode": "affine", "a": 0.3333333333333333, "r": -0.3333333333333333},
      {"mode": "affine", "a": 0.6666666666666666, "r": 0.3333333333333333}
    ]}]
  })";
  const System sys = ccdim::load_system_text(reversing);
  CHECK(sys.stages()[0].images[0].first == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sys.stages()[0].images[0].second ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(sys.constants().b == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sys.constants().xi == 1.0);
  const auto j12 = sys.basic_interval(Word{1, 2});
  CHECK(j12.diam() == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(j12.lo < j12.hi);
  // same absolute ratios as the middle-third Cantor set
  const auto enc = ccdim::dimension_enclosure(sys, 8, 1e-12);
  CHECK(enc.h_lo <= std::log(2.0) / std::log(3.0));
  CHECK(enc.h_hi >= std::log(2.0) / std::log(3.0));
}

TEST_CASE("general intervals are rescaled to [0,1]") {
  const char* wide = R"({
    "interval": [0.0, 3.0],
    "stages": [{"branches": [
      {"mode": "affine", "a": 0.0, "r": 0.3333333333333333},
      {"mode": "affine", "a": 2.0, "r": 0.3333333333333333}
    ]}]
  })";
  const System sys = ccdim::load_system_text(wide);
  CHECK(sys.original_interval().second == 3.0);
  CHECK(sys.constants().b == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sys.constants().xi == 1.0);
  CHECK(sys.basic_interval(Word{1}).diam() ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(sys.basic_interval(Word{2}).lo ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("nesting and sibling disjointness on sampled words") {
  std::mt19937_64 rng(123);
  for (const char* name : {"cantor.json", "perturbed.json", "period2.json"}) {
    const System sys = load_fixture(name);
    for (int i = 0; i < 100; ++i) {
      const Word w = testsup::random_word(rng, sys.alphabet(),
                                          1 + static_cast<int>(rng() % 7));
      const auto parent = sys.basic_interval(w);
      std::vector<ccdim::BasicInterval> children;
      for (int j = 1; j <= sys.alphabet(); ++j) {
        const auto child = sys.basic_interval(w.extended(j));
        CHECK(child.lo >= parent.lo - 1e-12);
        CHECK(child.hi <= parent.hi + 1e-12);
        children.push_back(child);
      }
      std::sort(children.begin(), children.end(),
                [](const auto& a, const auto& b) { return a.lo < b.lo; });
      for (std::size_t j = 0; j + 1 < children.size(); ++j)
        CHECK(children[j].hi < children[j + 1].lo);
    }
  }
}
