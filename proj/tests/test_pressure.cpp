#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ccdim/pressure.hpp"
#include "test_support.hpp"

using ccdim::DimensionEnclosure;
using ccdim::PartitionEvaluator;
using ccdim::System;
using testsup::load_fixture;

TEST_CASE("partition sums: frozen values") {
  const System cantor = load_fixture("cantor.json");
  // 8 intervals of length 1/27 at depth 3
  CHECK(ccdim::partition_log_sum(cantor, 3, 1.0) ==
        doctest::Approx(std::log(8.0 / 27.0)).epsilon(1e-13));
  CHECK(ccdim::partition_log_sum(cantor, 3, 1.0) ==
        doctest::Approx(-1.2163953243244932).epsilon(1e-13));

  // Z_n(0) = N^n exactly
  CHECK(PartitionEvaluator(cantor, 5).sum_pow(0.0) == 32.0);
  for (int n = 1; n <= 12; ++n)
    CHECK(PartitionEvaluator(cantor, n).sum_pow(0.0) ==
          static_cast<double>(ccdim::level_size(2, n)));

  // at t = log2/log3 the Cantor sum is 1 for every depth
  const double h = std::log(2.0) / std::log(3.0);
  for (int n : {1, 4, 9})
    CHECK(std::fabs(ccdim::partition_log_sum(cantor, n, h)) <= 1e-10);
}

TEST_CASE("partition sums are deterministic across worker counts and caching") {
  const System cantor = load_fixture("cantor.json");
  const System perturbed = load_fixture("perturbed.json");
  for (const System* sys : {&cantor, &perturbed}) {
    for (double t : {0.0, 0.4, 0.63, 1.0}) {
      const double one = PartitionEvaluator(*sys, 9, 1).log_sum(t);
      const double two = PartitionEvaluator(*sys, 9, 2).log_sum(t);
      const double eight = PartitionEvaluator(*sys, 9, 8).log_sum(t);
      const double cached = PartitionEvaluator(*sys, 9, 3, true).log_sum(t);
      CHECK(one == two);
      CHECK(one == eight);
      CHECK(one == cached);
    }
  }
}

TEST_CASE("pressure brackets collapse for affine systems") {
  const System cantor = load_fixture("cantor.json");
  for (double t : {0.0, 0.3, 0.6309297535714574, 1.0}) {
    const auto br = ccdim::pressure_bracket(cantor, 6, t);
    CHECK(br.L == br.U);  // xi = 1
    CHECK(br.L == doctest::Approx(std::log(2.0) - t * std::log(3.0))
                      .epsilon(1e-12));
  }
  // t = 0 gives log N for any system
  const System perturbed = load_fixture("perturbed.json");
  const auto at0 = ccdim::pressure_bracket(perturbed, 6, 0.0);
  CHECK(at0.L == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(at0.U == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  CHECK_THROWS_AS(ccdim::pressure_bracket(cantor, 6, -0.5), ccdim::InputError);
}

TEST_CASE("perturbed bracket width matches the certified formula") {
  const System perturbed = load_fixture("perturbed.json");
  const auto br = ccdim::pressure_bracket(perturbed, 12, 0.63);
  const double expected =
      6.0 * 0.63 * std::log(perturbed.constants().xi) / 12.0;
  CHECK(br.U - br.L == doctest::Approx(expected).epsilon(1e-12));
  CHECK(br.U - br.L == doctest::Approx(0.0929412).epsilon(1e-4));
  CHECK(br.L <= br.U);
}

TEST_CASE("dimension enclosures hit the affine closed forms") {
  const System cantor = load_fixture("cantor.json");
  const auto enc = ccdim::dimension_enclosure(cantor, 8, 1e-12);
  const double oracle = testsup::affine_dimension_oracle({1.0 / 3, 1.0 / 3});
  CHECK(enc.width() <= 3e-12);
  CHECK(enc.h_lo <= oracle);
  CHECK(enc.h_hi >= oracle);
  CHECK(std::fabs(enc.midpoint() - 0.6309297535714574) <= 1e-11);
  CHECK(enc.width_bound == 0.0);
  CHECK(enc.certified);

  const System hq = load_fixture("halfquarter.json");
  const auto enc2 = ccdim::dimension_enclosure(hq, 8, 1e-12);
  const double oracle2 = testsup::affine_dimension_oracle({0.5, 0.25});
  CHECK(enc2.h_lo <= oracle2);
  CHECK(enc2.h_hi >= oracle2);
  // second route: 2^{-s} = (sqrt5 - 1)/2, s = ln((1+sqrt5)/2)/ln 2
  const double golden = std::log((1.0 + std::sqrt(5.0)) / 2.0) / std::log(2.0);
  CHECK(std::fabs(enc2.midpoint() - golden) <= 1e-11);

  const System tent = load_fixture("tent25.json");
  const auto enc3 = ccdim::dimension_enclosure(tent, 8, 1e-10);
  const double oracle3 = std::log(2.0) / std::log(2.5);
  CHECK(enc3.h_lo - 1e-9 <= oracle3);
  CHECK(enc3.h_hi + 1e-9 >= oracle3);
}

TEST_CASE("periodic schedules need aligned depths") {
  const System period2 = load_fixture("period2.json");
  CHECK_THROWS_AS(ccdim::dimension_enclosure(period2, 7, 1e-12),
                  ccdim::InputError);
  CHECK(ccdim::aligned_depth(period2, 7) == 8);
  CHECK(ccdim::aligned_depth(period2, 8) == 8);

  const auto enc = ccdim::dimension_enclosure(period2, 8, 1e-12);
  const double oracle = testsup::bisect_root(
      [](double t) { return std::log(2.0) - 0.5 * t * std::log(12.0); }, 0.0,
      2.0);
  CHECK(enc.h_lo <= oracle);
  CHECK(enc.h_hi >= oracle);
  CHECK(std::fabs(oracle - 0.5578858913) <= 5e-11);
}

TEST_CASE("a prefix does not move the dimension") {
  const System prefix13 = load_fixture("prefix13.json");
  const auto enc = ccdim::dimension_enclosure(prefix13, 8, 1e-12);
  const double cantor_h = std::log(2.0) / std::log(3.0);
  CHECK(enc.h_lo <= cantor_h);
  CHECK(enc.h_hi >= cantor_h);
  CHECK(enc.width() <= 3e-12);
}

TEST_CASE("enclosures nest along the doubling chain") {
  const System perturbed = load_fixture("perturbed.json");
  const auto enc6 = ccdim::dimension_enclosure(perturbed, 6, 1e-12);
  const auto enc12 = ccdim::dimension_enclosure(perturbed, 12, 1e-12);
  CHECK(enc12.h_lo >= enc6.h_lo - 1e-10);
  CHECK(enc12.h_hi <= enc6.h_hi + 1e-10);
  CHECK(enc12.width() <= enc12.width_bound + 2.0 * enc12.tol);

  // pointwise bracket nesting at fixed t
  for (double t : {0.3, 0.63, 0.9}) {
    const auto b5 = ccdim::pressure_bracket(perturbed, 5, t);
    const auto b10 = ccdim::pressure_bracket(perturbed, 10, t);
    CHECK(b10.L >= b5.L - 1e-12);
    CHECK(b10.U <= b5.U + 1e-12);
  }
}

TEST_CASE("bracket failure diagnostics") {
  // An absurd supplied Holder constant makes xi so large that the upper
  // pressure bound never goes negative.
  const char* absurd = R"({
    "stages": [{
      "branches": [
        {"mode": "affine", "a": 0.0, "r": 0.3333333333333333},
        {"mode": "affine", "a": 0.6666666666666666, "r": 0.3333333333333333}
      ],
      "holder": {"c": 1000.0, "gamma": 1.0, "certified": false}
    }]
  })";
  const System sys = ccdim::load_system_text(absurd);
  CHECK_THROWS_AS(ccdim::dimension_enclosure(sys, 4, 1e-12),
                  ccdim::NumericError);
}

TEST_CASE("pressure curve: frozen points, monotone and convex") {
  const System cantor = load_fixture("cantor.json");
  const double h = std::log(2.0) / std::log(3.0);
  const auto rows = ccdim::pressure_curve(cantor, 6, {0.0, h, 1.0});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].midpoint() == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(std::fabs(rows[1].midpoint()) <= 1e-12);
  CHECK(rows[2].midpoint() ==
        doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-12));

  const System perturbed = load_fixture("perturbed.json");
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(0.125 * i);
  const auto curve = ccdim::pressure_curve(perturbed, 8, grid);
  const double ln_b = std::log(perturbed.constants().b);
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    // strict decrease with slope at least ln b
    CHECK(curve[i + 1].midpoint() <=
          curve[i].midpoint() - 0.125 * ln_b + 1e-9);
    CHECK(curve[i + 1].U < curve[i].U);
    CHECK(curve[i + 1].L < curve[i].L);
  }
  for (std::size_t i = 0; i + 2 < curve.size(); ++i) {
    // log Z is convex on the equally spaced grid
    CHECK(curve[i + 1].logZ <=
          0.5 * (curve[i].logZ + curve[i + 2].logZ) + 1e-10);
  }
}

TEST_CASE("corollary check holds at the enclosure points") {
  const System cantor = load_fixture("cantor.json");
  const auto enc = ccdim::dimension_enclosure(cantor, 8, 1e-12);
  const auto check = ccdim::corollary_check(cantor, 8, enc);
  CHECK(check.ok);
  CHECK(check.at_mid.sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(check.at_mid.lower == 1.0);
  CHECK(check.at_mid.upper == 1.0);

  const System hq = load_fixture("halfquarter.json");
  const auto enc2 = ccdim::dimension_enclosure(hq, 8, 1e-12);
  const auto check2 = ccdim::corollary_check(hq, 8, enc2);
  CHECK(check2.ok);
  CHECK(check2.at_mid.sum == doctest::Approx(1.0).epsilon(1e-9));

  const System perturbed = load_fixture("perturbed.json");
  const auto enc3 = ccdim::dimension_enclosure(perturbed, 10, 1e-12);
  const auto check3 = ccdim::corollary_check(perturbed, 10, enc3);
  CHECK(check3.ok);
  CHECK(check3.at_h_lo.sum <= check3.at_h_lo.upper * (1 + 1e-9));
  CHECK(check3.at_h_hi.sum >= check3.at_h_hi.lower * (1 - 1e-9));
}
