#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <numbers>

#include "jampa/error.hpp"
#include "jampa/planner.hpp"
#include "oracles.hpp"

using namespace jampa;
using std::numbers::pi;

namespace {

const double kOp = 2 * pi * 8e9;

DeviceModel paper_device(int M) {
  ArraySpec a;
  a.M = M;
  a.C_0 = 0.71e-15;
  a.C_S = 0.11e-12;
  a.snail = snail_from_linear_inductance(0.1, 110e-12);
  DeviceModel d{a, ResonatorSpec{46.0, 1.2e8, 0.0}};
  if (M < critical_M(kOp, a).value) d.resonator.d_r = resonator_length_for(kOp, a, 46.0, 1.2e8);
  return d;
}

const Interval kBand{2 * pi * 4e9, 2 * pi * 12e9};

}  // namespace

TEST_CASE("flux sweep structure") {
  const DeviceModel d = paper_device(1000);
  std::vector<double> grid;
  for (int i = 0; i <= 24; ++i) grid.push_back(0.02 * i - 0.24);
  const FluxSweep s = flux_sweep(d, grid, kBand, 4);
  REQUIRE(s.branches.size() > 3);

  // zero-flux column
  const auto zero = mode_frequencies(at_flux(d, 0.0), kBand.lo, kBand.hi);
  for (const auto& r : zero) {
    const auto it = std::find(s.branches.begin(), s.branches.end(), BranchId{r.parity, r.level, r.n});
    REQUIRE(it != s.branches.end());
    CHECK(s.omega(12, it - s.branches.begin()) == r.omega);
  }
  for (Eigen::Index i = 0; i < s.omega.rows(); ++i) {
    // mirror symmetry in flux
    const Eigen::Index j = s.omega.rows() - 1 - i;
    for (Eigen::Index b = 0; b < s.omega.cols(); ++b) {
      if (std::isnan(s.omega(i, b))) continue;
      CHECK(s.omega(j, b) == doctest::Approx(s.omega(i, b)).epsilon(1e-13));
      if (!std::isnan(s.omega(12, b))) CHECK(s.omega(i, b) <= s.omega(12, b));
    }
    // branches never cross
    double prev = 0.0;
    for (Eigen::Index b = 0; b < s.omega.cols(); ++b) {
      if (std::isnan(s.omega(i, b))) continue;
      CHECK(s.omega(i, b) > prev);
      prev = s.omega(i, b);
    }
  }
}

TEST_CASE("frequencies fall monotonically as c2 falls") {
  const DeviceModel d = paper_device(300);
  double prev_c2 = 1e300, prev_w = 1e300;
  for (int i = 0; i <= 49; ++i) {
    const double f = 0.01 * i;
    const double c2 = taylor_coefficients(d.array.snail, f, 2).coefficient(2);
    const double w = branch_frequency(at_flux(d, f), Parity::Odd, 1);
    CHECK(c2 < prev_c2);
    CHECK(w < prev_w);
    prev_c2 = c2;
    prev_w = w;
  }
}

TEST_CASE("matching targets") {
  const DeviceModel d = paper_device(1000);
  SUBCASE("exact zero-flux frequency") {
    const double w = mode_frequencies(d, kBand.lo, kBand.hi).front().omega;
    const auto m = match_target(d, w);
    REQUIRE(m.has_value());
    CHECK(m->flux_frac < 1e-9);
    CHECK(m->omega == doctest::Approx(w).epsilon(1e-12));
  }
  SUBCASE("random targets land within tolerance") {
    oracle::Gen g(41);
    const FluxPlanner planner(d, kBand.hi + kDefaultMatchTolerance);
    for (int i = 0; i < 25; ++i) {
      const double target = g.uniform(kBand.lo, kBand.hi);
      const auto m = planner.match(target, kDefaultMatchTolerance);
      if (!m) continue;
      const double w = branch_frequency(at_flux(d, m->flux_frac), m->branch.parity, m->branch.level);
      CHECK(w == doctest::Approx(m->omega).epsilon(1e-12));
      CHECK(std::abs(w - target) <= kDefaultMatchTolerance);
    }
  }
  SUBCASE("between two tuning ranges there is no match") {
    const DeviceModel b = paper_device(200);
    const FluxPlanner planner(b, 2 * pi * 20e9);
    const auto& r = planner.ranges();
    REQUIRE(r.size() >= 2);
    const double mid = 0.5 * (r[0].omega_top + r[1].omega_bottom);
    REQUIRE(r[1].omega_bottom > r[0].omega_top);
    CHECK_FALSE(planner.match(mid, 2 * pi * 1e6).has_value());
    CHECK(planner.match(mid, std::numeric_limits<double>::infinity()).has_value());
  }
}

TEST_CASE("coverage map tiles the band") {
  for (int M : {20, 200, 1000}) {
    const DeviceModel d = paper_device(M);
    for (double tol : {2 * pi * 10e6, std::numeric_limits<double>::infinity()}) {
      const CoverageMap map = coverage_map(d, kBand, 2 * pi * 50e6, tol, 4);
      CAPTURE(M);
      CHECK(map.covered_width() + map.gap_width() == doctest::Approx(kBand.width()).epsilon(1e-12));
      std::vector<Interval> all = map.covered;
      all.insert(all.end(), map.gaps.begin(), map.gaps.end());
      std::sort(all.begin(), all.end(), [](auto& x, auto& y) { return x.lo < y.lo; });
      CHECK(all.front().lo == kBand.lo);
      CHECK(all.back().hi == kBand.hi);
      for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i].lo == all[i - 1].hi);
      for (const auto& e : map.entries) {
        if (e.match) CHECK(std::abs(e.match->omega - e.target) <= tol);
      }
      if (std::isinf(tol)) CHECK(map.gaps.empty());
    }
  }
}

TEST_CASE("lumped device covers its own tuning range") {
  const DeviceModel d = paper_device(20);
  const double top = branch_frequency(d, Parity::Odd, 0);
  const double bottom = branch_frequency(at_flux(d, 0.5 - kHalfFluxGuard), Parity::Odd, 0);
  const double step = 2 * pi * 10e6;
  const CoverageMap map = coverage_map(d, kBand, step, 0.0, 4);
  REQUIRE(map.covered.size() == 1);
  CHECK(map.covered[0].lo == doctest::Approx(std::max(bottom, kBand.lo)).epsilon(step / bottom));
  CHECK(map.covered[0].hi == doctest::Approx(top).epsilon(step / top));
}

TEST_CASE("larger arrays close the gaps") {
  const double tol = 2 * pi * 10e6, step = 2 * pi * 10e6;
  const CoverageMap b = coverage_map(paper_device(200), kBand, step, tol, 4);
  const CoverageMap c = coverage_map(paper_device(1000), kBand, step, tol, 4);
  const CoverageMap e = coverage_map(paper_device(2000), kBand, step, tol, 4);
  CHECK(c.coverage_fraction() > b.coverage_fraction());
  CHECK(e.gap_width() <= c.gap_width());
}

TEST_CASE("results do not depend on the thread count") {
  const DeviceModel d = paper_device(1000);
  const CoverageMap one = coverage_map(d, kBand, 2 * pi * 100e6, 2 * pi * 10e6, 1);
  const CoverageMap many = coverage_map(d, kBand, 2 * pi * 100e6, 2 * pi * 10e6, 8);
  REQUIRE(one.entries.size() == many.entries.size());
  for (std::size_t i = 0; i < one.entries.size(); ++i) {
    CHECK(one.entries[i].match.has_value() == many.entries[i].match.has_value());
    if (one.entries[i].match) CHECK(one.entries[i].match->flux_frac == many.entries[i].match->flux_frac);
  }
}

TEST_CASE("coupling estimate") {
  CHECK(estimate_kappa(2.0 / pi * 50.0, 1e9, 50.0) == doctest::Approx(1e9).epsilon(1e-15));
  CHECK(estimate_kappa(390.0, 2 * pi * 1.5e9, 50.0) / (2 * pi) == doctest::Approx(122e6).epsilon(0.01));
  CHECK(estimate_kappa(195.0, 1e9, 50.0) == doctest::Approx(2 * estimate_kappa(390.0, 1e9, 50.0)).epsilon(1e-15));
  CHECK_THROWS_AS(estimate_kappa(0.0, 1.0, 1.0), Error);
}

TEST_CASE("invalid coverage requests") {
  CHECK_THROWS_AS(coverage_map(paper_device(20), kBand, 0.0), Error);
  CHECK_THROWS_AS(coverage_map(paper_device(20), Interval{2.0, 1.0}, 1.0), Error);
  CHECK_THROWS_AS(FluxPlanner(paper_device(20), 1e10, 0.5), Error);
}
