#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "gpw/kp1.hpp"
#include "gpw/wave1d.hpp"

using namespace gpw;
using Catch::Approx;

namespace {

Grid lump_grid() { return Grid(2, 32, {512, 512, 1}); }  // side ~ 201

}  // namespace

TEST_CASE("lump pointwise values", "[kp1]") {
  CHECK(lump(0.0, 0.0) == Approx(8.0).epsilon(1e-15));
  CHECK(lump(std::sqrt(3.0), 0.0) == Approx(0.0).margin(1e-13));
  CHECK(lump(100.0, 0.0) == Approx(-24.0 * 9997.0 / (10003.0 * 10003.0)).epsilon(1e-12));
  CHECK(std::abs(lump(100.0, 0.0)) < 24.0 / (100.0 * 100.0) * 1.1);
}

TEST_CASE("inverse derivative identity", "[kp1]") {
  const Grid g(2, 4, {64, 64, 1});
  KPField w(g);
  for (int i = 0; i < g.npts[0]; ++i)
    for (int j = 0; j < g.npts[1]; ++j)
      w.values[g.index(i, j)] = std::sin(2.0 * g.coord(0, i) / g.n) *
                                std::cos(g.coord(1, j) / g.n);
  kp_remove_line_means(w);
  // d1 (d1^{-1} w) = w on zero-mean fields
  const auto dinv = kpdetail::apply_multiplier(g, w.values, [](double k1, double, int, int) {
    return k1 == 0.0 ? cdouble(0.0, 0.0) : 1.0 / cdouble(0.0, k1);
  });
  const auto back = kpdetail::apply_multiplier(g, dinv, [](double k1, double, int, int) {
    return cdouble(0.0, k1);
  });
  for (std::size_t i = 0; i < w.values.size(); ++i)
    CHECK(back[i] == Approx(w.values[i]).margin(1e-12));
}

TEST_CASE("lump solves the solitary wave equation", "[kp1]") {
  const auto w = sample_lump(lump_grid());
  const double rel = sw_residual(w, 1.0) / kp_l2_norm(w);
  CHECK(rel <= 1e-2);

  SECTION("zero field") {
    KPField z(lump_grid());
    z.zero_mean_x1 = true;
    CHECK(sw_residual(z, 1.0) == 0.0);
  }
  SECTION("non-zero-mean input rejected") {
    const auto raw = sample_lump(lump_grid(), false);
    CHECK_THROWS_AS(sw_residual(raw, 1.0), std::domain_error);
  }
}

TEST_CASE("residual improves with box size", "[kp1]") {
  const auto w1 = sample_lump(Grid(2, 16, {512, 512, 1}));  // side ~ 100, finer density
  const auto w2 = sample_lump(Grid(2, 32, {1024, 1024, 1}));  // side ~ 201, same density
  const double r1 = sw_residual(w1, 1.0) / kp_l2_norm(w1);
  const double r2 = sw_residual(w2, 1.0) / kp_l2_norm(w2);
  CHECK(r2 < r1);
}

TEST_CASE("scaling family", "[kp1]") {
  const Grid g(2, 16, {512, 512, 1});
  const auto w = sample_lump(g);

  SECTION("identity at sigma = 1") {
    const auto ws = scale_family(w, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < w.values.size(); ++i)
      worst = std::max(worst, std::abs(ws.values[i] - w.values[i]));
    CHECK(worst < 1e-8);
  }

  SECTION("covariance of the residual") {
    // finer grid for sigma = 2: the compressed lump needs resolution
    const Grid gf(2, 16, {1024, 1024, 1});
    const auto wf = sample_lump(gf);
    for (double s : {0.5, 2.0}) {
      const auto ws = scale_family(wf, s);
      const double rel = sw_residual(ws, s) / kp_l2_norm(ws);
      CHECK(rel < 2e-2);
    }
  }

  SECTION("mass scaling") {
    const auto wh = scale_family(w, 0.5);
    const double ratio = std::pow(kp_l2_norm(wh), 2) / std::pow(kp_l2_norm(w), 2);
    // int w_s^2 = s^{1/2} int w^2 up to periodization of the slow tails
    CHECK(ratio == Approx(std::sqrt(0.5)).epsilon(0.05));
  }

  CHECK_THROWS_AS(scale_family(w, 0.0), std::domain_error);
}

TEST_CASE("kp energy and action", "[kp1]") {
  SECTION("zero field") {
    KPField z(Grid(2, 4, {64, 64, 1}));
    z.zero_mean_x1 = true;
    CHECK(kp_energy(z) == 0.0);
    CHECK(kp_action(z) == 0.0);
  }
  SECTION("action of the lump is reported finite") {
    const auto w = sample_lump(lump_grid());
    const double S = kp_action(w);
    CHECK(std::isfinite(S));
    CHECK(S > 0.0);
  }
}

TEST_CASE("gp to kp round trip through the inverse map", "[kp1]") {
  // synthetic transonic field built from the lump via the inverse stretch
  const double eps = 0.4;
  const double c = std::sqrt(2.0 - eps * eps);
  const Grid g(2, 48, {1024, 512, 1});
  Field u(g);
  for (int i = 0; i < g.npts[0]; ++i)
    for (int j = 0; j < g.npts[1]; ++j) {
      const double eta =
          eps * eps / 6.0 * lump(eps * g.coord(0, i), eps * eps * g.coord(1, j) / kSqrt2);
      u.values[g.index(i, j)] = std::sqrt(std::max(1.0 - eta, 0.0));
    }
  REQUIRE(min_modulus(u) > 0.0);

  const KPField n = gp_to_kp(u, c);
  double worst = 0.0;
  for (int i = 0; i < n.grid.npts[0]; ++i)
    for (int j = 0; j < n.grid.npts[1]; ++j) {
      const double ref = lump(n.grid.coord(0, i), n.grid.coord(1, j));
      worst = std::max(worst, std::abs(n.values[n.grid.index(i, j)] - ref));
    }
  // line-mean correction shifts by the (small) periodized mean
  CHECK(worst < 2e-2);

  SECTION("vanishing fields rejected") {
    Field bad = u;
    bad.values[0] = 0.0;
    CHECK_THROWS_AS(gp_to_kp(bad, c), std::domain_error);
  }
}

TEST_CASE("transonic scaling fits", "[kp1]") {
  SECTION("exact power laws are recovered") {
    std::vector<BranchSample> branch;
    for (double p : {0.2, 0.35, 0.5, 0.8}) {
      BranchSample b{};
      b.p = p;
      b.E = kSqrt2 * p - 0.37 * p * p * p;
      b.c = kSqrt2 - 0.21 * p * p;
      branch.push_back(b);
    }
    const auto rep = transonic_scalings_check(branch);
    REQUIRE(rep.valid);
    CHECK(rep.exponent_gap == Approx(3.0).margin(1e-10));
    CHECK(rep.exponent_speed == Approx(2.0).margin(1e-10));
    CHECK(rep.within_kp_expectation);
  }
  SECTION("1D closed-form exponents near the sonic limit") {
    std::vector<BranchSample> branch;
    for (double eps : {0.02, 0.03, 0.05, 0.08}) {
      const double c = std::sqrt(2.0 - eps * eps);
      const auto d = dispersion(Wave1D(c));
      branch.push_back({d.p_renorm, d.energy, c});
    }
    const auto rep = transonic_scalings_check(branch);
    REQUIRE(rep.valid);
    // 1D scalings: gap ~ p^{5/3}, sqrt2 - c ~ p^{2/3}
    CHECK(rep.exponent_gap == Approx(5.0 / 3.0).margin(0.02));
    CHECK(rep.exponent_speed == Approx(2.0 / 3.0).margin(0.02));
    CHECK_FALSE(rep.within_kp_expectation);
  }
  SECTION("insufficient points") {
    CHECK_FALSE(transonic_scalings_check({{1.0, 1.0, 1.0}}).valid);
    CHECK_FALSE(transonic_scalings_check({}).valid);
  }
}
