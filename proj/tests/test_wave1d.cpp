#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "gpw/wave1d.hpp"

using namespace gpw;
using Catch::Approx;

TEST_CASE("profile values at reference points", "[wave1d]") {
  CHECK(std::abs(eval_vc(Wave1D(0.0), 0.0)) == Approx(0.0).margin(1e-15));

  const cdouble v10 = eval_vc(Wave1D(1.0), 0.0);
  CHECK(v10.real() == Approx(0.0).margin(1e-15));
  CHECK(v10.imag() == Approx(-1.0 / kSqrt2).epsilon(1e-14));

  // limit at +infinity, checked far in the tail
  const Wave1D w(0.5);
  const cdouble vinf = eval_vc(w, 50.0);
  CHECK(vinf.real() == Approx(std::sqrt(1.0 - 0.25 / 2.0)).margin(1e-12));
  CHECK(vinf.imag() == Approx(-0.5 / kSqrt2).margin(1e-12));

  CHECK_THROWS_AS(Wave1D(kSqrt2), std::domain_error);
  CHECK_THROWS_AS(Wave1D(-0.1), std::domain_error);
}

TEST_CASE("density dip eta", "[wave1d]") {
  for (double c : {0.0, 0.3, 1.0, 1.3}) {
    const Wave1D w(c);
    CHECK(eval_eta(w, 0.0) == Approx(0.5 * (2.0 - c * c)).epsilon(1e-14));
  }
  // near-sonic amplitude collapse
  const Wave1D ws(kSqrt2 - 1e-9);
  CHECK(std::abs(eval_eta(ws, 0.7)) < 1e-8);

  // identity 1 - |v_c|^2 = eta at random points
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const double c = rng.uniform(0.0, kSqrt2 - 1e-6);
    const double x = rng.uniform(-20.0, 20.0);
    const Wave1D w(c);
    CHECK(1.0 - std::norm(eval_vc(w, x)) == Approx(eval_eta(w, x)).margin(1e-12));
  }
}

TEST_CASE("phase derivative", "[wave1d]") {
  CHECK(eval_phase_derivative(Wave1D(1.0), 0.0) == Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(eval_phase_derivative(Wave1D(0.5), 40.0)) < 1e-12);
  CHECK(std::abs(eval_phase_derivative(Wave1D(0.5), -40.0)) < 1e-12);
  CHECK_THROWS_AS(eval_phase_derivative(Wave1D(0.0), 1.0), std::domain_error);

  // total phase variation by quadrature against 2 arctan(eps/c)
  for (double c : {0.4, 0.9}) {
    const Wave1D w(c);
    const double L = 40.0 / w.eps;
    const double total =
        trapezoid([&](double x) { return eval_phase_derivative(w, x); }, -L, L, 200001);
    CHECK(total == Approx(2.0 * std::atan(w.eps / c)).epsilon(1e-9));
  }
}

TEST_CASE("dispersion closed forms", "[wave1d]") {
  const DispersionPoint d0 = dispersion(Wave1D(0.0));
  CHECK(d0.energy == Approx(2.0 * kSqrt2 / 3.0).epsilon(1e-15));
  CHECK(d0.p_renorm == Approx(0.5 * kPi).epsilon(1e-15));
  CHECK(d0.mass == Approx(-kSqrt2).epsilon(1e-15));

  const DispersionPoint d1 = dispersion(Wave1D(1.0));
  CHECK(d1.energy == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(d1.p_renorm == Approx(0.5 * kPi - 0.25 * kPi - 0.5).epsilon(1e-15));
  CHECK(d1.p_physical == Approx(-0.5).epsilon(1e-15));

  // eps^2 = 2 sqrt(2) 1e-8 at this speed, so E = eps^3/3 ~ 1.6e-12
  const DispersionPoint ds = dispersion(Wave1D(kSqrt2 - 1e-8));
  CHECK(std::abs(ds.energy) < 1e-11);
  CHECK(std::abs(ds.p_renorm) < 1e-7);
}

TEST_CASE("speed from momentum", "[wave1d]") {
  CHECK(speed_from_momentum(0.5 * kPi - 1e-10) < 1e-4);
  CHECK(speed_from_momentum(1e-10) > kSqrt2 - 1e-3);
  CHECK_THROWS_AS(speed_from_momentum(0.0), std::domain_error);
  CHECK_THROWS_AS(speed_from_momentum(0.5 * kPi), std::domain_error);

  const double p = dispersion(Wave1D(0.7)).p_renorm;
  CHECK(speed_from_momentum(p) == Approx(0.7).margin(1e-10));

  // strict monotonicity on a 100 point grid
  double prev = speed_from_momentum(1e-4);
  for (int i = 1; i < 100; ++i) {
    const double pi = 1e-4 + (0.5 * kPi - 2e-4) * i / 99.0;
    const double ci = speed_from_momentum(pi);
    CHECK(ci < prev);
    prev = ci;
  }
}

TEST_CASE("dispersion slopes", "[wave1d]") {
  const SlopePair s1 = dispersion_slope_check(1.0, 1e-5);
  CHECK(s1.dp_dc == Approx(-1.0).epsilon(1e-8));

  const SlopePair s2 = dispersion_slope_check(0.3, 1e-5);
  CHECK(s2.dE_dp == Approx(0.3).margin(1e-6));

  const double c = kSqrt2 - 1e-3;
  const SlopePair s3 = dispersion_slope_check(c, 1e-6);
  CHECK(s3.dp_dc == Approx(-std::sqrt(2.0 - c * c)).epsilon(1e-4));
}

TEST_CASE("kdv rescale collapses onto the soliton", "[wave1d]") {
  for (double c : {0.3, 1.2}) {
    const Wave1D w(c);
    CHECK(kdv_rescale(w, 0.0) == Approx(0.5).margin(1e-12));
    for (double x : {-3.0, 1.0, 7.5}) {
      CHECK(kdv_rescale(w, x) == Approx(kdv_soliton(x)).margin(1e-12));
    }
  }
  CHECK(kdv_rescale(Wave1D(0.3), 1.0) == Approx(kdv_rescale(Wave1D(1.2), 1.0)).margin(1e-13));

  const double mass = trapezoid([](double x) { return kdv_soliton(x); }, -80.0, 80.0, 40001);
  CHECK(mass == Approx(2.0).epsilon(1e-10));
}

TEST_CASE("kdv energy gap trend", "[wave1d]") {
  // E_KdV(N) = 1/2 int N'^2 - int N^3 = -1/5 for the soliton
  auto nprime = [](double x) {
    const double ch = std::cosh(0.5 * x);
    return -0.5 * std::sinh(0.5 * x) / (ch * ch * ch);
  };
  const double ekdv = trapezoid(
      [&](double x) {
        const double n = kdv_soliton(x);
        return 0.5 * nprime(x) * nprime(x) - n * n * n;
      },
      -60.0, 60.0, 20001);
  CHECK(ekdv == Approx(-0.2).margin(1e-10));

  auto wave_of_eps = [](double eps) { return Wave1D(std::sqrt(2.0 - eps * eps)); };
  const KdvGap g2 = kdv_energy_gap(wave_of_eps(0.2));
  CHECK(std::abs(g2.gap / g2.predicted - 1.0) < 0.05);
  const KdvGap g1 = kdv_energy_gap(wave_of_eps(0.1));
  CHECK(std::abs(g1.gap / g1.predicted - 1.0) < std::abs(g2.gap / g2.predicted - 1.0));

  const KdvGap tiny = kdv_energy_gap(wave_of_eps(1e-3));
  CHECK(std::abs(tiny.gap) < 1e-14);
}

TEST_CASE("squared derivative identity |v'|^2 = eta^2/2", "[wave1d]") {
  for (double c : {0.0, 0.25, 0.5, 0.75, 1.0, 1.25}) {
    const Wave1D w(c);
    for (double x : {-5.0, -0.3, 0.0, 1.7, 12.0}) {
      const double lhs = std::norm(eval_vc_derivative(w, x));
      const double eta = eval_eta(w, x);
      CHECK(lhs == Approx(0.5 * eta * eta).margin(1e-10));
    }
  }
}
