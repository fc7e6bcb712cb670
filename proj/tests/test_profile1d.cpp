#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "gpw/profile1d.hpp"

using namespace gpw;
using Catch::Approx;

namespace {

SampledProfile1D dense_wave(double c, int npts = 120001) {
  const Wave1D w(c);
  return sample_wave(w, 40.0 / w.eps, npts);
}

/// Random smooth field in H^1_loc vanishing at x0: a signed kink profile
/// times a positive smooth factor, with a random localized phase on top.
SampledProfile1D random_vanishing_field(Rng& rng, int npts = 20001) {
  SampledProfile1D p;
  p.kind = ProfileKind::wave;
  const double L = 30.0;
  const double x0 = rng.uniform(-5.0, 5.0);
  struct Bump {
    double a, c, w;
  };
  std::vector<Bump> mod(3), ph(3);
  for (auto& b : mod) b = {rng.uniform(-0.3, 0.3), rng.uniform(-8.0, 8.0), rng.uniform(0.8, 3.0)};
  for (auto& b : ph) b = {rng.uniform(-1.0, 1.0), rng.uniform(-8.0, 8.0), rng.uniform(0.8, 3.0)};
  p.xs.resize(npts);
  p.values.resize(npts);
  const double h = 2.0 * L / (npts - 1);
  for (int i = 0; i < npts; ++i) {
    const double x = -L + i * h;
    const double m = std::tanh((x - x0) / kSqrt2);
    double factor = 1.0, phase = 0.0;
    for (const auto& b : mod) factor += b.a * std::exp(-(x - b.c) * (x - b.c) / (2.0 * b.w * b.w));
    for (const auto& b : ph) phase += b.a * std::exp(-(x - b.c) * (x - b.c) / (2.0 * b.w * b.w));
    p.xs[i] = x;
    p.values[i] = m * factor * std::polar(1.0, phase);
  }
  return p;
}

}  // namespace

TEST_CASE("quadrature of sampled profile matches closed forms", "[profile1d]") {
  for (double c : {0.0, 0.4, 0.8, 1.2}) {
    const auto prof = dense_wave(c);
    const DispersionPoint d = dispersion(Wave1D(c));
    CHECK(profile_energy(prof) == Approx(d.energy).epsilon(1e-8));
    if (c > 0.0) {
      CHECK(profile_momentum_renorm(prof) == Approx(d.p_renorm).epsilon(1e-8));
      CHECK(profile_momentum_physical(prof) == Approx(d.p_physical).epsilon(1e-8));
    }
  }
}

TEST_CASE("ODE residual of sampled closed form", "[profile1d]") {
  // i c v' + v'' + v (1 - |v|^2) = 0, residual via finite differences
  for (double c : {0.0, 0.25, 0.5, 0.75, 1.0, 1.25}) {
    const Wave1D w(c);
    const auto prof = sample_wave(w, 30.0 / w.eps, 60001);
    const auto d1 = detail::derivative(prof.xs, prof.values);
    const auto d2 = detail::derivative(prof.xs, d1);
    double worst = 0.0;
    for (std::size_t i = 4; i + 4 < prof.size(); ++i) {
      const cdouble r = cdouble(0.0, c) * d1[i] + d2[i] +
                        prof.values[i] * (1.0 - std::norm(prof.values[i]));
      worst = std::max(worst, std::abs(r));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("kink minimality on randomized vanishing fields", "[profile1d]") {
  Rng rng(20260809);
  const double floor = 2.0 * kSqrt2 / 3.0 - 1e-4;
  for (int t = 0; t < 200; ++t) {
    const auto f = random_vanishing_field(rng);
    CHECK(profile_energy(f) >= floor);
  }
}

TEST_CASE("bridge construction", "[profile1d]") {
  SECTION("energy bound and measured momentum") {
    const auto r = bridge_map(1.0 / 32.0, 0.25);
    CHECK(r.measured_energy <= 14.0 / 32.0);
    CHECK(r.measured_q == Approx(1.0 / 32.0).epsilon(1e-6));
    CHECK(r.profile.values.front() == r.profile.values.back());
  }
  SECTION("negative momentum via the conjugate phase branch") {
    const auto r = bridge_map(-1.0 / 64.0, 0.25);
    CHECK(r.measured_q == Approx(-1.0 / 64.0).margin(1e-8));
    CHECK(r.measured_energy <= 14.0 / 64.0);
  }
  SECTION("delta choice") {
    const auto r = bridge_map(0.01, 0.1);
    CHECK(r.delta == Approx(std::min(0.01, 0.08)).epsilon(1e-14));
    CHECK(std::abs(r.profile.values.front()) == Approx(std::sqrt(1.0 - r.delta)).epsilon(1e-12));
    const double bdry = std::abs(1.0 - r.endpoint_modulus);
    CHECK(bdry > 0.0);
    CHECK(bdry <= 0.1);
  }
  SECTION("rejects out-of-range parameters") {
    CHECK_THROWS_AS(bridge_map(0.04, 0.1), std::domain_error);
    CHECK_THROWS_AS(bridge_map(0.01, 0.3), std::domain_error);
    CHECK_THROWS_AS(bridge_map(0.0, 0.1), std::domain_error);
  }
  SECTION("5x5 parameter sweep stays within the lemma bound") {
    for (double q : {1.0 / 32.0, 1.0 / 48.0, 1.0 / 64.0, 1.0 / 100.0, 1.0 / 128.0})
      for (double mu : {0.25, 0.2, 0.15, 0.1, 0.05}) {
        const auto r = bridge_map(q, mu);
        CHECK(r.measured_q == Approx(q).epsilon(1e-6));
        CHECK(r.measured_energy <= 14.0 * std::abs(q));
      }
  }
}

TEST_CASE("zero energy sequence", "[profile1d]") {
  const auto a = zero_energy_sequence(1.0, 100);
  CHECK(a.energy == Approx(0.01).margin(1e-8));
  CHECK(a.momentum == Approx(1.0).margin(1e-10));

  const auto b = zero_energy_sequence(0.25 * kPi, 1);
  CHECK(b.energy == Approx(kPi * kPi / 16.0).margin(1e-8));

  const auto c = zero_energy_sequence(0.7, 4000);
  CHECK(c.energy < 1.5e-4);
}

TEST_CASE("pointwise momentum bound", "[profile1d]") {
  SECTION("sampled travelling wave") {
    const auto prof = dense_wave(0.8);
    CHECK(pointwise_momentum_bound_check(prof) <= 1.0 + 1e-6);
  }
  SECTION("constant field reports zero by convention") {
    SampledProfile1D p;
    p.xs.resize(64);
    p.values.assign(64, std::polar(1.0, 0.3));
    for (int i = 0; i < 64; ++i) p.xs[i] = -10.0 + i * 20.0 / 63.0;
    CHECK(pointwise_momentum_bound_check(p) == 0.0);
  }
  SECTION("random smooth nonvanishing fields") {
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
      SampledProfile1D p;
      const int npts = 8001;
      p.xs.resize(npts);
      p.values.resize(npts);
      const double a = rng.uniform(0.05, 0.5), k1 = rng.uniform(0.2, 2.0),
                   k2 = rng.uniform(0.2, 2.0), th = rng.uniform(0.0, 2.0);
      for (int i = 0; i < npts; ++i) {
        const double x = -20.0 + i * 40.0 / (npts - 1);
        const double rho = 1.0 + a * std::sin(k1 * x);
        p.xs[i] = x;
        p.values[i] = std::polar(rho, th * std::sin(k2 * x));
      }
      CHECK(pointwise_momentum_bound_check(p) <= 1.0 + 1e-6);
    }
  }
  SECTION("vanishing profile rejected") {
    SampledProfile1D p = dense_wave(0.0, 8001);
    CHECK_THROWS_AS(pointwise_momentum_bound_check(p), std::domain_error);
  }
}
