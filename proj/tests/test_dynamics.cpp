#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "gpw/dynamics.hpp"

using namespace gpw;
using Catch::Approx;

namespace {

Grid line_grid(long n = 32, int pts = 2048) { return Grid(1, n, {pts, 1, 1}); }

}  // namespace

TEST_CASE("constant is a fixed point", "[dynamics]") {
  const Grid g = line_grid(4, 256);
  PropagatorConfig cfg;
  cfg.dt = 1e-2;
  const Field one(g, cdouble{1.0, 0.0});
  const Field out = step(one, cfg);
  for (const auto& z : out.values) CHECK(std::abs(z - cdouble{1.0, 0.0}) < 1e-13);
}

TEST_CASE("nonlinear substep is a pointwise phase rotation", "[dynamics]") {
  const Grid g = line_grid(4, 256);
  Rng rng(3);
  std::vector<cdouble> vals(g.total());
  for (auto& z : vals) z = cdouble(1.0 + 0.3 * rng.normal(), 0.3 * rng.normal());
  std::vector<double> V(g.total());
  for (auto& v : V) v = 0.2 * rng.normal();
  const auto before = vals;
  dyndetail::nonlinear_rotation(vals, V.data(), 1.0, 0.37);
  for (std::size_t i = 0; i < vals.size(); ++i)
    CHECK(std::abs(vals[i]) == Approx(std::abs(before[i])).epsilon(1e-15));
}

TEST_CASE("bogoliubov frequency of a small perturbation", "[dynamics]") {
  const Grid g = line_grid(4, 256);
  const double xi = 1.0;  // mode k = n on this grid
  const double omega = xi * std::sqrt(xi * xi + 2.0);

  Field f(g, cdouble{1.0, 0.0});
  for (int i = 0; i < g.npts[0]; ++i)
    f.values[i] += 1e-4 * std::cos(xi * g.coord(0, i));

  PropagatorConfig cfg;
  cfg.dt = 1e-3;
  const double T = 10.0 * 2.0 * kPi / omega;
  const long nsteps = static_cast<long>(std::llround(T / cfg.dt));
  dyndetail::StepWorkspace ws(g, cfg);

  // project the density perturbation on the cosine mode each step and fit
  // the oscillation frequency from the zero crossings
  std::vector<double> ts, ss;
  Field cur = f;
  for (long s = 0; s <= nsteps; ++s) {
    if (s > 0) dyndetail::step_inplace(cur.values, g, cfg, ws, 1.0);
    double proj = 0.0;
    for (int i = 0; i < g.npts[0]; ++i)
      proj += (std::norm(cur.values[i]) - 1.0) * std::cos(xi * g.coord(0, i));
    ts.push_back(s * cfg.dt);
    ss.push_back(proj);
  }
  std::vector<double> crossings;
  for (std::size_t i = 1; i < ss.size(); ++i)
    if ((ss[i - 1] < 0.0) != (ss[i] < 0.0)) {
      const double t =
          ts[i - 1] + (ts[i] - ts[i - 1]) * (0.0 - ss[i - 1]) / (ss[i] - ss[i - 1]);
      crossings.push_back(t);
    }
  REQUIRE(crossings.size() >= 10);
  const double spacing = (crossings.back() - crossings.front()) / (crossings.size() - 1);
  const double omega_meas = kPi / spacing;
  CHECK(omega_meas == Approx(omega).epsilon(1e-3));
}

TEST_CASE("dark soliton translates at its speed", "[dynamics]") {
  const double c = 0.5;
  const Grid g = line_grid(32, 2048);
  const TwistedWave tw = embed_dark_1d(Wave1D(c), g);

  PropagatorConfig cfg;
  cfg.dt = 2e-3;
  cfg.t_end = 20.0;
  cfg.observer_stride = 1000;
  const EvolveResult res = evolve(tw.field, cfg);
  REQUIRE_FALSE(res.aborted_nan);

  const double x_end = min_modulus_position(res.field);
  CHECK(x_end == Approx(c * cfg.t_end).margin(0.2));

  SECTION("conservation over the run") {
    const double e0 = res.trace.energies.front(), e1 = res.trace.energies.back();
    CHECK(std::abs(e1 - e0) / std::abs(e0) < 1e-6);
    const double p0 = res.trace.momenta.front(), p1 = res.trace.momenta.back();
    CHECK(std::abs(p1 - p0) / std::max(1.0, std::abs(p0)) < 1e-6);
    const double m0 = res.trace.masses.front(), m1 = res.trace.masses.back();
    CHECK(std::abs(m1 - m0) < 1e-8);
  }

  SECTION("center of mass slope is twice the momentum") {
    const auto& tr = res.trace;
    REQUIRE(tr.times.size() >= 3);
    for (std::size_t k = 1; k + 1 < tr.times.size(); ++k) {
      const double slope = (tr.mass_centers[k + 1] - tr.mass_centers[k - 1]) /
                           (tr.times[k + 1] - tr.times[k - 1]);
      CHECK(slope == Approx(2.0 * tr.momenta[k]).margin(1e-4));
    }
  }
}

TEST_CASE("time reversibility", "[dynamics]") {
  const Grid g = line_grid(8, 512);
  const TwistedWave tw = embed_dark_1d(Wave1D(0.7), g);
  PropagatorConfig fwd;
  fwd.dt = 2e-3;
  fwd.t_end = 5.0;
  const EvolveResult mid = evolve(tw.field, fwd);
  PropagatorConfig bwd = fwd;
  bwd.dt = -2e-3;
  // march backwards with negated dt
  dyndetail::StepWorkspace ws(g, bwd);
  Field back = mid.field;
  const long nsteps = static_cast<long>(std::llround(fwd.t_end / fwd.dt));
  for (long s = 0; s < nsteps; ++s) dyndetail::step_inplace(back.values, g, bwd, ws, 1.0);
  double sup = 0.0;
  for (std::size_t i = 0; i < back.values.size(); ++i)
    sup = std::max(sup, std::abs(back.values[i] - tw.field.values[i]));
  CHECK(sup < 1e-6);
}

TEST_CASE("strang splitting is second order", "[dynamics]") {
  const Grid g = line_grid(4, 256);
  Field f0(g, cdouble{1.0, 0.0});
  for (int i = 0; i < g.npts[0]; ++i) {
    const double x = g.coord(0, i);
    f0.values[i] += 0.2 * std::sin(x / g.n) + cdouble(0.0, 0.15) * std::cos(2.0 * x / g.n);
  }
  auto terminal = [&](double dt) {
    PropagatorConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 1.0;
    cfg.observer_stride = 1 << 20;
    return evolve(f0, cfg).field;
  };
  const Field ref = terminal(1.0 / 512.0);
  const Field a = terminal(1.0 / 64.0);
  const Field b = terminal(1.0 / 128.0);
  double ea = 0.0, eb = 0.0;
  for (std::size_t i = 0; i < ref.values.size(); ++i) {
    ea = std::max(ea, std::abs(a.values[i] - ref.values[i]));
    eb = std::max(eb, std::abs(b.values[i] - ref.values[i]));
  }
  // dt/8 reference biases the pure ratio 4 to 4.2
  CHECK(ea / eb == Approx(4.2).epsilon(0.2));
}

TEST_CASE("orbital distance", "[dynamics]") {
  const double c = 0.5;
  const Grid g = line_grid(32, 2048);
  const TwistedWave tw = embed_dark_1d(Wave1D(c), g);

  SECTION("zero on the wave itself") {
    CHECK(orbital_distance(tw.field, c, 20.0) < 1e-10);
  }

  SECTION("invariant under an orbit element") {
    // core shifted by 1.7 and rotated by 0.3 with the seam ramp pinned
    const Wave1D w(c);
    const double L = g.half_length();
    Field f(g);
    for (int i = 0; i < g.npts[0]; ++i) {
      const double x = g.coord(0, i);
      const double t = (x - 0.25 * L) / (0.5 * L);
      const double chi = -tw.jump * detail::smoothstep_cinf(t);
      f.values[i] = std::polar(1.0, 0.3) * eval_vc(w, x - 1.7) * std::polar(1.0, chi);
    }
    CHECK(orbital_distance(f, c, 20.0) < 1e-8);
  }

  SECTION("small perturbation gives a small positive distance") {
    Field f = tw.field;
    for (int i = 0; i < g.npts[0]; ++i) {
      const double x = g.coord(0, i);
      f.values[i] += 0.01 * std::exp(-x * x / 8.0);
    }
    const double d = orbital_distance(f, c, 20.0);
    CHECK(d > 0.0);
    CHECK(d < 0.1);
  }
}

TEST_CASE("stability experiment basics", "[dynamics]") {
  const Grid g = line_grid(32, 2048);
  // delta = 0: pure numerical drift
  const auto res = stability_experiment(0.5, 0.0, 2.0, 20.0, g, 1, 2e-3, 250);
  CHECK(res.max_distance < 1e-6);
}

TEST_CASE("obstacle flow", "[dynamics]") {
  const Grid g = Grid::make(2, 4, 64);

  SECTION("zero potential stays constant") {
    const auto res = obstacle_flow(Potential::zero(g), 0.2, 1.0, 2e-3, 0.5, 100);
    double sup = 0.0;
    for (const auto& z : res.field.values) sup = std::max(sup, std::abs(z - cdouble{1.0, 0.0}));
    CHECK(sup < 1e-12);
    CHECK(res.settled);
    CHECK(res.events.empty());
  }

  SECTION("small obstacle settles near the stationary state") {
    const double c = 0.3;
    const auto tr = TrustRegion::defaults(c);
    const Potential V = Potential::gaussian(g, 0.015, 1.5);
    REQUIRE(V.l2_norm <= tr.v_l2_gate);

    const auto dyn = obstacle_flow(V, c, 40.0, 2e-3, 20.0, 500, 1e-4);
    const auto fix = local_minimize_hamiltonian(c, V, tr, g, 30000, 1e-10);
    REQUIRE(fix.status == SolveStatus::converged);

    double l2 = 0.0;
    for (std::size_t i = 0; i < dyn.field.values.size(); ++i)
      l2 += std::norm(dyn.field.values[i] - fix.field.values[i]);
    l2 = std::sqrt(l2 * g.cell_volume());
    CHECK(l2 < 1e-2);
    CHECK(dyn.settled);
  }
}
