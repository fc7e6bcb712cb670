#pragma once

#include <cmath>

#include "gpw/field.hpp"
#include "gpw/wave1d.hpp"

namespace gpw {

namespace detail {

/// C-infinity monotone step, 0 for t <= 0 and 1 for t >= 1.
inline double smoothstep_cinf(double t) {
  auto b = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  const double num = b(t);
  const double den = num + b(1.0 - t);
  return den > 0.0 ? num / den : (t > 0.5 ? 1.0 : 0.0);
}

inline double smoothstep_cinf_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  auto b = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  auto bp = [&](double s) { return s > 0.0 ? b(s) / (s * s) : 0.0; };
  const double den = b(t) + b(1.0 - t);
  return (bp(t) * b(1.0 - t) + b(t) * bp(1.0 - t)) / (den * den);
}

}  // namespace detail

struct TwistedWave {
  Field field;            ///< exactly periodic sample of v_c times the phase ramp
  double twist_energy;    ///< quadrature of the ramp's added energy density
  double twist_momentum;  ///< quadrature of the ramp's added momentum density
  double jump;            ///< total phase variation of v_c, 2 arctan(eps/c)
};

/// Periodize v_c on [-pi n, pi n): the limits v_c(+-inf) differ by the phase
/// jump, so the profile is multiplied by a smooth ramp exp(i chi) carrying
/// -jump across [L/4, 3L/4], far from the core at 0. The ramp's exact
/// energy/momentum contributions are returned so closed forms stay usable:
///   e(w) = e(v_c) + rho^2 phi' chi' + rho^2 chi'^2 / 2
///   p(w) = -1/2 int rho^2 (phi' + chi')
inline TwistedWave embed_dark_1d(const Wave1D& w, const Grid& g) {
  if (g.dim != 1) throw std::invalid_argument("embed_dark_1d: 1D grid required");
  const double L = g.half_length();
  const double x0 = 0.25 * L, x1 = 0.75 * L;
  const double J = phase_jump(w);

  TwistedWave out;
  out.jump = J;
  out.field = Field(g);

  auto chi = [&](double x) { return -J * detail::smoothstep_cinf((x - x0) / (x1 - x0)); };
  auto chi_prime = [&](double x) {
    return -J * detail::smoothstep_cinf_derivative((x - x0) / (x1 - x0)) / (x1 - x0);
  };

  const int N = g.npts[0];
  const double h = g.spacing(0);
  double de = 0.0, dp = 0.0;
  for (int i = 0; i < N; ++i) {
    const double x = g.coord(0, i);
    const cdouble v = eval_vc(w, x);
    out.field.values[i] = v * std::polar(1.0, chi(x));

    const double chip = chi_prime(x);
    const double rho2 = std::norm(v);
    const double phip = (w.c > 0.0) ? eval_phase_derivative(w, x) : 0.0;
    de += (rho2 * phip * chip + 0.5 * rho2 * chip * chip) * h;
    dp += -0.5 * rho2 * chip * h;
  }
  out.twist_energy = de;
  out.twist_momentum = dp;
  return out;
}

}  // namespace gpw
