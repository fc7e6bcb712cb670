#pragma once

#include <cmath>
#include <stdexcept>

#include "gpw/common.hpp"

namespace gpw {

/// Subsonic 1D travelling wave of speed c, 0 <= c < sqrt(2).
/// Caches eps = sqrt(2 - c^2); the amplitude/width scale of the profile.
struct Wave1D {
  double c;
  double eps;

  explicit Wave1D(double speed) : c(speed), eps(0.0) {
    if (!(speed >= 0.0) || !(speed < kSqrt2))
      throw std::domain_error("Wave1D: speed must satisfy 0 <= c < sqrt(2)");
    eps = std::sqrt(2.0 - speed * speed);
  }
};

/// Profile value: sqrt((2-c^2)/2) tanh(eps x / 2) - i c / sqrt(2).
inline cdouble eval_vc(const Wave1D& w, double x) {
  return {w.eps / kSqrt2 * std::tanh(0.5 * w.eps * x), -w.c / kSqrt2};
}

inline cdouble eval_vc_derivative(const Wave1D& w, double x) {
  const double t = std::cosh(0.5 * w.eps * x);
  return {w.eps * w.eps / (2.0 * kSqrt2 * t * t), 0.0};
}

/// eta = 1 - |v_c|^2 = (2-c^2) / (2 cosh^2(eps x / 2)).
inline double eval_eta(const Wave1D& w, double x) {
  const double t = std::cosh(0.5 * w.eps * x);
  return w.eps * w.eps / (2.0 * t * t);
}

/// Phase of v_c relative to its value at -infinity being -pi + phase(+inf)...
/// Measured so that phi(x) = arctan((eps/c) tanh(eps x/2)); defined for c > 0.
inline double eval_phase(const Wave1D& w, double x) {
  if (w.c <= 0.0) throw std::domain_error("eval_phase: phase lifting is singular at c = 0");
  return std::atan(w.eps / w.c * std::tanh(0.5 * w.eps * x));
}

/// phi' = c eta / (2 - 2 eta); rejects c = 0 where the lifting degenerates
/// to a point mass at the kink zero.
inline double eval_phase_derivative(const Wave1D& w, double x) {
  if (w.c <= 0.0) throw std::domain_error("eval_phase_derivative: requires c > 0");
  const double eta = eval_eta(w, x);
  return w.c * eta / (2.0 - 2.0 * eta);
}

/// Total phase variation phi(+inf) - phi(-inf) = 2 arctan(eps/c); equals pi at c = 0.
inline double phase_jump(const Wave1D& w) { return 2.0 * std::atan2(w.eps, w.c); }

struct DispersionPoint {
  double c;
  double energy;
  double p_renorm;
  double p_physical;
  double mass;
};

/// Closed-form energy, renormalized momentum, physical momentum and mass of v_c.
inline DispersionPoint dispersion(const Wave1D& w) {
  DispersionPoint d;
  d.c = w.c;
  d.energy = w.eps * w.eps * w.eps / 3.0;
  d.p_renorm = 0.5 * kPi - std::atan(w.c / w.eps) - 0.5 * w.c * w.eps;
  d.p_physical = -0.5 * w.c * w.eps;
  d.mass = -w.eps;
  return d;
}

/// Inverse of c -> p(v_c) on (0, pi/2); bisection to 1e-14 width plus one
/// Newton polish using dp/dc = -sqrt(2 - c^2).
inline double speed_from_momentum(double p) {
  if (!(p > 0.0) || !(p < 0.5 * kPi))
    throw std::domain_error("speed_from_momentum: p must lie in (0, pi/2)");
  auto pr = [](double c) { return dispersion(Wave1D(c)).p_renorm; };
  double lo = 0.0, hi = kSqrt2 - 1e-16;
  // p is decreasing in c
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pr(mid) > p)
      lo = mid;
    else
      hi = mid;
  }
  double c = 0.5 * (lo + hi);
  const double slope = -std::sqrt(2.0 - c * c);
  if (slope != 0.0) {
    double cn = c - (pr(c) - p) / slope;
    if (cn > 0.0 && cn < kSqrt2) c = cn;
  }
  return c;
}

struct SlopePair {
  double dp_dc;
  double dE_dp;
};

/// Central finite differences of the closed forms; dp_dc should match
/// -sqrt(2-c^2) and dE_dp should match c.
inline SlopePair dispersion_slope_check(double c, double h) {
  if (!(c > 0.0) || !(c < kSqrt2)) throw std::domain_error("dispersion_slope_check: 0 < c < sqrt(2)");
  const double hl = std::min(h, 0.5 * std::min(c, kSqrt2 - c));
  const DispersionPoint a = dispersion(Wave1D(c - hl));
  const DispersionPoint b = dispersion(Wave1D(c + hl));
  SlopePair s;
  s.dp_dc = (b.p_renorm - a.p_renorm) / (2.0 * hl);
  s.dE_dp = (b.energy - a.energy) / (b.p_renorm - a.p_renorm);
  return s;
}

/// N_eps(x) = eta_c(x/eps)/eps^2; equals the KdV soliton profile
/// N(x) = 1/(2 cosh^2(x/2)) identically in c.
inline double kdv_rescale(const Wave1D& w, double x) {
  return eval_eta(w, x / w.eps) / (w.eps * w.eps);
}

inline double kdv_soliton(double x) {
  const double t = std::cosh(0.5 * x);
  return 0.5 / (t * t);
}

struct KdvGap {
  double gap;        ///< sqrt(2) p(v_c) - E(v_c), closed forms
  double predicted;  ///< -(eps^5/4) E_KdV(N), E_KdV by quadrature
};

/// Transonic energy gap against the KdV prediction. The soliton energy
/// E_KdV(N) = 1/2 int N'^2 - int N^3 is evaluated by quadrature.
inline KdvGap kdv_energy_gap(const Wave1D& w) {
  const DispersionPoint d = dispersion(w);
  KdvGap g;
  g.gap = kSqrt2 * d.p_renorm - d.energy;
  auto nprime = [](double x) {
    const double c2 = std::cosh(0.5 * x);
    return -0.5 * std::sinh(0.5 * x) / (c2 * c2 * c2);
  };
  auto integrand = [&](double x) {
    const double n = kdv_soliton(x);
    const double np = nprime(x);
    return 0.5 * np * np - n * n * n;
  };
  const double ekdv = trapezoid(integrand, -60.0, 60.0, 20001);
  const double e5 = std::pow(w.eps, 5);
  g.predicted = -0.25 * e5 * ekdv;
  return g;
}

}  // namespace gpw
