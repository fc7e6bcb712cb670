#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gpw/common.hpp"
#include "gpw/wave1d.hpp"

namespace gpw {

enum class ProfileKind { wave, bridge, sequence_element };

/// Complex samples on ordered abscissae. Values are plain samples; all
/// quadratures below are composite trapezoid on the given nodes.
struct SampledProfile1D {
  std::vector<double> xs;
  std::vector<cdouble> values;
  ProfileKind kind = ProfileKind::wave;

  std::size_t size() const { return xs.size(); }
};

inline SampledProfile1D sample_wave(const Wave1D& w, double half_length, int npts) {
  SampledProfile1D p;
  p.kind = ProfileKind::wave;
  p.xs.resize(npts);
  p.values.resize(npts);
  const double h = 2.0 * half_length / (npts - 1);
  for (int i = 0; i < npts; ++i) {
    p.xs[i] = -half_length + i * h;
    p.values[i] = eval_vc(w, p.xs[i]);
  }
  return p;
}

namespace detail {

inline bool uniform_spacing(const std::vector<double>& xs) {
  if (xs.size() < 3) return true;
  const double h = xs[1] - xs[0];
  for (std::size_t i = 1; i + 1 < xs.size(); ++i)
    if (std::abs((xs[i + 1] - xs[i]) - h) > 1e-12 * std::max(1.0, std::abs(h))) return false;
  return true;
}

/// First derivative of samples; 4th-order central on uniform grids,
/// 3-point nonuniform otherwise, one-sided at the ends.
template <class T>
std::vector<T> derivative(const std::vector<double>& xs, const std::vector<T>& v) {
  const std::size_t n = xs.size();
  if (n < 5) throw std::invalid_argument("derivative: need at least 5 samples");
  std::vector<T> d(n);
  if (uniform_spacing(xs)) {
    const double h = xs[1] - xs[0];
    for (std::size_t i = 2; i + 2 < n; ++i)
      d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
    d[1] = (v[2] - v[0]) / (2.0 * h);
    d[n - 2] = (v[n - 1] - v[n - 3]) / (2.0 * h);
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = xs[i] - xs[i - 1], hr = xs[i + 1] - xs[i];
      d[i] = (hl * hl * v[i + 1] - hr * hr * v[i - 1] + (hr * hr - hl * hl) * v[i]) /
             (hl * hr * (hl + hr));
    }
    d[0] = (v[1] - v[0]) / (xs[1] - xs[0]);
    d[n - 1] = (v[n - 1] - v[n - 2]) / (xs[n - 1] - xs[n - 2]);
  }
  return d;
}

template <class T>
double trapezoid_samples(const std::vector<double>& xs, const std::vector<T>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) s += 0.5 * (xs[i + 1] - xs[i]) * (f[i] + f[i + 1]);
  return s;
}

}  // namespace detail

/// Ginzburg-Landau energy of the samples, int 1/2|v'|^2 + 1/4 (1-|v|^2)^2.
inline double profile_energy(const SampledProfile1D& p) {
  const auto d = detail::derivative(p.xs, p.values);
  std::vector<double> e(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double g2 = std::norm(d[i]);
    const double eta = 1.0 - std::norm(p.values[i]);
    e[i] = 0.5 * g2 + 0.25 * eta * eta;
  }
  return detail::trapezoid_samples(p.xs, e);
}

/// Renormalized momentum 1/2 int (1 - rho^2) phi'; requires min |v| > 0.
inline double profile_momentum_renorm(const SampledProfile1D& p) {
  const auto d = detail::derivative(p.xs, p.values);
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r2 = std::norm(p.values[i]);
    if (r2 <= 0.0) throw std::domain_error("profile_momentum_renorm: vanishing modulus");
    const double phi_prime = std::imag(std::conj(p.values[i]) * d[i]) / r2;
    m[i] = 0.5 * (1.0 - r2) * phi_prime;
  }
  return detail::trapezoid_samples(p.xs, m);
}

/// Physical momentum 1/2 int <i v', v> = -1/2 int rho^2 phi'.
inline double profile_momentum_physical(const SampledProfile1D& p) {
  const auto d = detail::derivative(p.xs, p.values);
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    m[i] = 0.5 * std::imag(std::conj(d[i]) * p.values[i]);
  return detail::trapezoid_samples(p.xs, m);
}

/// Worst ratio |(1-rho^2) phi'| rho / (sqrt(2) e(v)) over the samples.
/// The bound claims the ratio never exceeds 1. Where e(v) < 1e-14 the
/// inequality is vacuous and the ratio is reported as 0.
inline double pointwise_momentum_bound_check(const SampledProfile1D& p) {
  const auto d = detail::derivative(p.xs, p.values);
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double rho2 = std::norm(p.values[i]);
    if (rho2 <= 0.0) throw std::domain_error("pointwise_momentum_bound_check: vanishing modulus");
    const double rho = std::sqrt(rho2);
    const double g2 = std::norm(d[i]);
    const double eta = 1.0 - rho2;
    const double e = 0.5 * g2 + 0.25 * eta * eta;
    if (e < 1e-14) continue;
    const double phi_prime = std::imag(std::conj(p.values[i]) * d[i]) / rho2;
    worst = std::max(worst, std::abs(eta * phi_prime) * rho / (kSqrt2 * e));
  }
  return worst;
}

struct BridgeResult {
  SampledProfile1D profile;
  double ell = 0.0;
  double measured_q = 0.0;
  double measured_energy = 0.0;
  double delta = 0.0;
  double endpoint_modulus = 0.0;
};

/// Piecewise bridge on [0, ell] carrying renormalized momentum q at energy
/// cost at most 14|q|. Tent profile f_lambda and phase tent psi_lambda with
/// lambda = 1/(8|q|), rho = sqrt(1 - delta - f_lambda), delta = min(mu^2, 1/lambda),
/// ell = 2 lambda; the phase sign follows the sign of q.
inline BridgeResult bridge_map(double q, double mu, int points_per_quarter = 4096) {
  if (!(std::abs(q) > 0.0) || std::abs(q) > 1.0 / 32.0)
    throw std::domain_error("bridge_map: need 0 < |q| <= 1/32");
  if (!(mu > 0.0) || mu > 0.25) throw std::domain_error("bridge_map: need 0 < mu <= 1/4");

  const double lambda = 1.0 / (8.0 * std::abs(q));
  const double delta = std::min(mu * mu, 1.0 / lambda);
  const double ell = 2.0 * lambda;
  const double sign = q > 0.0 ? 1.0 : -1.0;

  auto f = [&](double s) {
    const double u = s / lambda;
    if (u <= 0.5) return u / lambda;
    if (u <= 1.0) return (1.0 - u) / lambda;
    return 0.0;
  };
  auto fp = [&](double u) {  // derivative of f_lambda by panel midpoint argument u = s/lambda
    if (u < 0.5) return 1.0 / (lambda * lambda);
    if (u < 1.0) return -1.0 / (lambda * lambda);
    return 0.0;
  };
  auto psi = [&](double s) {
    const double u = s / lambda;
    return (u <= 1.0 ? u : 2.0 - u);
  };
  auto psip = [&](double u) { return (u < 1.0 ? 1.0 : -1.0) / lambda; };

  const int npts = 4 * points_per_quarter + 1;  // corners at s = 0, l/2, l, 2l land on nodes
  BridgeResult out;
  out.ell = ell;
  out.delta = delta;
  out.profile.kind = ProfileKind::bridge;
  out.profile.xs.resize(npts);
  out.profile.values.resize(npts);
  const double h = ell / (npts - 1);
  for (int i = 0; i < npts; ++i) {
    const double s = i * h;
    const double rho = std::sqrt(1.0 - delta - f(s));
    out.profile.xs[i] = s;
    out.profile.values[i] = std::polar(rho, sign * psi(s));
  }
  out.endpoint_modulus = std::abs(out.profile.values[0]);

  // Panel-wise quadrature with the analytic piecewise derivatives. The
  // momentum integrand is linear per panel, so trapezoid is exact there.
  double mq = 0.0, me = 0.0;
  for (int i = 0; i + 1 < npts; ++i) {
    const double um = (i + 0.5) * h / lambda;
    const double fpv = fp(um), ppv = sign * psip(um);
    double qa = 0.0, qb = 0.0, ea = 0.0, eb = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double s = (i + k) * h;
      const double fv = f(s);
      const double one_m = 1.0 - delta - fv;
      const double qv = 0.5 * (fv + delta) * ppv;
      const double rp2 = fpv * fpv / (4.0 * one_m);  // (rho')^2 = (f')^2 / (4(1-delta-f))
      const double ev = 0.5 * (rp2 + one_m * ppv * ppv) + 0.25 * (fv + delta) * (fv + delta);
      (k == 0 ? qa : qb) = qv;
      (k == 0 ? ea : eb) = ev;
    }
    mq += 0.5 * h * (qa + qb);
    me += 0.5 * h * (ea + eb);
  }
  out.measured_q = mq;
  out.measured_energy = me;
  return out;
}

struct ZeroEnergyResult {
  SampledProfile1D profile;
  double energy = 0.0;
  double momentum = 0.0;  ///< measured physical momentum 1/2 int <i v', v>
};

/// Unimodular map exp(i psi_n) with piecewise-linear phase dropping by 2p
/// across [-n, n]; its energy is p^2/n and its physical momentum is p.
inline ZeroEnergyResult zero_energy_sequence(double p, int n) {
  if (!(p > 0.0)) throw std::domain_error("zero_energy_sequence: p > 0");
  if (n < 1) throw std::domain_error("zero_energy_sequence: n >= 1");

  const double pad = 1.0;
  const double a = -(n + pad), b = n + pad;
  const int per_unit = std::max(8, 4096 / (2 * n + 2));
  const int npts = static_cast<int>((b - a) * per_unit) + 1;
  const double h = (b - a) / (npts - 1);

  auto psi = [&](double x) {
    if (x <= -n) return 0.0;
    if (x >= n) return -2.0 * p;
    return -p * (x + n) / n;
  };

  ZeroEnergyResult out;
  out.profile.kind = ProfileKind::sequence_element;
  out.profile.xs.resize(npts);
  out.profile.values.resize(npts);
  for (int i = 0; i < npts; ++i) {
    const double x = a + i * h;
    out.profile.xs[i] = x;
    out.profile.values[i] = std::polar(1.0, psi(x));
  }

  // psi' is piecewise constant; integrate per panel by midpoint classification
  double e = 0.0, mom = 0.0;
  for (int i = 0; i + 1 < npts; ++i) {
    const double xm = a + (i + 0.5) * h;
    const double pp = (xm > -n && xm < n) ? -p / n : 0.0;
    e += 0.5 * pp * pp * h;
    mom += -0.5 * pp * h;
  }
  out.energy = e;
  out.momentum = mom;
  return out;
}

}  // namespace gpw
