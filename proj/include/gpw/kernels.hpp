#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gpw/common.hpp"
#include "gpw/field.hpp"

namespace gpw {

enum class KernelKind { K0, Kj, Ljk, Rjk, Hjk, H1jk, Kjk };

/// Fourier multiplier of the convolution system behind the travelling-wave
/// equation. Indices j, k are 1-based and only used by the kinds that need
/// them. The common denominator is |xi|^4 + 2|xi|^2 - c^2 xi_1^2.
struct KernelSymbol {
  KernelKind kind;
  int dim;
  double c;
  int j = 1;
  int k = 1;

  KernelSymbol(KernelKind kind_, int dim_, double c_, int j_ = 1, int k_ = 1)
      : kind(kind_), dim(dim_), c(c_), j(j_), k(k_) {
    if (dim < 2 || dim > 3) throw std::invalid_argument("KernelSymbol: dim must be 2 or 3");
    if (j < 1 || j > dim || k < 1 || k > dim)
      throw std::invalid_argument("KernelSymbol: indices must lie in 1..dim");
    if (c < 0.0) throw std::invalid_argument("KernelSymbol: c >= 0");
  }
};

inline double symbol_eval(const KernelSymbol& s, const std::vector<double>& xi) {
  if (static_cast<int>(xi.size()) != s.dim) throw std::invalid_argument("symbol_eval: xi size");
  double n2 = 0.0;
  for (double x : xi) n2 += x * x;
  const double x1 = xi[0];
  const double xj = xi[s.j - 1];
  const double xk = xi[s.k - 1];
  const double den = n2 * n2 + 2.0 * n2 - s.c * s.c * x1 * x1;

  if (s.kind == KernelKind::Rjk) {
    if (n2 == 0.0) throw std::domain_error("symbol_eval: R_{jk} undefined at xi = 0");
    return xj * xk / n2;
  }
  if (std::abs(den) <= 1e-15 * std::max(1.0, n2 * n2 + 2.0 * n2 + s.c * s.c * x1 * x1))
    throw std::domain_error("symbol_eval: singular denominator");

  switch (s.kind) {
    case KernelKind::K0:
      return n2 / den;
    case KernelKind::Kj:
      return x1 * xj / den;
    case KernelKind::Ljk:
      return x1 * x1 * xj * xk / (n2 * den);
    case KernelKind::Hjk:
      return xj * xk * n2 / den;
    case KernelKind::H1jk:
      return x1 * xj * xk / den;
    case KernelKind::Kjk:
      return xj * xk * (2.0 + n2) / den;
    default:
      throw std::logic_error("symbol_eval: unreachable");
  }
}

/// Closed-form || K0^hat ||_{L^2}^2: pi^2 arcsin(c/sqrt2)/c in 3D,
/// pi / sqrt(2(2-c^2)) in 2D.
inline double k0_l2_norm_sq(double c, int dim) {
  if (!(c > 0.0) || !(c < kSqrt2)) throw std::domain_error("k0_l2_norm_sq: 0 < c < sqrt(2)");
  if (dim == 3) return kPi * kPi / c * std::asin(c / kSqrt2);
  if (dim == 2) return kPi / std::sqrt(2.0 * (2.0 - c * c));
  throw std::domain_error("k0_l2_norm_sq: dim must be 2 or 3");
}

/// Numerical cross-check of the closed forms. Radial direction mapped by
/// r = tan t onto [0, pi/2); angular direction uniform. Composite Simpson.
inline double k0_l2_norm_sq_quadrature(double c, int dim, int nr = 2000, int nang = 800) {
  if (!(c > 0.0) || !(c < kSqrt2)) throw std::domain_error("k0_l2_norm_sq_quadrature: 0<c<sqrt2");
  auto simpson = [](auto&& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  // |K0^hat(xi)|^2 = 1 / (r^2 + 2 - c^2 u^2)^2 with u = xi_1 / |xi|
  if (dim == 2) {
    auto inner_r = [&](double theta) {
      const double u = std::cos(theta);
      auto f = [&](double t) {
        const double r = std::tan(t);
        const double jac = 1.0 + r * r;  // dr = (1 + r^2) dt
        const double den = r * r + 2.0 - c * c * u * u;
        return r / (den * den) * jac;
      };
      return simpson(f, 0.0, 0.5 * kPi - 1e-9, nr);
    };
    return simpson(inner_r, 0.0, 2.0 * kPi, nang);
  }
  if (dim == 3) {
    auto inner_r = [&](double u) {
      auto f = [&](double t) {
        const double r = std::tan(t);
        const double jac = 1.0 + r * r;
        const double den = r * r + 2.0 - c * c * u * u;
        return r * r / (den * den) * jac;
      };
      return simpson(f, 0.0, 0.5 * kPi - 1e-9, nr);
    };
    return 2.0 * kPi * simpson(inner_r, -1.0, 1.0, nang);
  }
  throw std::domain_error("k0_l2_norm_sq_quadrature: dim must be 2 or 3");
}

/// Minimum of the kernel denominator over directions at fixed radius.
/// Positive for subsonic c; for c > sqrt(2) it crosses zero on the cone
/// r^2 = c^2 sigma_1^2 - 2 at admissible angles.
inline double denominator_min_on_sphere(double c, int dim, double r, int nsamples = 4096) {
  if (!(r > 0.0)) throw std::domain_error("denominator_min_on_sphere: r > 0");
  const double r2 = r * r;
  double best = r2 * r2 + 2.0 * r2;  // sigma_1 = 0
  for (int i = 0; i <= nsamples; ++i) {
    const double s1 = -1.0 + 2.0 * i / nsamples;  // covers both dims; den depends on sigma_1 only
    const double den = r2 * r2 + 2.0 * r2 - c * c * r2 * s1 * s1;
    best = std::min(best, den);
  }
  (void)dim;
  return best;
}

struct FarFieldCoeffs {
  double alpha = 0.0;
  std::vector<double> betas;  ///< beta_j for the transverse axes j = 2..N
  cdouble lambda_inf = {1.0, 0.0};
};

/// Stretch factor (1 - c^2/2 + c^2 sigma_1^2/2) of the angular profile.
inline double farfield_stretch(double c, double sigma1) {
  return 1.0 - 0.5 * c * c + 0.5 * c * c * sigma1 * sigma1;
}

/// First-order far-field coefficients from the invariants of the solution.
inline FarFieldCoeffs farfield_coeffs(double E, double p, const std::vector<double>& p_transverse,
                                      double c, int dim) {
  if (!(c >= 0.0) || !(c < kSqrt2)) throw std::domain_error("farfield_coeffs: 0 <= c < sqrt2");
  if (dim < 2 || dim > 3) throw std::domain_error("farfield_coeffs: dim 2 or 3");
  const double N = dim;
  const double gamma_half = (dim == 2) ? 1.0 : 0.5 * std::sqrt(kPi);  // Gamma(N/2)
  const double prefac = gamma_half / (2.0 * std::pow(kPi, 0.5 * N));
  const double stretch = std::pow(1.0 - 0.5 * c * c, 0.5 * (N - 3.0));
  FarFieldCoeffs out;
  out.alpha = prefac * stretch *
              (0.5 * (4.0 - N) * c * E + (2.0 + 0.5 * (N - 3.0) * c * c) * p);
  const double beta_pref = gamma_half / std::pow(kPi, 0.5 * N) *
                           std::pow(1.0 - 0.5 * c * c, 0.5 * (N - 1.0));
  for (double pj : p_transverse) out.betas.push_back(beta_pref * pj);
  return out;
}

/// Angular profile v_inf(sigma) = [alpha sigma_1 + sum_j beta_j sigma_j] /
/// (1 - c^2/2 + c^2 sigma_1^2 / 2)^{N/2}.
inline double farfield_profile(const FarFieldCoeffs& co, const std::vector<double>& sigma,
                               double c) {
  const int dim = static_cast<int>(co.betas.size()) + 1;
  if (static_cast<int>(sigma.size()) != dim)
    throw std::invalid_argument("farfield_profile: sigma size");
  double n2 = 0.0;
  for (double s : sigma) n2 += s * s;
  if (std::abs(n2 - 1.0) > 1e-8) throw std::invalid_argument("farfield_profile: |sigma| != 1");
  double num = co.alpha * sigma[0];
  for (std::size_t j = 0; j < co.betas.size(); ++j) num += co.betas[j] * sigma[j + 1];
  return num / std::pow(farfield_stretch(c, sigma[0]), 0.5 * dim);
}

struct FarFieldFit {
  FarFieldCoeffs measured;
  FarFieldCoeffs predicted;
  double relative_mismatch = 0.0;  ///< L2 residual of the fit over the annulus / signal norm
  double alpha_relative_error = 0.0;
  bool annulus_ok = true;
};

/// Least-squares far-field read-off on an annulus of a 2D field:
/// |x|^{N-1}(v - lambda_inf) ~ i lambda_inf v_inf(x/|x|). lambda_inf is the
/// modulus-weighted mean phase on the outer rim. Returns the fitted
/// coefficients together with the prediction from the measured E, p of the
/// field itself.
inline FarFieldFit fit_farfield(const Field& f, double c, double r_inner, double r_outer) {
  if (f.grid.dim != 2) throw std::invalid_argument("fit_farfield: 2D only");
  const Grid& g = f.grid;
  FarFieldFit out;
  if (!(r_inner > 0.0) || !(r_outer > r_inner) || r_outer > g.half_length())
    out.annulus_ok = false;

  // mean phase on the outer 10% of the annulus
  double cs = 0.0, sn = 0.0;
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int) {
    const double x1 = g.coord(0, i), x2 = g.coord(1, j);
    const double r = std::hypot(x1, x2);
    if (r >= 0.9 * r_outer && r <= r_outer) {
      const double m = std::abs(f.values[idx]);
      cs += m * f.values[idx].real();
      sn += m * f.values[idx].imag();
    }
  });
  const cdouble lam = std::polar(1.0, std::atan2(sn, cs));

  // least squares z ~ alpha sigma_1/D + beta sigma_2/D with D the stretch factor
  double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0, bb = 0.0;
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int) {
    const double x1 = g.coord(0, i), x2 = g.coord(1, j);
    const double r = std::hypot(x1, x2);
    if (r < r_inner || r > r_outer) return;
    const double s1 = x1 / r, s2 = x2 / r;
    const cdouble y = r * (f.values[idx] - lam);  // N - 1 = 1
    const double z = rdot(y, cdouble(0.0, 1.0) * lam);
    const double D = farfield_stretch(c, s1);
    const double e1 = s1 / D, e2 = s2 / D;
    a11 += e1 * e1;
    a12 += e1 * e2;
    a22 += e2 * e2;
    b1 += e1 * z;
    b2 += e2 * z;
    bb += z * z;
  });
  FarFieldCoeffs meas;
  meas.lambda_inf = lam;
  const double det = a11 * a22 - a12 * a12;
  if (std::abs(det) > 1e-300) {
    meas.alpha = (a22 * b1 - a12 * b2) / det;
    meas.betas = {(a11 * b2 - a12 * b1) / det};
  } else {
    meas.alpha = (a11 > 0.0) ? b1 / a11 : 0.0;
    meas.betas = {0.0};
  }
  out.measured = meas;
  const double explained = meas.alpha * b1 + meas.betas[0] * b2;
  out.relative_mismatch = (bb > 0.0) ? std::sqrt(std::max(0.0, bb - explained) / bb) : 0.0;

  const double E = energy(f);
  const double p = momentum(f);
  out.predicted = farfield_coeffs(E, p, {momentum_axis(f, 1)}, c, 2);
  out.alpha_relative_error =
      std::abs(out.measured.alpha - out.predicted.alpha) / std::max(1e-300, std::abs(out.predicted.alpha));
  return out;
}

/// Riesz kernel R_{jk}(x) away from the origin (1-based indices).
inline double riesz_kernel(int j, int k, const std::vector<double>& x, int dim) {
  if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("riesz_kernel: x size");
  if (j < 1 || j > dim || k < 1 || k > dim) throw std::invalid_argument("riesz_kernel: indices");
  double n2 = 0.0;
  for (double v : x) n2 += v * v;
  if (n2 == 0.0) throw std::domain_error("riesz_kernel: singular at x = 0");
  const double N = dim;
  const double gamma_half = (dim == 2) ? 1.0 : 0.5 * std::sqrt(kPi);
  const double pref = gamma_half / (2.0 * std::pow(kPi, 0.5 * N));
  const double delta = (j == k) ? 1.0 : 0.0;
  return pref * (delta * n2 - N * x[j - 1] * x[k - 1]) / std::pow(n2, 0.5 * (N + 2.0));
}

struct DecayIterationResult {
  double exponent = 0.0;     ///< measured tail exponent of the fixed point
  int iterations = 0;
  bool converged = false;
  std::vector<double> fixed_point;
};

/// Fixed-point iteration f <- K * f^r on a 1D grid (linear convolution with
/// zero padding), sup-normalized each sweep: the bare map's nonzero fixed
/// point is unstable for r > 1, while normalization preserves the tail
/// exponent, which is what the model statement is about. The exponent of
/// the limit is fitted on the outer decade.
template <class KernelFn, class SeedFn>
DecayIterationResult toy_decay_iteration(KernelFn&& kernel, double r, SeedFn&& seed,
                                         double half_length = 400.0, int npts = 1 << 14,
                                         int max_iters = 200, double tol = 1e-10) {
  if (!(r > 1.0)) throw std::domain_error("toy_decay_iteration: r > 1 required");
  const double h = 2.0 * half_length / npts;
  std::vector<double> K(npts), f(npts);
  for (int i = 0; i < npts; ++i) {
    const double x = -half_length + i * h;
    K[i] = kernel(x);
    f[i] = seed(x);
  }

  // zero-padded circular convolution = linear convolution on the window
  const int M = 2 * npts;
  Grid cg(1, 1, {M, 1, 1});  // geometry unused; M must be a power of two
  std::vector<cdouble> Kh(M, 0.0);
  for (int i = 0; i < npts; ++i) Kh[i] = K[i];
  fft::forward(Kh, cg);

  DecayIterationResult out;
  std::vector<cdouble> buf(M);
  for (int it = 0; it < max_iters; ++it) {
    std::fill(buf.begin(), buf.end(), cdouble(0.0, 0.0));
    for (int i = 0; i < npts; ++i) buf[i] = std::pow(std::abs(f[i]), r);
    fft::forward(buf, cg);
    for (int i = 0; i < M; ++i) buf[i] *= Kh[i] * h;
    fft::inverse(buf, cg);
    double sup = 0.0;
    std::vector<double> fn(npts);
    for (int i = 0; i < npts; ++i) {
      // center of the linear convolution lives at offset npts/2
      fn[i] = buf[i + npts / 2].real();
      sup = std::max(sup, std::abs(fn[i]));
    }
    out.iterations = it + 1;
    if (!std::isfinite(sup)) return out;  // divergence, converged stays false
    if (sup == 0.0) {
      f.assign(npts, 0.0);
      out.converged = true;
      break;
    }
    double diff = 0.0, norm = 0.0;
    for (int i = 0; i < npts; ++i) {
      fn[i] /= sup;
      diff += std::abs(fn[i] - f[i]);
      norm += std::abs(fn[i]);
    }
    f = std::move(fn);
    if (diff <= tol * norm) {
      out.converged = true;
      break;
    }
  }

  // log-log fit on [0.05, 0.5] of the half length
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int i = 0; i < npts; ++i) {
    const double x = -half_length + i * h;
    if (x < 0.05 * half_length || x > 0.5 * half_length) continue;
    if (std::abs(f[i]) <= 0.0) continue;
    const double lx = std::log(x), ly = std::log(std::abs(f[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt >= 2) out.exponent = -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  out.fixed_point = std::move(f);
  return out;
}

}  // namespace gpw
