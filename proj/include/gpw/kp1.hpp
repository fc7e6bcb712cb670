#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gpw/field.hpp"

namespace gpw {

inline double lump(double x1, double x2) {
  const double q = 3.0 + x1 * x1 + x2 * x2;
  return 24.0 * (3.0 - x1 * x1 + x2 * x2) / (q * q);
}

/// Real 2D field for the KP-I solitary wave checks. The antiderivative д1^{-1}
/// requires zero mean along every x1 line; the flag records that the values
/// have been corrected.
struct KPField {
  Grid grid;
  std::vector<double> values;
  bool zero_mean_x1 = false;

  KPField() = default;
  explicit KPField(const Grid& g) : grid(g), values(g.total(), 0.0) {
    if (g.dim != 2) throw std::invalid_argument("KPField: dim 2 required");
  }
};

inline void kp_remove_line_means(KPField& w) {
  const Grid& g = w.grid;
  for (int j = 0; j < g.npts[1]; ++j) {
    double m = 0.0;
    for (int i = 0; i < g.npts[0]; ++i) m += w.values[g.index(i, j)];
    m /= g.npts[0];
    for (int i = 0; i < g.npts[0]; ++i) w.values[g.index(i, j)] -= m;
  }
  w.zero_mean_x1 = true;
}

inline double kp_max_line_mean(const KPField& w) {
  const Grid& g = w.grid;
  double worst = 0.0;
  for (int j = 0; j < g.npts[1]; ++j) {
    double m = 0.0;
    for (int i = 0; i < g.npts[0]; ++i) m += w.values[g.index(i, j)];
    worst = std::max(worst, std::abs(m / g.npts[0]));
  }
  return worst;
}

inline KPField sample_lump(const Grid& g, bool mean_correct = true) {
  KPField w(g);
  for (int i = 0; i < g.npts[0]; ++i)
    for (int j = 0; j < g.npts[1]; ++j)
      w.values[g.index(i, j)] = lump(g.coord(0, i), g.coord(1, j));
  if (mean_correct) kp_remove_line_means(w);
  return w;
}

namespace kpdetail {

inline void require_zero_mean(const KPField& w, const char* who) {
  if (!w.zero_mean_x1 && kp_max_line_mean(w) > 1e-12)
    throw std::domain_error(std::string(who) + ": input must have zero mean along x1 lines");
}

/// Spectral multiplier application on a real field; mult(k1, k2) may assume
/// the signed frequencies of the grid.
template <class M>
std::vector<double> apply_multiplier(const Grid& g, const std::vector<double>& vals, M&& mult) {
  std::vector<cdouble> buf(vals.begin(), vals.end());
  fft::forward(buf, g);
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int) {
    buf[idx] *= mult(g.freq(0, i), g.freq(1, j), i, j);
  });
  fft::inverse(buf, g);
  std::vector<double> out(vals.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real();
  return out;
}

/// Values of the trigonometric interpolant of a periodic line at arbitrary
/// points: spectral zero-padding by 8x followed by 8-point Lagrange on the
/// refined grid.
inline std::vector<double> interpolate_line(const std::vector<double>& line, double start,
                                            double period, const std::vector<double>& targets) {
  const int n = static_cast<int>(line.size());
  const int refine = 8;
  const int m = n * refine;
  Grid lg(1, 1, {m, 1, 1});
  std::vector<cdouble> hat(line.begin(), line.end());
  Grid lgn(1, 1, {n, 1, 1});
  fft::forward(hat, lgn);
  std::vector<cdouble> pad(m, cdouble(0.0, 0.0));
  for (int k = 0; k < n; ++k) {
    const int ks = (k <= n / 2) ? k : k - n;
    if (ks == n / 2 || ks == -n / 2) {
      // split the Nyquist bin to keep the interpolant real
      pad[(ks + m) % m] += 0.5 * hat[k];
      pad[(m - ks) % m] += 0.5 * std::conj(hat[k]);
    } else {
      pad[(ks + m) % m] = hat[k];
    }
  }
  fft::inverse(pad, lg);
  std::vector<double> fine(m);
  for (int i = 0; i < m; ++i) fine[i] = pad[i].real() * (double(m) / n);

  const double hf = period / m;
  std::vector<double> out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    double u = (targets[t] - start) / hf;
    u -= std::floor(u / m) * m;
    const int base = static_cast<int>(std::floor(u)) - 3;
    const double frac = u - std::floor(u);
    // 8-point Lagrange weights on offsets -3..4 around the cell
    double val = 0.0;
    for (int s = 0; s < 8; ++s) {
      double wgt = 1.0;
      const double xs = s - 3;
      for (int q = 0; q < 8; ++q) {
        if (q == s) continue;
        const double xq = q - 3;
        wgt *= (frac - xq) / (xs - xq);
      }
      val += wgt * fine[((base + s) % m + m) % m];
    }
    out[t] = val;
  }
  return out;
}

/// Tensor-product evaluation of the interpolant of a real 2D field at the
/// grid t0 x t1 (row-major output sized t0.size() * t1.size()).
inline std::vector<double> resample_tensor(const Grid& g, const std::vector<double>& vals,
                                           const std::vector<double>& t0,
                                           const std::vector<double>& t1) {
  const int n0 = g.npts[0], n1 = g.npts[1];
  const double period = 2.0 * g.half_length();
  // axis 0 first: for each column j, evaluate at t0
  std::vector<double> mid(t0.size() * n1);
  std::vector<double> line(n0);
  for (int j = 0; j < n1; ++j) {
    for (int i = 0; i < n0; ++i) line[i] = vals[g.index(i, j)];
    const auto ev = interpolate_line(line, -g.half_length(), period, t0);
    for (std::size_t i = 0; i < t0.size(); ++i) mid[i * n1 + j] = ev[i];
  }
  // axis 1: for each resampled row, evaluate at t1
  std::vector<double> out(t0.size() * t1.size());
  std::vector<double> row(n1);
  for (std::size_t i = 0; i < t0.size(); ++i) {
    for (int j = 0; j < n1; ++j) row[j] = mid[i * n1 + j];
    const auto ev = interpolate_line(row, -g.half_length(), period, t1);
    for (std::size_t j = 0; j < t1.size(); ++j) out[i * t1.size() + j] = ev[j];
  }
  return out;
}

}  // namespace kpdetail

/// L2 norm of sigma d1 w - w d1 w - d1^3 w + d1^{-1} d2^2 w evaluated
/// spectrally; the d1^{-1} zero mode is set to zero.
inline double sw_residual(const KPField& w, double sigma) {
  kpdetail::require_zero_mean(w, "sw_residual");
  const Grid& g = w.grid;
  const auto d1 = kpdetail::apply_multiplier(g, w.values, [](double k1, double, int, int) {
    return cdouble(0.0, k1);
  });
  const auto d111 = kpdetail::apply_multiplier(g, w.values, [](double k1, double, int, int) {
    return cdouble(0.0, -k1 * k1 * k1);
  });
  const auto dinv = kpdetail::apply_multiplier(g, w.values, [](double k1, double k2, int, int) {
    if (k1 == 0.0) return cdouble(0.0, 0.0);
    return cdouble(0.0, k2 * k2 / k1);  // (i k2)^2 / (i k1)
  });
  double s = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const double r = sigma * d1[i] - w.values[i] * d1[i] - d111[i] + dinv[i];
    s += r * r;
  }
  return std::sqrt(s * g.cell_volume());
}

inline double kp_l2_norm(const KPField& w) {
  double s = 0.0;
  for (double v : w.values) s += v * v;
  return std::sqrt(s * w.grid.cell_volume());
}

inline double kp_linf_norm(const KPField& w) {
  double s = 0.0;
  for (double v : w.values) s = std::max(s, std::abs(v));
  return s;
}

/// w_sigma(x1, x2) = sigma w(sqrt(sigma) x1, sigma x2) on the same grid via
/// spectral resampling (arguments wrap periodically).
inline KPField scale_family(const KPField& w, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("scale_family: sigma > 0");
  const Grid& g = w.grid;
  std::vector<double> t0(g.npts[0]), t1(g.npts[1]);
  for (int i = 0; i < g.npts[0]; ++i) t0[i] = std::sqrt(sigma) * g.coord(0, i);
  for (int j = 0; j < g.npts[1]; ++j) t1[j] = sigma * g.coord(1, j);
  KPField out(g);
  out.values = kpdetail::resample_tensor(g, w.values, t0, t1);
  for (double& v : out.values) v *= sigma;
  kp_remove_line_means(out);
  return out;
}

/// E_KP = 1/2 int (d1 w)^2 + 1/2 int (d1^{-1} d2 w)^2 - 1/6 int w^3.
inline double kp_energy(const KPField& w) {
  kpdetail::require_zero_mean(w, "kp_energy");
  const Grid& g = w.grid;
  const auto d1 = kpdetail::apply_multiplier(g, w.values, [](double k1, double, int, int) {
    return cdouble(0.0, k1);
  });
  const auto dinv2 = kpdetail::apply_multiplier(g, w.values, [](double k1, double k2, int, int) {
    if (k1 == 0.0) return cdouble(0.0, 0.0);
    return cdouble(k2 / k1, 0.0);  // (i k2) / (i k1)
  });
  double s = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i)
    s += 0.5 * d1[i] * d1[i] + 0.5 * dinv2[i] * dinv2[i] -
         w.values[i] * w.values[i] * w.values[i] / 6.0;
  return s * g.cell_volume();
}

/// Action S = E_KP + 1/2 int w^2.
inline double kp_action(const KPField& w) {
  const double l2 = kp_l2_norm(w);
  return kp_energy(w) + 0.5 * l2 * l2;
}

/// Anisotropic transonic rescaling of a 2D GP field:
/// N(x) = (6/eps^2) eta(x1/eps, sqrt(2) x2 / eps^2) with eta = 1 - |u|^2,
/// resampled onto a centered cube that fits inside the stretched image of
/// the source box. Rejects fields that vanish (vortices break the regime).
inline KPField gp_to_kp(const Field& u, double c, int out_pts = 0) {
  if (u.grid.dim != 2) throw std::invalid_argument("gp_to_kp: 2D field required");
  if (!(c >= 0.0) || !(c < kSqrt2)) throw std::domain_error("gp_to_kp: 0 <= c < sqrt2");
  if (min_modulus(u) <= 1e-9)
    throw std::domain_error("gp_to_kp: field vanishes (vortices outside the transonic regime)");
  const double eps = std::sqrt(2.0 - c * c);
  const Grid& g = u.grid;

  const double l1 = eps * g.half_length();
  const double l2 = eps * eps * g.half_length() / kSqrt2;
  const long n_out = std::max(1L, static_cast<long>(std::floor(std::min(l1, l2) / kPi)));
  const int pts = out_pts > 0 ? out_pts : g.npts[0];
  const Grid go = Grid::make(2, n_out, pts);

  std::vector<double> eta(g.total());
  for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = 1.0 - std::norm(u.values[i]);

  std::vector<double> t0(go.npts[0]), t1(go.npts[1]);
  for (int i = 0; i < go.npts[0]; ++i) t0[i] = go.coord(0, i) / eps;
  for (int j = 0; j < go.npts[1]; ++j) t1[j] = kSqrt2 * go.coord(1, j) / (eps * eps);

  KPField out(go);
  out.values = kpdetail::resample_tensor(g, eta, t0, t1);
  for (double& v : out.values) v *= 6.0 / (eps * eps);
  kp_remove_line_means(out);
  return out;
}

struct BranchSample {
  double p;
  double E;
  double c;
};

struct TransonicReport {
  bool valid = false;
  int npoints = 0;
  double exponent_gap = 0.0;    ///< slope of log(sqrt2 p - E) vs log p
  double exponent_speed = 0.0;  ///< slope of log(sqrt2 - c) vs log p
  bool within_kp_expectation = false;  ///< exponents within 0.4 of 3 and 2
};

/// Log-log regression of the transonic gaps over the smallest momenta.
inline TransonicReport transonic_scalings_check(std::vector<BranchSample> branch,
                                                std::size_t use_smallest = 0) {
  TransonicReport out;
  std::sort(branch.begin(), branch.end(),
            [](const BranchSample& a, const BranchSample& b) { return a.p < b.p; });
  std::vector<std::array<double, 2>> gap_pts, spd_pts;
  for (const auto& b : branch) {
    if (!(b.p > 0.0)) continue;
    const double gap = kSqrt2 * b.p - b.E;
    const double spd = kSqrt2 - b.c;
    if (gap > 0.0 && spd > 0.0) {
      gap_pts.push_back({std::log(b.p), std::log(gap)});
      spd_pts.push_back({std::log(b.p), std::log(spd)});
    }
    if (use_smallest > 0 && gap_pts.size() >= use_smallest) break;
  }
  if (gap_pts.size() < 3) return out;
  auto slope = [](const std::vector<std::array<double, 2>>& pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& q : pts) {
      sx += q[0];
      sy += q[1];
      sxx += q[0] * q[0];
      sxy += q[0] * q[1];
    }
    const double n = static_cast<double>(pts.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  out.valid = true;
  out.npoints = static_cast<int>(gap_pts.size());
  out.exponent_gap = slope(gap_pts);
  out.exponent_speed = slope(spd_pts);
  out.within_kp_expectation =
      std::abs(out.exponent_gap - 3.0) <= 0.4 && std::abs(out.exponent_speed - 2.0) <= 0.4;
  return out;
}

}  // namespace gpw
