#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gpw/fft.hpp"
#include "gpw/grid.hpp"

namespace gpw {

/// Complex field on a periodic grid. Treated as an immutable value by the
/// operations below; they return fresh fields.
struct Field {
  Grid grid;
  std::vector<cdouble> values;

  Field() = default;
  explicit Field(const Grid& g, cdouble fill = {0.0, 0.0}) : grid(g), values(g.total(), fill) {}
  Field(const Grid& g, std::vector<cdouble> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.total()) throw std::invalid_argument("Field: size mismatch");
  }
};

/// Real potential with cached L2 norm.
struct Potential {
  Grid grid;
  std::vector<double> values;
  double l2_norm = 0.0;

  Potential() = default;
  Potential(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.total()) throw std::invalid_argument("Potential: size mismatch");
    double s = 0.0;
    for (double x : values) s += x * x;
    l2_norm = std::sqrt(s * grid.cell_volume());
  }

  static Potential zero(const Grid& g) { return Potential(g, std::vector<double>(g.total(), 0.0)); }

  /// Periodized isotropic Gaussian amplitude * exp(-|x-x0|^2 / (2 w^2)).
  static Potential gaussian(const Grid& g, double amplitude, double width,
                            std::array<double, 3> center = {0.0, 0.0, 0.0}) {
    std::vector<double> v(g.total());
    const double L = 2.0 * g.half_length();
    fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int k) {
      const int ids[3] = {i, j, k};
      double r2 = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        double d = std::abs(g.coord(a, ids[a]) - center[a]);
        d = std::min(d, L - d);
        r2 += d * d;
      }
      v[idx] = amplitude * std::exp(-0.5 * r2 / (width * width));
    });
    return Potential(g, std::move(v));
  }
};

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

/// Exact derivative of the trigonometric interpolant along an axis.
/// Odd-order derivatives zero the Nyquist mode.
inline Field spectral_derivative(const Field& f, int axis, int order = 1) {
  if (axis < 0 || axis >= f.grid.dim) throw std::invalid_argument("spectral_derivative: bad axis");
  Field out = f;
  fft::forward(out.values, out.grid);
  const Grid& g = out.grid;
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int k) {
    const int kk[3] = {i, j, k};
    const int m = g.npts[axis];
    if (order % 2 == 1 && kk[axis] == m / 2) {
      out.values[idx] = 0.0;
      return;
    }
    const cdouble ixi(0.0, g.freq(axis, kk[axis]));
    cdouble mul = 1.0;
    for (int q = 0; q < order; ++q) mul *= ixi;
    out.values[idx] *= mul;
  });
  fft::inverse(out.values, out.grid);
  return out;
}

/// Gradient components of f, one transform each.
inline std::vector<Field> gradient_fields(const Field& f) {
  std::vector<Field> out;
  for (int a = 0; a < f.grid.dim; ++a) out.push_back(spectral_derivative(f, a, 1));
  return out;
}

/// Ginzburg-Landau energy 1/2 int |grad v|^2 + 1/4 int (1-|v|^2)^2 by the
/// uniform Riemann sum (exact for trigonometric polynomials). The kinetic
/// part is summed in frequency via Parseval with a fixed reduction order.
inline double energy(const Field& f) {
  const Grid& g = f.grid;
  std::vector<cdouble> hat = f.values;
  fft::forward(hat, g);
  const double parseval = g.cell_volume() / static_cast<double>(g.total());
  double kin = 0.0;
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int k) {
    const double x1 = g.freq(0, i), x2 = g.dim > 1 ? g.freq(1, j) : 0.0,
                 x3 = g.dim > 2 ? g.freq(2, k) : 0.0;
    kin += (x1 * x1 + x2 * x2 + x3 * x3) * std::norm(hat[idx]);
  });
  kin *= 0.5 * parseval;
  double pot = 0.0;
  for (const cdouble& z : f.values) {
    const double eta = 1.0 - std::norm(z);
    pot += eta * eta;
  }
  pot *= 0.25 * g.cell_volume();
  return kin + pot;
}

/// Momentum p_n(v) = 1/2 int <i d1 v, v - 1>.
inline double momentum(const Field& f) {
  Field d1 = spectral_derivative(f, 0, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const cdouble vm1 = f.values[i] - 1.0;
    s += rdot(cdouble(0.0, 1.0) * d1.values[i], vm1);
  }
  return 0.5 * s * f.grid.cell_volume();
}

/// Transverse momentum P_j = 1/2 int <i dj v, v - 1>, axis >= 1.
inline double momentum_axis(const Field& f, int axis) {
  Field dj = spectral_derivative(f, axis, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    s += rdot(cdouble(0.0, 1.0) * dj.values[i], f.values[i] - 1.0);
  return 0.5 * s * f.grid.cell_volume();
}

/// E_n^V(v) = E_n(v) - 1/2 int V (1 - |v|^2).
inline double energy_with_potential(const Field& f, const Potential& V) {
  require_same_grid(f.grid, V.grid);
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    s += V.values[i] * (1.0 - std::norm(f.values[i]));
  return energy(f) - 0.5 * s * f.grid.cell_volume();
}

/// F_{c,n}^V(v) = E_n^V(v) - c p_n(v).
inline double hamiltonian(const Field& f, const Potential& V, double c) {
  if (c < 0.0) throw std::domain_error("hamiltonian: c >= 0");
  return energy_with_potential(f, V) - c * momentum(f);
}

inline double min_modulus(const Field& f) {
  double m = std::abs(f.values[0]);
  for (const cdouble& z : f.values) m = std::min(m, std::abs(z));
  return m;
}

inline double max_modulus(const Field& f) {
  double m = 0.0;
  for (const cdouble& z : f.values) m = std::max(m, std::abs(z));
  return m;
}

/// First variation of the energy: grad E = -lap v - (1-|v|^2) v.
inline Field energy_gradient(const Field& f) {
  const Grid& g = f.grid;
  Field out = f;
  fft::forward(out.values, g);
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int k) {
    const double x1 = g.freq(0, i), x2 = g.dim > 1 ? g.freq(1, j) : 0.0,
                 x3 = g.dim > 2 ? g.freq(2, k) : 0.0;
    out.values[idx] *= (x1 * x1 + x2 * x2 + x3 * x3);
  });
  fft::inverse(out.values, g);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] -= (1.0 - std::norm(f.values[i])) * f.values[i];
  return out;
}

/// grad p = i d1 v.
inline Field momentum_gradient(const Field& f) {
  Field d1 = spectral_derivative(f, 0, 1);
  for (auto& z : d1.values) z *= cdouble(0.0, 1.0);
  return d1;
}

/// grad F^V_c = grad E + V v - c i d1 v.
inline Field hamiltonian_gradient(const Field& f, const Potential& V, double c) {
  require_same_grid(f.grid, V.grid);
  Field g = energy_gradient(f);
  Field gp = momentum_gradient(f);
  for (std::size_t i = 0; i < g.values.size(); ++i)
    g.values[i] += V.values[i] * f.values[i] - c * gp.values[i];
  return g;
}

inline double inner(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid);
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += rdot(a.values[i], b.values[i]);
  return s * a.grid.cell_volume();
}

inline double norm_l2(const Field& a) { return std::sqrt(inner(a, a)); }

inline Field circular_shift(const Field& f, std::array<int, 3> by) {
  Field out(f.grid);
  const Grid& g = f.grid;
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int k) {
    const int si = ((i - by[0]) % g.npts[0] + g.npts[0]) % g.npts[0];
    const int sj = ((j - by[1]) % g.npts[1] + g.npts[1]) % g.npts[1];
    const int sk = ((k - by[2]) % g.npts[2] + g.npts[2]) % g.npts[2];
    out.values[idx] = f.values[g.index(si, sj, sk)];
  });
  return out;
}

/// Sub-grid translation by real offsets via the spectral shift theorem.
inline Field spectral_shift(const Field& f, std::array<double, 3> by) {
  Field out = f;
  const Grid& g = f.grid;
  fft::forward(out.values, g);
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int k) {
    const int kk[3] = {i, j, k};
    double phase = 0.0;
    for (int a = 0; a < g.dim; ++a) phase -= g.freq(a, kk[a]) * by[a];
    out.values[idx] *= std::polar(1.0, phase);
  });
  fft::inverse(out.values, g);
  return out;
}

struct Lifting {
  std::vector<double> rho;
  std::vector<double> phi;
};

class lifting_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace detail

/// Polar decomposition v = rho exp(i phi) with a single-valued phase.
/// Fails when the modulus vanishes or any fundamental cycle carries winding
/// (the vortex signal). Phase is integrated along a fixed spanning tree;
/// zero winding on all cycles makes the result path independent.
inline Lifting lifting(const Field& f, double min_mod = 1e-12) {
  const Grid& g = f.grid;
  if (min_modulus(f) <= min_mod) throw lifting_error("lifting: vanishing modulus");

  std::vector<double> theta(g.total());
  for (std::size_t i = 0; i < f.values.size(); ++i) theta[i] = std::arg(f.values[i]);

  auto edge = [&](std::size_t from, std::size_t to) {
    return detail::wrap_angle(theta[to] - theta[from]);
  };

  auto line_winding = [&](int axis, int j, int k) {
    double s = 0.0;
    int idx[3] = {0, 0, 0};
    const int other[2] = {axis == 0 ? 1 : 0, axis == 2 ? 1 : 2};
    idx[other[0]] = j;
    idx[other[1]] = k;
    for (int i = 0; i < g.npts[axis]; ++i) {
      idx[axis] = i;
      int nxt[3] = {idx[0], idx[1], idx[2]};
      nxt[axis] = (i + 1) % g.npts[axis];
      s += edge(g.index(idx[0], idx[1], idx[2]), g.index(nxt[0], nxt[1], nxt[2]));
    }
    return s;
  };
  for (int axis = 0; axis < g.dim; ++axis) {
    const int other[2] = {axis == 0 ? 1 : 0, axis == 2 ? 1 : 2};
    for (int j = 0; j < g.npts[other[0]]; ++j)
      for (int k = 0; k < g.npts[other[1]]; ++k) {
        const double wnd = line_winding(axis, j, k);
        if (std::abs(wnd) > 1e-6)
          throw lifting_error("lifting: nonzero winding on a fundamental cycle");
      }
  }

  Lifting out;
  out.rho.resize(g.total());
  out.phi.resize(g.total());
  for (std::size_t i = 0; i < f.values.size(); ++i) out.rho[i] = std::abs(f.values[i]);

  // integrate phase along axis 0 line (j=k=0), then axis 1 sheets, then axis 2
  out.phi[g.index(0, 0, 0)] = theta[g.index(0, 0, 0)];
  for (int i = 1; i < g.npts[0]; ++i)
    out.phi[g.index(i, 0, 0)] =
        out.phi[g.index(i - 1, 0, 0)] + edge(g.index(i - 1, 0, 0), g.index(i, 0, 0));
  if (g.dim >= 2)
    for (int i = 0; i < g.npts[0]; ++i)
      for (int j = 1; j < g.npts[1]; ++j)
        out.phi[g.index(i, j, 0)] =
            out.phi[g.index(i, j - 1, 0)] + edge(g.index(i, j - 1, 0), g.index(i, j, 0));
  if (g.dim >= 3)
    for (int i = 0; i < g.npts[0]; ++i)
      for (int j = 0; j < g.npts[1]; ++j)
        for (int k = 1; k < g.npts[2]; ++k)
          out.phi[g.index(i, j, k)] =
              out.phi[g.index(i, j, k - 1)] + edge(g.index(i, j, k - 1), g.index(i, j, k));
  return out;
}

/// Angular mean position of the weight w >= 0 on the periodic axis.
inline double periodic_centroid(const Grid& g, const std::vector<double>& w, int axis) {
  double cs = 0.0, sn = 0.0;
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int k) {
    const int kk[3] = {i, j, k};
    const double ang = kPi * (g.coord(axis, kk[axis]) + g.half_length()) / g.half_length();
    cs += w[idx] * std::cos(ang);
    sn += w[idx] * std::sin(ang);
  });
  if (cs == 0.0 && sn == 0.0) return 0.0;
  double ang = std::atan2(sn, cs);
  if (ang < 0.0) ang += 2.0 * kPi;
  return ang / kPi * g.half_length() - g.half_length();
}

/// Shift the field so the centroid of max(1-|v|^2, 0) sits at the origin.
inline Field recenter_by_eta(const Field& f) {
  const Grid& g = f.grid;
  std::vector<double> w(g.total());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    w[i] = std::max(1.0 - std::norm(f.values[i]), 0.0);
  std::array<double, 3> shift{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) shift[a] = -periodic_centroid(g, w, a);
  return spectral_shift(f, shift);
}

}  // namespace gpw
