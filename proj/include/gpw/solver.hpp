#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gpw/embed1d.hpp"
#include "gpw/field.hpp"
#include "gpw/kp1.hpp"
#include "gpw/wave1d.hpp"

namespace gpw {

// ---------------------------------------------------------------------------
// diagnostics shared by the solvers

struct PohozaevResiduals {
  double r1;  ///< E - int |d1 v|^2
  double r2;  ///< E - mean_j int |dj v|^2 - c p
};

inline PohozaevResiduals pohozaev_residuals(const Field& f, double c) {
  if (f.grid.dim < 2) throw std::invalid_argument("pohozaev_residuals: dim >= 2");
  const double E = energy(f);
  const double p = momentum(f);
  PohozaevResiduals out{};
  {
    const Field d1 = spectral_derivative(f, 0, 1);
    double s = 0.0;
    for (const auto& z : d1.values) s += std::norm(z);
    out.r1 = E - s * f.grid.cell_volume();
  }
  double trans = 0.0;
  for (int a = 1; a < f.grid.dim; ++a) {
    const Field dj = spectral_derivative(f, a, 1);
    double s = 0.0;
    for (const auto& z : dj.values) s += std::norm(z);
    trans += s * f.grid.cell_volume();
  }
  trans /= (f.grid.dim - 1);
  out.r2 = E - trans - c * p;
  return out;
}

/// int (|grad v|^2 + (1-|v|^2)^2) - 2c (1 - 2/c^2) p; vanishes for genuine
/// supersonic travelling waves, which forces them to be constant.
inline double supersonic_identity_residual(const Field& f, double c) {
  if (c == 0.0) throw std::domain_error("supersonic_identity_residual: c != 0 required");
  double grad2 = 0.0;
  for (int a = 0; a < f.grid.dim; ++a) {
    const Field da = spectral_derivative(f, a, 1);
    for (const auto& z : da.values) grad2 += std::norm(z);
  }
  grad2 *= f.grid.cell_volume();
  double quart = 0.0;
  for (const auto& z : f.values) {
    const double eta = 1.0 - std::norm(z);
    quart += eta * eta;
  }
  quart *= f.grid.cell_volume();
  return grad2 + quart - 2.0 * c * (1.0 - 2.0 / (c * c)) * momentum(f);
}

struct Vortex {
  double x1;
  double x2;
  int degree;
};

/// Plaquette-wise phase winding of a 2D field. Degrees are integers; on the
/// torus they sum to zero.
inline std::vector<Vortex> detect_vortices(const Field& f) {
  if (f.grid.dim != 2) throw std::invalid_argument("detect_vortices: dim 2 required");
  const Grid& g = f.grid;
  std::vector<Vortex> out;
  auto arg_ratio = [&](std::size_t a, std::size_t b) {
    return std::arg(f.values[b] / f.values[a]);
  };
  for (int i = 0; i < g.npts[0]; ++i) {
    const int ip = (i + 1) % g.npts[0];
    for (int j = 0; j < g.npts[1]; ++j) {
      const int jp = (j + 1) % g.npts[1];
      const double wind = arg_ratio(g.index(i, j), g.index(ip, j)) +
                          arg_ratio(g.index(ip, j), g.index(ip, jp)) +
                          arg_ratio(g.index(ip, jp), g.index(i, jp)) +
                          arg_ratio(g.index(i, jp), g.index(i, j));
      const int q = static_cast<int>(std::lround(wind / (2.0 * kPi)));
      if (q != 0)
        out.push_back({g.coord(0, i) + 0.5 * g.spacing(0), g.coord(1, j) + 0.5 * g.spacing(1), q});
    }
  }
  return out;
}

/// Quadratic asymmetry of a 2D field under reflection of a transverse axis,
/// (|grad a|^2 + |a|^2 integrals of the antisymmetric part a = (v - Mv)/2).
inline double mirror_asymmetry(const Field& f, int axis = 1) {
  const Grid& g = f.grid;
  if (axis <= 0 || axis >= g.dim) throw std::invalid_argument("mirror_asymmetry: transverse axis");
  Field a(g);
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int k) {
    int m[3] = {i, j, k};
    m[axis] = (g.npts[axis] - m[axis]) % g.npts[axis];
    a.values[idx] = 0.5 * (f.values[idx] - f.values[g.index(m[0], m[1], m[2])]);
  });
  double s = 0.0;
  for (const auto& z : a.values) s += std::norm(z);
  s *= g.cell_volume();
  for (int ax = 0; ax < g.dim; ++ax) {
    const Field da = spectral_derivative(a, ax, 1);
    double t = 0.0;
    for (const auto& z : da.values) t += std::norm(z);
    s += t * g.cell_volume();
  }
  return s;
}

// ---------------------------------------------------------------------------
// initial guesses

/// Exactly periodic vortex/antivortex pair at (0, +-d/2). The phase comes
/// from a lattice-exact construction: integer charges on the two plaquettes
/// nearest the requested cores, a discrete Poisson solve for the dual
/// potential, a gauge shift making every fundamental-cycle winding an exact
/// multiple of 2 pi, then a cumulative product of edge phases. The modulus
/// is a product of Pade core profiles at the minimum-image distances.
inline Field ansatz_vortex_pair(const Grid& g, double d) {
  if (g.dim != 2) throw std::invalid_argument("ansatz_vortex_pair: dim 2 required");
  if (d < 0.0 || d > g.half_length())
    throw std::invalid_argument("ansatz_vortex_pair: separation larger than box");
  const int N0 = g.npts[0], N1 = g.npts[1];

  auto plaq_of = [&](double x1, double x2) {
    // plaquette (i, j) has center (coord(0,i)+h/2, coord(1,j)+h/2)
    int i = static_cast<int>(std::floor((x1 + g.half_length()) / g.spacing(0)));
    int j = static_cast<int>(std::floor((x2 + g.half_length()) / g.spacing(1)));
    i = ((i % N0) + N0) % N0;
    j = ((j % N1) + N1) % N1;
    return std::array<int, 2>{i, j};
  };
  const auto pl_plus = plaq_of(0.0, 0.5 * d);
  const auto pl_minus = plaq_of(0.0, -0.5 * d);
  const bool charged = !(pl_plus == pl_minus);

  std::vector<double> alpha1(g.total(), 0.0), alpha2(g.total(), 0.0);
  if (charged) {
    std::vector<cdouble> rho(g.total(), 0.0);
    rho[g.index(pl_plus[0], pl_plus[1])] = 2.0 * kPi;
    rho[g.index(pl_minus[0], pl_minus[1])] = -2.0 * kPi;
    fft::forward(rho, g);
    fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int) {
      const double lam = 4.0 - 2.0 * std::cos(2.0 * kPi * i / N0) - 2.0 * std::cos(2.0 * kPi * j / N1);
      rho[idx] = (lam > 1e-14) ? rho[idx] / lam : cdouble(0.0, 0.0);
    });
    fft::inverse(rho, g);  // dual potential beta on plaquettes, -lap5 beta = 2 pi q
    auto beta = [&](int i, int j) {
      return rho[g.index(((i % N0) + N0) % N0, ((j % N1) + N1) % N1)].real();
    };
    for (int i = 0; i < N0; ++i)
      for (int j = 0; j < N1; ++j) {
        alpha1[g.index(i, j)] = beta(i, j) - beta(i, j - 1);
        alpha2[g.index(i, j)] = beta(i - 1, j) - beta(i, j);
      }
    // gauge shift: make the windings of the fundamental cycles exact 2 pi
    // multiples (rows/columns differ from a reference one by quantized jumps)
    double w1 = 0.0;
    for (int i = 0; i < N0; ++i) w1 += alpha1[g.index(i, 0)];
    double w2 = 0.0;
    for (int j = 0; j < N1; ++j) w2 += alpha2[g.index(0, j)];
    const double c1 = (w1 - 2.0 * kPi * std::round(w1 / (2.0 * kPi))) / N0;
    const double c2 = (w2 - 2.0 * kPi * std::round(w2 / (2.0 * kPi))) / N1;
    for (int i = 0; i < N0; ++i)
      for (int j = 0; j < N1; ++j) {
        alpha1[g.index(i, j)] -= c1;
        alpha2[g.index(i, j)] -= c2;
      }
  }

  // cumulative phase along a spanning tree; closure is exact by construction
  std::vector<double> theta(g.total(), 0.0);
  for (int i = 1; i < N0; ++i)
    theta[g.index(i, 0)] = theta[g.index(i - 1, 0)] + alpha1[g.index(i - 1, 0)];
  for (int i = 0; i < N0; ++i)
    for (int j = 1; j < N1; ++j)
      theta[g.index(i, j)] = theta[g.index(i, j - 1)] + alpha2[g.index(i, j - 1)];

  auto core = [&](double x1, double x2, double cx1, double cx2) {
    double dx = std::abs(x1 - cx1), dy = std::abs(x2 - cx2);
    const double L = 2.0 * g.half_length();
    dx = std::min(dx, L - dx);
    dy = std::min(dy, L - dy);
    const double r = std::hypot(dx, dy);
    return r / std::sqrt(r * r + 2.0);
  };
  const double cp1 = charged ? g.coord(0, pl_plus[0]) + 0.5 * g.spacing(0) : 0.0;
  const double cp2 = charged ? g.coord(1, pl_plus[1]) + 0.5 * g.spacing(1) : 0.5 * d;
  const double cm1 = charged ? g.coord(0, pl_minus[0]) + 0.5 * g.spacing(0) : 0.0;
  const double cm2 = charged ? g.coord(1, pl_minus[1]) + 0.5 * g.spacing(1) : -0.5 * d;

  Field out(g);
  for (int i = 0; i < N0; ++i)
    for (int j = 0; j < N1; ++j) {
      const double x1 = g.coord(0, i), x2 = g.coord(1, j);
      const double rho = core(x1, x2, cp1, cp2) * core(x1, x2, cm1, cm2);
      out.values[g.index(i, j)] = std::polar(rho, theta[g.index(i, j)]);
    }
  return out;
}

/// Transonic initial guess built from the KP lump: eta is the inverse
/// anisotropic stretch of the lump, the phase integrates d1 phi = (c/2) eta
/// spectrally. Requires the lump to fit the box and eta < 1.
inline Field ansatz_from_lump(const Grid& g, double eps) {
  if (g.dim != 2) throw std::invalid_argument("ansatz_from_lump: dim 2 required");
  if (!(eps > 0.0) || eps >= 0.85)
    throw std::domain_error("ansatz_from_lump: need 0 < eps < 0.85 for a nonvanishing guess");
  const double span2 = 10.0 * kSqrt2 / (eps * eps);  // transverse core extent
  if (span2 > g.half_length())
    throw std::invalid_argument("ansatz_from_lump: structure larger than box");
  const double c = std::sqrt(2.0 - eps * eps);

  std::vector<double> eta(g.total());
  for (int i = 0; i < g.npts[0]; ++i)
    for (int j = 0; j < g.npts[1]; ++j)
      eta[g.index(i, j)] = eps * eps / 6.0 *
                           lump(eps * g.coord(0, i), eps * eps * g.coord(1, j) / kSqrt2);

  // remove line means so the antiderivative is periodic
  std::vector<double> eta0 = eta;
  for (int j = 0; j < g.npts[1]; ++j) {
    double m = 0.0;
    for (int i = 0; i < g.npts[0]; ++i) m += eta0[g.index(i, j)];
    m /= g.npts[0];
    for (int i = 0; i < g.npts[0]; ++i) eta0[g.index(i, j)] -= m;
  }
  std::vector<cdouble> buf(eta0.begin(), eta0.end());
  fft::forward(buf, g);
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int) {
    (void)j;
    const double k1 = g.freq(0, i);
    buf[idx] = (k1 == 0.0) ? cdouble(0.0, 0.0) : buf[idx] / cdouble(0.0, k1);
  });
  fft::inverse(buf, g);

  Field out(g);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double e = std::min(eta[i], 0.99);
    out.values[i] = std::sqrt(1.0 - e) * std::polar(1.0, 0.5 * c * buf[i].real());
  }
  return out;
}

/// 1D dark profile replicated across the transverse axes.
inline Field ansatz_dark_planar(const Grid& g, double c) {
  const Wave1D w(c);
  const Grid g1(1, g.n, {g.npts[0], 1, 1});
  const TwistedWave tw = embed_dark_1d(w, g1);
  Field out(g);
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int k) {
    (void)j;
    (void)k;
    out.values[idx] = tw.field.values[i];
  });
  return out;
}

// ---------------------------------------------------------------------------
// constrained minimization

enum class SolveStatus {
  converged,
  max_iterations,
  trivial_minimizer,   ///< collapsed to a constant; expected for 3D small p
  backtrack_failed,
  potential_too_strong
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max-iterations";
    case SolveStatus::trivial_minimizer: return "trivial-minimizer";
    case SolveStatus::backtrack_failed: return "backtrack-failed";
    case SolveStatus::potential_too_strong: return "potential-too-strong";
  }
  return "unknown";
}

enum class StepRule { fixed, backtracking };

enum class InitKind { vortex_pair, kp_ansatz, dark_1d, file, provided };

struct MinimizeConfig {
  double target_p = 1.0;
  int max_iters = 20000;
  double grad_tol = 1e-6;        ///< relative: ||grad E - c grad p|| <= tol ||grad E||
  double constraint_tol = 1e-9;  ///< |p - target|
  StepRule step_rule = StepRule::backtracking;
  double tau0 = 0.1;
  InitKind init = InitKind::vortex_pair;
  double init_separation = 0.0;  ///< vortex-pair d; 0 picks p/pi
  double init_eps = 0.4;         ///< kp-ansatz eps
  double init_speed = 0.5;       ///< dark-1d speed
  std::string init_file;
  std::optional<Field> init_field;
  bool precondition = true;  ///< Sobolev (1 - lap)^{-1} descent metric
  int momentum_correct_every = 10;

  MinimizeConfig() = default;
  explicit MinimizeConfig(double p) : target_p(p) {}
};

struct BranchPoint {
  double p_target = 0.0;
  double p_achieved = 0.0;
  double E = 0.0;
  double c_multiplier = 0.0;
  double c_slope = 0.0;  ///< filled by trace_branch from neighbors
  Field field;
  PohozaevResiduals pohozaev{0.0, 0.0};
  std::vector<Vortex> vortices;
  int iters = 0;
  SolveStatus status = SolveStatus::max_iterations;
  double grad_residual = 0.0;  ///< relative residual at exit
  double mirror_defect = 0.0;
  std::vector<std::string> warnings;
  std::string field_path;  ///< set by the CLI when the field is archived
};

namespace solverdetail {

struct Workspace {
  const Grid* g;
  std::vector<cdouble> vhat, buf;
  std::vector<double> k2;  // |xi|^2 per mode
  std::vector<double> k1;  // xi_1 per mode

  explicit Workspace(const Grid& grid) : g(&grid) {
    vhat.resize(grid.total());
    buf.resize(grid.total());
    k2.resize(grid.total());
    k1.resize(grid.total());
    fft::for_each_mode(grid, [&](std::size_t idx, int i, int j, int k) {
      const double x1 = grid.freq(0, i);
      const double x2 = grid.dim > 1 ? grid.freq(1, j) : 0.0;
      const double x3 = grid.dim > 2 ? grid.freq(2, k) : 0.0;
      k1[idx] = x1;
      k2[idx] = x1 * x1 + x2 * x2 + x3 * x3;
    });
  }

  /// Energy from a spectral copy plus the pointwise quartic term.
  double energy_of(const std::vector<cdouble>& vals) {
    buf = vals;
    fft::forward(buf, *g);
    const double pars = g->cell_volume() / static_cast<double>(g->total());
    double kin = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) kin += k2[i] * std::norm(buf[i]);
    kin *= 0.5 * pars;
    double pot = 0.0;
    for (const auto& z : vals) {
      const double eta = 1.0 - std::norm(z);
      pot += eta * eta;
    }
    return kin + 0.25 * pot * g->cell_volume();
  }
};

inline double vdot(const Grid& g, const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += rdot(a[i], b[i]);
  return s * g.cell_volume();
}

/// p(v + s w) is quadratic in s; move along w = grad p to restore the
/// constraint exactly.
inline void correct_momentum(Field& v, double target, Workspace& ws) {
  const Grid& g = v.grid;
  for (int round = 0; round < 4; ++round) {
    Field gp = momentum_gradient(v);
    const double p0 = momentum(v);
    if (std::abs(p0 - target) < 1e-14) return;
    const double lin = vdot(g, gp.values, gp.values);
    // quadratic coefficient 1/2 <i d1 w, w>
    Field dgp = spectral_derivative(gp, 0, 1);
    double quad = 0.0;
    for (std::size_t i = 0; i < gp.values.size(); ++i)
      quad += rdot(cdouble(0.0, 1.0) * dgp.values[i], gp.values[i]);
    quad *= 0.5 * g.cell_volume();
    const double cq = p0 - target;
    double s;
    if (std::abs(quad) < 1e-14 * std::abs(lin)) {
      s = -cq / lin;
    } else {
      const double disc = lin * lin - 4.0 * quad * cq;
      if (disc < 0.0) {
        s = -cq / lin;
      } else {
        const double r1 = (-lin + std::sqrt(disc)) / (2.0 * quad);
        const double r2 = (-lin - std::sqrt(disc)) / (2.0 * quad);
        s = std::abs(r1) < std::abs(r2) ? r1 : r2;
      }
    }
    for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] += s * gp.values[i];
    if (std::abs(momentum(v) - target) < 1e-13) return;
  }
  (void)ws;
}

}  // namespace solverdetail

inline Field make_init_field(const MinimizeConfig& cfg, const Grid& grid);

/// Discrete gradient flow of E with a momentum projection each step.
/// The descent direction is preconditioned with (1 - lap)^{-1} and projected
/// L2-orthogonally to grad p; a quadratic correction restores the constraint
/// every few steps. The multiplier is the least-squares alignment
/// c = <grad E, grad p> / ||grad p||^2.
inline BranchPoint minimize_at_momentum(const MinimizeConfig& cfg, const Grid& grid) {
  BranchPoint out;
  out.p_target = cfg.target_p;
  if (grid.spacing(0) > 0.5)
    out.warnings.push_back("grid spacing exceeds half a healing length");

  Field v = cfg.init_field ? *cfg.init_field : make_init_field(cfg, grid);
  solverdetail::Workspace ws(grid);
  solverdetail::correct_momentum(v, cfg.target_p, ws);

  const Grid& g = grid;
  const std::size_t total = g.total();
  double E = ws.energy_of(v.values);
  double tau = cfg.tau0;

  std::vector<cdouble> vhat(total), lap(total), d1(total), gp(total), pgp(total), res(total),
      dir(total), trial(total);

  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    vhat = v.values;
    fft::forward(vhat, g);

    for (std::size_t i = 0; i < total; ++i) lap[i] = -ws.k2[i] * vhat[i];
    fft::inverse(lap, g);
    for (std::size_t i = 0; i < total; ++i) d1[i] = cdouble(0.0, ws.k1[i]) * vhat[i];
    fft::inverse(d1, g);
    for (std::size_t i = 0; i < total; ++i)
      pgp[i] = cdouble(0.0, ws.k1[i]) / (1.0 + ws.k2[i]) * vhat[i];
    fft::inverse(pgp, g);

    // grad E, grad p, and their preconditioned versions
    for (std::size_t i = 0; i < total; ++i) {
      const cdouble vv = v.values[i];
      res[i] = -lap[i] - (1.0 - std::norm(vv)) * vv;  // grad E for now
      gp[i] = cdouble(0.0, 1.0) * d1[i];
      pgp[i] *= cdouble(0.0, 1.0);
    }
    const double gg = solverdetail::vdot(g, res, gp);
    const double pp = solverdetail::vdot(g, gp, gp);
    const double c = (pp > 0.0) ? gg / pp : 0.0;
    const double gn = std::sqrt(solverdetail::vdot(g, res, res));
    for (std::size_t i = 0; i < total; ++i) res[i] -= c * gp[i];
    const double resn = std::sqrt(solverdetail::vdot(g, res, res));

    out.c_multiplier = c;
    out.grad_residual = gn > 0.0 ? resn / gn : 0.0;

    if (E < 1e-10) {
      out.status = SolveStatus::trivial_minimizer;
      break;
    }
    if (gn > 0.0 && resn <= cfg.grad_tol * gn &&
        std::abs(momentum(v) - cfg.target_p) <= cfg.constraint_tol) {
      out.status = SolveStatus::converged;
      break;
    }

    if (cfg.precondition) {
      dir = res;
      fft::forward(dir, g);
      for (std::size_t i = 0; i < total; ++i) dir[i] /= (1.0 + ws.k2[i]);
      fft::inverse(dir, g);
      const double mix = solverdetail::vdot(g, dir, gp) / solverdetail::vdot(g, pgp, gp);
      for (std::size_t i = 0; i < total; ++i) dir[i] -= mix * pgp[i];
    } else {
      dir = res;
      const double mix = solverdetail::vdot(g, dir, gp) / pp;
      for (std::size_t i = 0; i < total; ++i) dir[i] -= mix * gp[i];
    }

    bool accepted = false;
    if (cfg.step_rule == StepRule::fixed) {
      for (std::size_t i = 0; i < total; ++i) trial[i] = v.values[i] - tau * dir[i];
      const double En = ws.energy_of(trial);
      if (En <= E + 1e-13 * std::max(1.0, std::abs(E))) {
        v.values.swap(trial);
        E = En;
        accepted = true;
      }
    } else {
      double t = tau;
      for (int bt = 0; bt < 40; ++bt) {
        for (std::size_t i = 0; i < total; ++i) trial[i] = v.values[i] - t * dir[i];
        const double En = ws.energy_of(trial);
        if (En <= E + 1e-13 * std::max(1.0, std::abs(E))) {
          v.values.swap(trial);
          E = En;
          tau = std::min(t * 1.25, 4.0);
          accepted = true;
          break;
        }
        t *= 0.5;
      }
    }
    if (!accepted) {
      out.status = SolveStatus::backtrack_failed;
      break;
    }

    if ((it + 1) % cfg.momentum_correct_every == 0) {
      solverdetail::correct_momentum(v, cfg.target_p, ws);
      E = ws.energy_of(v.values);
    }
  }
  if (it >= cfg.max_iters) out.status = SolveStatus::max_iterations;
  out.iters = it;

  solverdetail::correct_momentum(v, cfg.target_p, ws);
  if (out.status != SolveStatus::trivial_minimizer) v = recenter_by_eta(v);
  out.p_achieved = momentum(v);
  out.E = energy(v);
  if (out.status == SolveStatus::trivial_minimizer) {
    out.field = v;
    return out;
  }
  if (g.dim >= 2) {
    out.pohozaev = pohozaev_residuals(v, out.c_multiplier);
    if (g.dim == 2) {
      out.vortices = detect_vortices(v);
      out.mirror_defect = mirror_asymmetry(v, 1);
    }
  }
  out.field = std::move(v);
  return out;
}

inline Field make_init_field(const MinimizeConfig& cfg, const Grid& grid) {
  switch (cfg.init) {
    case InitKind::vortex_pair: {
      const double d = cfg.init_separation > 0.0 ? cfg.init_separation
                                                 : std::max(cfg.target_p / kPi, 0.75);
      return ansatz_vortex_pair(grid, d);
    }
    case InitKind::kp_ansatz:
      return ansatz_from_lump(grid, cfg.init_eps);
    case InitKind::dark_1d:
      return ansatz_dark_planar(grid, cfg.init_speed);
    case InitKind::provided:
      if (!cfg.init_field) throw std::invalid_argument("make_init_field: no field provided");
      return *cfg.init_field;
    case InitKind::file:
      throw std::invalid_argument("make_init_field: file init resolved by the caller");
  }
  throw std::logic_error("make_init_field: unreachable");
}

struct BranchChecks {
  bool below_sqrt2_line = true;
  bool lipschitz = true;
  bool concave = true;
  bool multiplier_decreasing = true;
  bool multipliers_subsonic = true;
  double worst_slope_vs_multiplier = 0.0;  ///< relative gap, interior points
};

/// Warm-started sweep over increasing momenta. Per-point failures are kept
/// in the table, not thrown. Fills c_slope with centered slopes of the
/// discrete E(p) curve.
inline std::vector<BranchPoint> trace_branch(const std::vector<double>& p_values,
                                             const Grid& grid, MinimizeConfig base = {}) {
  std::vector<BranchPoint> out;
  std::optional<Field> warm;
  for (double p : p_values) {
    MinimizeConfig cfg = base;
    cfg.target_p = p;
    if (warm) {
      cfg.init = InitKind::provided;
      cfg.init_field = warm;
    }
    BranchPoint bp = minimize_at_momentum(cfg, grid);
    if (bp.status == SolveStatus::converged) warm = bp.field;
    out.push_back(std::move(bp));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t lo = i > 0 ? i - 1 : i;
    const std::size_t hi = i + 1 < out.size() ? i + 1 : i;
    if (hi > lo && out[hi].p_achieved != out[lo].p_achieved)
      out[i].c_slope = (out[hi].E - out[lo].E) / (out[hi].p_achieved - out[lo].p_achieved);
  }
  return out;
}

inline BranchChecks branch_checks(const std::vector<BranchPoint>& pts, double tol = 1e-6) {
  BranchChecks ck;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].status != SolveStatus::converged) continue;
    if (pts[i].E > kSqrt2 * pts[i].p_achieved + tol) ck.below_sqrt2_line = false;
    if (!(pts[i].c_multiplier > 0.0 && pts[i].c_multiplier < kSqrt2))
      ck.multipliers_subsonic = false;
    if (i > 0) {
      const double dE = pts[i].E - pts[i - 1].E;
      const double dp = pts[i].p_achieved - pts[i - 1].p_achieved;
      if (std::abs(dE) > kSqrt2 * std::abs(dp) + tol) ck.lipschitz = false;
      if (pts[i].c_multiplier > pts[i - 1].c_multiplier + 1e-3) ck.multiplier_decreasing = false;
    }
    if (i > 0 && i + 1 < pts.size()) {
      const double second = pts[i + 1].E - 2.0 * pts[i].E + pts[i - 1].E;
      if (second > tol) ck.concave = false;
      if (pts[i].c_slope != 0.0 && pts[i].c_multiplier != 0.0)
        ck.worst_slope_vs_multiplier =
            std::max(ck.worst_slope_vs_multiplier,
                     std::abs(pts[i].c_slope - pts[i].c_multiplier) / pts[i].c_multiplier);
    }
  }
  return ck;
}

// ---------------------------------------------------------------------------
// obstacle problem (local minimization of the hamiltonian)

/// Energy caps of the local minimization. The defaults realize the implicit
/// constants of the torus construction: delta_c = c/sqrt2, delta0 and delta1
/// interpolate toward 1, Lambda = Lambda0/4 with Lambda0 = delta0(delta1-delta0),
/// kappa = Lambda/(1+2mu).
struct TrustRegion {
  double lambda;
  double kappa;
  double v_l2_gate;  ///< largest admissible ||V||_L2

  static TrustRegion defaults(double c) {
    if (!(c > 0.0) || !(c < kSqrt2)) throw std::domain_error("TrustRegion: 0 < c < sqrt2");
    const double dc = c / kSqrt2;
    const double d0 = 0.5 * (dc + 1.0);
    const double d1 = 0.5 * (d0 + 1.0);
    const double d2 = 0.5 * (dc + d0);
    const double mu = 0.5 * (dc / d2 + 1.0);
    TrustRegion tr{};
    tr.lambda = 0.25 * d0 * (d1 - d0);
    tr.kappa = tr.lambda / (1.0 + 2.0 * mu);
    tr.v_l2_gate = std::sqrt(4.0 * (1.0 - mu) * (mu - dc / d2) * tr.kappa);
    return tr;
  }
};

struct ObstacleResult {
  Field field;
  double F = 0.0;        ///< F^V_{c,n} at the last iterate
  double E_n = 0.0;      ///< plain Ginzburg-Landau energy
  double residual = 0.0; ///< RMS of the stationary-equation residual
  int iters = 0;
  SolveStatus status = SolveStatus::max_iterations;
};

/// Preconditioned descent of F^V_{c,n} from the constant 1, confined to the
/// energy sublevel set E_n < Lambda by backtracking.
inline ObstacleResult local_minimize_hamiltonian(double c, const Potential& V,
                                                 const TrustRegion& tr, const Grid& grid,
                                                 int max_iters = 20000, double res_tol = 1e-9,
                                                 double tau0 = 0.5) {
  if (!(c > 0.0) || !(c < kSqrt2))
    throw std::domain_error("local_minimize_hamiltonian: 0 < c < sqrt2");
  if (V.l2_norm > tr.v_l2_gate)
    throw std::domain_error("local_minimize_hamiltonian: ||V||_L2 exceeds the smallness gate");

  const Grid& g = grid;
  solverdetail::Workspace ws(g);
  Field v(g, cdouble{1.0, 0.0});
  ObstacleResult out{Field(g), 0.0, 0.0, 0.0, 0, SolveStatus::max_iterations};

  double F = hamiltonian(v, V, c);
  double tau = tau0;
  const double area = std::pow(2.0 * g.half_length(), g.dim);

  std::vector<cdouble> dir(g.total()), trial(g.total());
  int it = 0;
  for (; it < max_iters; ++it) {
    Field gF = hamiltonian_gradient(v, V, c);
    const double rms = norm_l2(gF) / std::sqrt(area);
    out.residual = rms;
    if (rms <= res_tol) {
      out.status = SolveStatus::converged;
      break;
    }
    dir = gF.values;
    fft::forward(dir, g);
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] /= (1.0 + ws.k2[i]);
    fft::inverse(dir, g);

    bool accepted = false;
    double t = tau;
    for (int bt = 0; bt < 50; ++bt) {
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = v.values[i] - t * dir[i];
      const double En = ws.energy_of(trial);
      if (En < tr.lambda) {
        Field cand(g, trial);
        const double Fn = hamiltonian(cand, V, c);
        if (Fn <= F + 1e-14 * std::max(1.0, std::abs(F))) {
          v.values.swap(trial);
          F = Fn;
          tau = std::min(t * 1.25, 8.0);
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      out.status = SolveStatus::potential_too_strong;
      break;
    }
  }
  out.iters = it;
  out.field = std::move(v);
  out.F = F;
  out.E_n = energy(out.field);
  return out;
}

// ---------------------------------------------------------------------------
// supersonic relaxation experiment

/// L2 norm of the travelling-wave residual i c d1 v + lap v + v(1-|v|^2).
inline double wave_equation_residual(const Field& f, double c) {
  Field lap = f;
  fft::forward(lap.values, f.grid);
  const Grid& g = f.grid;
  fft::for_each_mode(g, [&](std::size_t idx, int i, int j, int k) {
    const double x1 = g.freq(0, i), x2 = g.dim > 1 ? g.freq(1, j) : 0.0,
                 x3 = g.dim > 2 ? g.freq(2, k) : 0.0;
    lap.values[idx] *= -(x1 * x1 + x2 * x2 + x3 * x3);
  });
  fft::inverse(lap.values, g);
  Field d1 = spectral_derivative(f, 0, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const cdouble r = cdouble(0.0, c) * d1.values[i] + lap.values[i] +
                      f.values[i] * (1.0 - std::norm(f.values[i]));
    s += std::norm(r);
  }
  return std::sqrt(s * g.cell_volume());
}

struct RelaxationResult {
  Field field;
  double residual = 0.0;
  double final_energy = 0.0;
  int iters = 0;
  bool converged = false;
};

/// Seeks a travelling wave at speed c by preconditioned descent of the
/// squared equation residual ||G(v)||^2. The linearization of G is the
/// real-self-adjoint Hessian of E - c p, so grad(1/2 ||G||^2) = J G with
/// J h = [i c d1 + lap + (1 - 2|v|^2)] h - v^2 conj(h). For supersonic c
/// the only stationary fields are constants and the flow collapses there.
inline RelaxationResult relax_to_wave(double c, const Grid& grid, Field v, int max_iters = 4000,
                                      double tol = 1e-8) {
  const Grid& g = grid;
  solverdetail::Workspace ws(g);
  auto Gof = [&](const Field& u) {
    Field lap = u;
    fft::forward(lap.values, g);
    for (std::size_t i = 0; i < lap.values.size(); ++i) lap.values[i] *= -ws.k2[i];
    fft::inverse(lap.values, g);
    Field d1 = spectral_derivative(u, 0, 1);
    Field out(g);
    for (std::size_t i = 0; i < u.values.size(); ++i)
      out.values[i] = cdouble(0.0, c) * d1.values[i] + lap.values[i] +
                      u.values[i] * (1.0 - std::norm(u.values[i]));
    return out;
  };
  auto Jof = [&](const Field& u, const Field& h) {
    Field lap = h;
    fft::forward(lap.values, g);
    for (std::size_t i = 0; i < lap.values.size(); ++i) lap.values[i] *= -ws.k2[i];
    fft::inverse(lap.values, g);
    Field d1 = spectral_derivative(h, 0, 1);
    Field out(g);
    for (std::size_t i = 0; i < h.values.size(); ++i)
      out.values[i] = cdouble(0.0, c) * d1.values[i] + lap.values[i] +
                      (1.0 - 2.0 * std::norm(u.values[i])) * h.values[i] -
                      u.values[i] * u.values[i] * std::conj(h.values[i]);
    return out;
  };

  RelaxationResult out;
  Field G = Gof(v);
  double R = 0.5 * inner(G, G);
  double tau = 0.2;
  int it = 0;
  for (; it < max_iters; ++it) {
    const double rn = std::sqrt(2.0 * R);
    out.residual = rn;
    if (rn <= tol) {
      out.converged = true;
      break;
    }
    Field grad = Jof(v, G);
    std::vector<cdouble> dir = grad.values;
    fft::forward(dir, g);
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] /= (1.0 + ws.k2[i]) * (1.0 + ws.k2[i]);
    fft::inverse(dir, g);
    bool ok = false;
    double t = tau;
    for (int bt = 0; bt < 40; ++bt) {
      Field trial(g);
      for (std::size_t i = 0; i < v.values.size(); ++i)
        trial.values[i] = v.values[i] - t * dir[i];
      Field Gt = Gof(trial);
      const double Rt = 0.5 * inner(Gt, Gt);
      if (Rt < R) {
        v = std::move(trial);
        G = std::move(Gt);
        R = Rt;
        tau = std::min(t * 1.3, 2.0);
        ok = true;
        break;
      }
      t *= 0.5;
    }
    if (!ok) break;
  }
  out.iters = it;
  out.final_energy = energy(v);
  out.field = std::move(v);
  return out;
}

}  // namespace gpw
