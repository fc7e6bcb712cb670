#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "gpw/common.hpp"

namespace gpw {

/// Periodic cube [-pi n, pi n)^dim sampled on a power-of-two lattice.
/// Axis 0 is x1, the propagation axis; values are stored row-major.
/// The frequency lattice is xi_k = k/n for signed integer k.
struct Grid {
  int dim = 1;
  long n = 1;                       ///< half period multiplier
  std::array<int, 3> npts{1, 1, 1};

  Grid() = default;
  Grid(int dim_, long n_, std::array<int, 3> npts_) : dim(dim_), n(n_), npts(npts_) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Grid: dim must be 1, 2 or 3");
    if (n < 1) throw std::invalid_argument("Grid: n must be positive");
    for (int a = 0; a < 3; ++a) {
      if (a >= dim) {
        npts[a] = 1;
        continue;
      }
      const int m = npts[a];
      if (m < 8 || (m & (m - 1)) != 0)
        throw std::invalid_argument("Grid: points per dim must be a power of two >= 8");
    }
  }

  static Grid make(int dim, long n, int pts) {
    std::array<int, 3> s{1, 1, 1};
    for (int a = 0; a < dim; ++a) s[a] = pts;
    return Grid(dim, n, s);
  }

  double half_length() const { return kPi * static_cast<double>(n); }
  double spacing(int axis) const { return 2.0 * half_length() / npts[axis]; }
  std::size_t total() const {
    return static_cast<std::size_t>(npts[0]) * npts[1] * npts[2];
  }
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= spacing(a);
    return v;
  }

  double coord(int axis, int i) const { return -half_length() + i * spacing(axis); }

  /// Signed frequency of FFT bin k along an axis: xi = k_signed / n.
  double freq(int axis, int k) const {
    const int m = npts[axis];
    const int ks = (k <= m / 2) ? k : k - m;
    return static_cast<double>(ks) / static_cast<double>(n);
  }

  std::size_t index(int i, int j = 0, int k = 0) const {
    return (static_cast<std::size_t>(i) * npts[1] + j) * npts[2] + k;
  }

  bool operator==(const Grid& o) const {
    return dim == o.dim && n == o.n && npts == o.npts;
  }

  std::string describe() const {
    std::string s = std::to_string(dim) + "d n=" + std::to_string(n) + " [";
    for (int a = 0; a < dim; ++a) s += (a ? "x" : "") + std::to_string(npts[a]);
    return s + "]";
  }
};

}  // namespace gpw
