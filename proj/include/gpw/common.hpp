#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gpw {

using cdouble = std::complex<double>;

inline constexpr double kSqrt2 = 1.4142135623730950488016887242097;
inline constexpr double kPi = 3.1415926535897932384626433832795;

/// Real inner product <a,b> = Re(a * conj(b)).
inline double rdot(cdouble a, cdouble b) { return a.real() * b.real() + a.imag() * b.imag(); }

/// Composite trapezoid on [a, b] with npts samples (npts >= 2).
template <class F>
double trapezoid(F&& f, double a, double b, int npts) {
  if (npts < 2) throw std::invalid_argument("trapezoid: npts < 2");
  const double h = (b - a) / (npts - 1);
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i + 1 < npts; ++i) s += f(a + i * h);
  return s * h;
}

/// Deterministic RNG. std::uniform_real_distribution is implementation-defined,
/// so uniforms and normals are generated explicitly to keep recorded seeds
/// meaningful across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // xorshift64*
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }

  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cache_ = r * std::sin(2.0 * kPi * u2);
    have_cache_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t state_;
  double cache_ = 0.0;
  bool have_cache_ = false;
};

/// FNV-1a 64-bit, used for artifact hashes in run manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace gpw
