#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include "gpw/grid.hpp"

namespace gpw {
namespace fft {

namespace detail {

struct PlanKey {
  std::array<int, 3> shape;
  int rank;
  int sign;
  bool operator<(const PlanKey& o) const {
    if (shape != o.shape) return shape < o.shape;
    if (rank != o.rank) return rank < o.rank;
    return sign < o.sign;
  }
};

/// Plans are created once per (shape, direction) and reused. FFTW planning is
/// not thread safe, execution via fftw_execute_dft is. FFTW_UNALIGNED keeps a
/// plan valid for any buffer and pins the kernel choice independently of
/// allocation, which keeps runs bit-reproducible within a build.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache c;
    return c;
  }

  fftw_plan get(const std::array<int, 3>& shape, int rank, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const PlanKey key{shape, rank, sign};
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::size_t total = 1;
    for (int a = 0; a < rank; ++a) total *= shape[a];
    std::vector<std::complex<double>> buf(total);
    auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan p = fftw_plan_dft(rank, shape.data(), ptr, ptr, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

 private:
  PlanCache() = default;
  std::mutex mu_;
  std::map<PlanKey, fftw_plan> plans_;
};

}  // namespace detail

/// In-place unnormalized forward transform.
inline void forward(std::vector<cdouble>& data, const Grid& g) {
  fftw_plan p = detail::PlanCache::instance().get(g.npts, g.dim, FFTW_FORWARD);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

/// In-place inverse transform, normalized by 1/total.
inline void inverse(std::vector<cdouble>& data, const Grid& g) {
  fftw_plan p = detail::PlanCache::instance().get(g.npts, g.dim, FFTW_BACKWARD);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
  const double s = 1.0 / static_cast<double>(g.total());
  for (auto& z : data) z *= s;
}

/// Visit every spectral bin: f(flat_index, k0, k1, k2).
template <class F>
void for_each_mode(const Grid& g, F&& f) {
  std::size_t idx = 0;
  for (int i = 0; i < g.npts[0]; ++i)
    for (int j = 0; j < g.npts[1]; ++j)
      for (int k = 0; k < g.npts[2]; ++k, ++idx) f(idx, i, j, k);
}

}  // namespace fft
}  // namespace gpw
