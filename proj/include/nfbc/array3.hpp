#pragma once

#include <cstddef>
#include <vector>

namespace nfbc {

// Dense 3-D array of doubles, x-fastest: linear index = (k*ny + j)*nx + i.
// All field and material storage in the solver uses this layout.
struct Array3 {
  std::size_t nx = 0, ny = 0, nz = 0;
  std::vector<double> v;

  Array3() = default;
  Array3(std::size_t nx_, std::size_t ny_, std::size_t nz_, double fill = 0.0)
      : nx(nx_), ny(ny_), nz(nz_), v(nx_ * ny_ * nz_, fill) {}

  std::size_t idx(std::size_t i, std::size_t j, std::size_t k) const {
    return (k * ny + j) * nx + i;
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return v[idx(i, j, k)];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return v[idx(i, j, k)];
  }
  std::size_t size() const { return v.size(); }
  double* data() { return v.data(); }
  const double* data() const { return v.data(); }
  void fill(double x) { v.assign(v.size(), x); }
};

} // namespace nfbc
