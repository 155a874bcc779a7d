#pragma once

#include <array>
#include <vector>

namespace fdstab {

// Uniform periodic lattice on [0, 2pi)^dim, row-major indexing, used both for
// frequency scans and as the spatial torus.
struct TorusGrid {
  int dim = 1;
  std::array<int, 2> n{1, 1};

  int size() const { return dim == 1 ? n[0] : n[0] * n[1]; }

  std::array<int, 2> coords(int idx) const {
    if (dim == 1) return {idx, 0};
    return {idx / n[1], idx % n[1]};
  }

  int index(std::array<int, 2> c) const {
    auto wrap = [](int v, int m) {
      v %= m;
      return v < 0 ? v + m : v;
    };
    if (dim == 1) return wrap(c[0], n[0]);
    return wrap(c[0], n[0]) * n[1] + wrap(c[1], n[1]);
  }

  std::vector<double> theta(int idx) const {
    const auto c = coords(idx);
    std::vector<double> t(dim);
    for (int k = 0; k < dim; ++k) t[k] = 2.0 * 3.141592653589793238462643383279502884 * c[k] / n[k];
    return t;
  }
};

}  // namespace fdstab
