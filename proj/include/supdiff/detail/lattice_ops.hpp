#pragma once

#include <cstddef>
#include <span>

#include "supdiff/grid.hpp"

namespace supdiff::detail {

/// In-place cumulative sums along every axis of a row-major lattice array.
inline void prefix_sum_lattice(const GridDomain& lattice, std::span<double> values) {
  std::size_t stride = lattice.size();
  for (std::size_t k = 0; k < lattice.dimension(); ++k) {
    const std::size_t extent = lattice.extent(k);
    stride /= extent;
    const std::size_t block = stride * extent;
    for (std::size_t base = 0; base < values.size(); base += block) {
      for (std::size_t j = 1; j < extent; ++j) {
        double* row = values.data() + base + j * stride;
        const double* prev = row - stride;
        for (std::size_t off = 0; off < stride; ++off) row[off] += prev[off];
      }
    }
  }
}

}  // namespace supdiff::detail
