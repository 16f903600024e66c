#pragma once

#include <cstddef>
#include <vector>

namespace mecsim {

// Dense row-major matrix of plain values, used for channel grids and gain maps.
template <typename T>
struct Grid {
  int rows = 0;
  int cols = 0;
  std::vector<T> v;

  Grid() = default;
  Grid(int r, int c, T fill = T{})
      : rows(r), cols(c), v(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  T& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  const T& at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

  bool operator==(const Grid&) const = default;
};

}  // namespace mecsim
