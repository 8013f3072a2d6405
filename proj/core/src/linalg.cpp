#include "logsurf/linalg.hpp"

#include <cstddef>

namespace logsurf {

namespace {

// Row echelon reduction of [a | b]. Returns the pivot column of each pivot
// row, in order.
std::vector<std::size_t> eliminate(RationalMatrix& a,
                                   std::vector<Rational>& b) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && a[pivot][col].is_zero()) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[row]);
    std::swap(b[pivot], b[row]);
    for (std::size_t r = row + 1; r < rows; ++r) {
      if (a[r][col].is_zero()) continue;
      Rational factor = a[r][col] / a[row][col];
      for (std::size_t c = col; c < cols; ++c)
        a[r][c] -= factor * a[row][c];
      b[r] -= factor * b[row];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::optional<std::vector<Rational>> back_substitute(
    const RationalMatrix& a, const std::vector<Rational>& b,
    const std::vector<std::size_t>& pivots) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  // Inconsistent when a zero row has a nonzero right-hand side.
  for (std::size_t r = pivots.size(); r < rows; ++r)
    if (!b[r].is_zero()) return std::nullopt;
  std::vector<Rational> x(cols);
  for (std::size_t i = pivots.size(); i-- > 0;) {
    std::size_t col = pivots[i];
    Rational acc = b[i];
    for (std::size_t c = col + 1; c < cols; ++c) acc -= a[i][c] * x[c];
    x[col] = acc / a[i][col];
  }
  return x;
}

}  // namespace

std::optional<std::vector<Rational>> solve_square(RationalMatrix a,
                                                  std::vector<Rational> b) {
  const std::size_t n = a.size();
  auto pivots = eliminate(a, b);
  if (pivots.size() != n) return std::nullopt;
  return back_substitute(a, b, pivots);
}

std::optional<std::vector<Rational>> solve_consistent(
    RationalMatrix a, std::vector<Rational> b) {
  auto pivots = eliminate(a, b);
  return back_substitute(a, b, pivots);
}

}  // namespace logsurf
