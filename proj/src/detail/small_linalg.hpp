#ifndef PPFIT_DETAIL_SMALL_LINALG_HPP
#define PPFIT_DETAIL_SMALL_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ppfit::detail {

// Dense n x n solve with partial pivoting, in place on copies. Sized for the
// small systems in this project (Hermite conditions, ridge normal equations).
inline std::vector<double> solve_dense(std::vector<double> a,
                                       std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw std::invalid_argument("solve_dense: shape");
  std::vector<std::size_t> piv(n);
  for (std::size_t i = 0; i < n; ++i) piv[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    double best_abs = std::fabs(a[piv[col] * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::fabs(a[piv[r] * n + col]);
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (best_abs == 0.0) throw std::runtime_error("solve_dense: singular");
    std::swap(piv[col], piv[best]);
    const double pivot = a[piv[col] * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[piv[r] * n + col] / pivot;
      if (f == 0.0) continue;
      a[piv[r] * n + col] = 0.0;
      for (std::size_t c = col + 1; c < n; ++c)
        a[piv[r] * n + c] -= f * a[piv[col] * n + c];
      b[piv[r]] -= f * b[piv[col]];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[piv[i]];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[piv[i] * n + c] * x[c];
    x[i] = s / a[piv[i] * n + i];
  }
  return x;
}

}  // namespace ppfit::detail

#endif
