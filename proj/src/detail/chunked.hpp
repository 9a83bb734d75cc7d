#ifndef PPFIT_DETAIL_CHUNKED_HPP
#define PPFIT_DETAIL_CHUNKED_HPP

#include <cstddef>
#include <vector>

namespace ppfit::detail {

// Fixed-size chunk decomposition for parallel reductions. Partial sums are
// produced per chunk and combined in chunk order, so the result does not
// depend on the thread count. Keep the chunk size constant: changing it
// changes the summation tree and therefore the bits.
inline constexpr std::size_t kChunk = 4096;

template <typename Term>
double chunked_sum(std::size_t count, Term&& term) {
  if (count == 0) return 0.0;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  if (chunks == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += term(i);
    return s;
  }
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = lo + kChunk < count ? lo + kChunk : count;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace ppfit::detail

#endif
