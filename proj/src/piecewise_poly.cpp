#include "ppfit/piecewise_poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppfit {

namespace detail {

double falling_factorial(int q, int r) {
  if (r == 0) return 1.0;
  if (r > q) return 0.0;
  double v = 1.0;
  for (int t = 0; t < r; ++t) v *= static_cast<double>(q - t);
  return v;
}

double poly_derivative(std::span<const double> coeffs, double x, int r) {
  const int d = static_cast<int>(coeffs.size()) - 1;
  if (r > d) return 0.0;
  // Horner on the derived coefficients coeffs[q] * q!/(q-r)!, q = r..d.
  double acc = 0.0;
  for (int q = d; q >= r; --q)
    acc = acc * x + coeffs[static_cast<std::size_t>(q)] * falling_factorial(q, r);
  return acc;
}

}  // namespace detail

Breakpoints::Breakpoints(std::vector<double> xi) : xi_(std::move(xi)) {
  if (xi_.size() < 2)
    throw std::invalid_argument("breakpoints: need at least two knots");
  for (std::size_t i = 0; i < xi_.size(); ++i) {
    if (!std::isfinite(xi_[i]))
      throw std::invalid_argument("breakpoints: non-finite knot");
    if (i > 0 && !(xi_[i - 1] < xi_[i]))
      throw std::invalid_argument("breakpoints: knots must strictly increase");
  }
}

std::size_t Breakpoints::segment_index(double x) const {
  if (!(x >= xi_.front() && x <= xi_.back()))
    throw std::domain_error("segment_index: x outside [xi_0, xi_m]");
  // First knot strictly greater than x; half-open intervals, last one closed.
  const auto it = std::upper_bound(xi_.begin(), xi_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xi_.begin());
  if (i == 0) i = 1;                    // x == xi_0 with degenerate compare
  if (i > segment_count()) i = segment_count();  // x == xi_m
  return i - 1;
}

Breakpoints Breakpoints::uniform(std::size_t segments, double a, double b) {
  if (segments == 0) throw std::invalid_argument("breakpoints: zero segments");
  std::vector<double> xi(segments + 1);
  for (std::size_t i = 0; i <= segments; ++i)
    xi[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(segments);
  xi.front() = a;
  xi.back() = b;
  return Breakpoints(std::move(xi));
}

Dataset::Dataset(std::vector<double> xs, std::vector<double> ys)
    : x(std::move(xs)), y(std::move(ys)) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("dataset: need n >= 1 and matching columns");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw std::invalid_argument("dataset: non-finite value");
    if (i > 0 && x[i] < x[i - 1])
      throw std::invalid_argument("dataset: x values must be sorted");
  }
}

PiecewisePolynomial::PiecewisePolynomial(Breakpoints bp, int degree,
                                         std::vector<double> coeffs)
    : bp_(std::move(bp)), degree_(degree), coeffs_(std::move(coeffs)) {
  if (degree_ < 0) throw std::invalid_argument("pp: degree must be >= 0");
  const std::size_t expect =
      bp_.segment_count() * static_cast<std::size_t>(degree_ + 1);
  if (coeffs_.size() != expect)
    throw std::invalid_argument("pp: coefficient matrix shape mismatch");
  for (double c : coeffs_)
    if (!std::isfinite(c))
      throw std::invalid_argument("pp: non-finite coefficient");
}

PiecewisePolynomial PiecewisePolynomial::with_coeffs(
    std::vector<double> coeffs) const {
  return PiecewisePolynomial(bp_, degree_, std::move(coeffs));
}

double evaluate(const PiecewisePolynomial& pp, double x, int r) {
  if (r < 0) throw std::invalid_argument("evaluate: negative order");
  const std::size_t seg = pp.breakpoints().segment_index(x);
  return detail::poly_derivative(pp.segment_coeffs(seg), x, r);
}

double boundary_value(const PiecewisePolynomial& pp, std::size_t segment,
                      Side side, int r) {
  if (segment >= pp.segment_count())
    throw std::out_of_range("boundary_value: segment index");
  const double x = side == Side::left ? pp.breakpoints()[segment]
                                      : pp.breakpoints()[segment + 1];
  return detail::poly_derivative(pp.segment_coeffs(segment), x, r);
}

std::vector<SampleRow> dense_sample(const PiecewisePolynomial& pp,
                                    std::size_t per_segment_count) {
  if (per_segment_count < 2)
    throw std::invalid_argument("dense_sample: need at least 2 per segment");
  const std::size_t m = pp.segment_count();
  std::vector<SampleRow> rows;
  rows.reserve(m * per_segment_count);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = pp.breakpoints()[i];
    const double b = pp.breakpoints()[i + 1];
    const auto row = pp.segment_coeffs(i);
    for (std::size_t q = 0; q < per_segment_count; ++q) {
      const double t = static_cast<double>(q) /
                       static_cast<double>(per_segment_count - 1);
      const double x = q + 1 == per_segment_count ? b : a + (b - a) * t;
      rows.push_back({x, detail::poly_derivative(row, x, 0),
                      detail::poly_derivative(row, x, 1),
                      detail::poly_derivative(row, x, 2)});
    }
  }
  return rows;
}

}  // namespace ppfit
