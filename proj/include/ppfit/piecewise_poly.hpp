#ifndef PPFIT_PIECEWISE_POLY_HPP
#define PPFIT_PIECEWISE_POLY_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace ppfit {

/// Strictly increasing knot abscissae xi_0 < ... < xi_m delimiting the m
/// polynomial segments. Immutable after construction.
class Breakpoints {
 public:
  explicit Breakpoints(std::vector<double> xi);

  std::size_t segment_count() const { return xi_.size() - 1; }
  std::size_t knot_count() const { return xi_.size(); }
  double operator[](std::size_t i) const { return xi_[i]; }
  double front() const { return xi_.front(); }
  double back() const { return xi_.back(); }
  const std::vector<double>& values() const { return xi_; }

  /// Segment owning x under the half-open convention: x in [xi_i, xi_{i+1})
  /// maps to segment i; x == xi_m maps to the last segment. 0-based.
  /// Throws std::domain_error for x outside [xi_0, xi_m].
  std::size_t segment_index(double x) const;

  /// Uniform knots over [a, b].
  static Breakpoints uniform(std::size_t segments, double a, double b);

 private:
  std::vector<double> xi_;
};

/// Sample points sorted by x. The x values must lie inside the model domain
/// when the dataset is paired with a model.
struct Dataset {
  std::vector<double> x;
  std::vector<double> y;

  Dataset() = default;
  Dataset(std::vector<double> xs, std::vector<double> ys);  // validates

  std::size_t size() const { return x.size(); }
};

/// Piecewise polynomial in the global power basis: segment i evaluates
/// sum_j coeff(i, j) * x^j on [xi_i, xi_{i+1}]. Coefficients are stored
/// row-major, m rows of (degree + 1) entries. Immutable value type; all
/// operations on it are pure functions.
class PiecewisePolynomial {
 public:
  PiecewisePolynomial(Breakpoints bp, int degree, std::vector<double> coeffs);

  const Breakpoints& breakpoints() const { return bp_; }
  int degree() const { return degree_; }
  std::size_t segment_count() const { return bp_.segment_count(); }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double coeff(std::size_t segment, int j) const {
    return coeffs_[segment * (degree_ + 1) + j];
  }
  std::span<const double> segment_coeffs(std::size_t segment) const {
    return {coeffs_.data() + segment * (degree_ + 1),
            static_cast<std::size_t>(degree_ + 1)};
  }

  /// Same breakpoints and degree, new coefficient matrix.
  PiecewisePolynomial with_coeffs(std::vector<double> coeffs) const;

 private:
  Breakpoints bp_;
  int degree_;
  std::vector<double> coeffs_;
};

enum class Side { left, right };

/// r-th derivative of the segment polynomial owning x (half-open rule).
/// r > degree yields 0. Throws std::domain_error outside the domain.
double evaluate(const PiecewisePolynomial& pp, double x, int r = 0);

/// r-th derivative of segment i's own polynomial at its left or right knot,
/// regardless of which segment owns that abscissa.
double boundary_value(const PiecewisePolynomial& pp, std::size_t segment,
                      Side side, int r);

struct SampleRow {
  double x;
  double f;
  double f1;
  double f2;
};

/// per_segment_count uniformly spaced samples on every segment (both knots
/// included), each row evaluated with the segment's own polynomial so that
/// discontinuities remain visible in plots.
std::vector<SampleRow> dense_sample(const PiecewisePolynomial& pp,
                                    std::size_t per_segment_count);

namespace detail {

/// Exact falling factorial q(q-1)...(q-r+1) as a double; 1.0 for r == 0,
/// 0.0 for r > q.
double falling_factorial(int q, int r);

/// Horner evaluation of the r-th derivative of sum_j coeffs[j] x^j.
double poly_derivative(std::span<const double> coeffs, double x, int r);

}  // namespace detail

}  // namespace ppfit

#endif
