#ifndef PPFIT_LOSSES_HPP
#define PPFIT_LOSSES_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "ppfit/piecewise_poly.hpp"

namespace ppfit {

/// Continuity requirement across breakpoints. open: interior knots only.
/// cyclic: the last segment additionally wraps to the first for derivative
/// orders 1..k. periodic: the wrap also couples the function value (j = 0).
struct ContinuityMode {
  enum class Kind { open, cyclic, periodic };
  Kind kind = Kind::open;
  int order = 0;  // k

  bool wraps() const { return kind != Kind::open; }
  bool wrap_includes_value() const { return kind == Kind::periodic; }
};

/// (alpha, beta) of the scalarized objective; the energy weight is
/// 1 - alpha - beta. Requires alpha, beta >= 0 and alpha + beta <= 1.
struct ObjectiveWeights {
  double alpha = 0.0;
  double beta = 1.0;

  double energy_weight() const { return 1.0 - alpha - beta; }
  void validate() const;  // throws std::invalid_argument
};

struct LossBreakdown {
  double l2 = 0.0;
  double lck = 0.0;
  double le = 0.0;
  double total = 0.0;
};

/// Mean squared residual (1/n) sum (f(x_i) - y_i)^2.
double loss_l2(const PiecewisePolynomial& pp, const Dataset& data);

/// Derivative mismatch Delta_{i,j} at knot index i (1-based over the xi
/// array): interior i in [1, m-1] compares segments i-1 and i at xi_i;
/// i == m (cyclic/periodic only) compares segment m-1 at xi_m against
/// segment 0 at xi_0. Sign convention: incoming segment subtracted from the
/// outgoing one.
double discontinuity(const PiecewisePolynomial& pp, std::size_t i, int j,
                     const ContinuityMode& mode);

/// Mean over handled knots of sum_j Delta_{i,j}^2, j = 0..k. Divisor m-1 in
/// open mode (0 when m == 1), m otherwise; the cyclic wrap term skips j = 0.
double loss_ck(const PiecewisePolynomial& pp, const ContinuityMode& mode);

/// Integral of f''(x)^2 over the domain, evaluated through the closed-form
/// per-segment quadratic kernel (no quadrature).
double loss_energy(const PiecewisePolynomial& pp);

/// Composite Simpson approximation of the same integral, `subdivisions`
/// panels per segment. Testing oracle for loss_energy.
double energy_quadrature(const PiecewisePolynomial& pp,
                         std::size_t subdivisions);

LossBreakdown scalarized(const PiecewisePolynomial& pp, const Dataset& data,
                         const ContinuityMode& mode,
                         const ObjectiveWeights& w);

/// Analytic gradient of the scalarized total with respect to every
/// coefficient, returned row-major like the coefficient matrix.
std::vector<double> scalarized_gradient(const PiecewisePolynomial& pp,
                                        const Dataset& data,
                                        const ContinuityMode& mode,
                                        const ObjectiveWeights& w);

/// Per-segment quadratic form of the energy integral: on segment i,
/// integral of p_i''^2 equals c_i^T G_i c_i with
///   G_i[j][k] = jk(j-1)(k-1)/(j+k-3) * (xi_{i+1}^{j+k-3} - xi_i^{j+k-3}).
/// Built once per (breakpoints, degree) and reused across epochs; reusing
/// the cache is bitwise-equal to rebuilding it.
class EnergyKernel {
 public:
  EnergyKernel(const Breakpoints& bp, int degree);

  double value(std::span<const double> coeffs) const;
  double segment_value(std::size_t segment, std::span<const double> row) const;
  /// grad += factor * 2 * G_i * c_i, all segments.
  void accumulate_gradient(std::span<const double> coeffs, double factor,
                           std::span<double> grad) const;

  std::size_t segment_count() const { return segments_; }
  int degree() const { return dp1_ - 1; }

 private:
  std::size_t segments_;
  int dp1_;
  std::vector<double> g_;  // segments_ * dp1_ * dp1_
};

/// Precomputes everything that depends only on (breakpoints, degree, data,
/// mode, weights): point-to-segment ranges and the energy kernel. The
/// training loop evaluates value/gradient through this, which is
/// bitwise-identical to the free-function path.
class LossEvaluator {
 public:
  LossEvaluator(Breakpoints bp, int degree, const Dataset& data,
                ContinuityMode mode, ObjectiveWeights w);

  LossBreakdown value(std::span<const double> coeffs) const;
  /// grad must have segment_count * (degree + 1) entries; it is overwritten.
  LossBreakdown value_and_gradient(std::span<const double> coeffs,
                                   std::span<double> grad) const;

  const Breakpoints& breakpoints() const { return bp_; }
  int degree() const { return degree_; }
  const EnergyKernel& kernel() const { return kernel_; }

 private:
  double l2(std::span<const double> coeffs) const;
  double ck(std::span<const double> coeffs) const;

  Breakpoints bp_;
  int degree_;
  ContinuityMode mode_;
  ObjectiveWeights w_;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<std::size_t> seg_first_;  // first point index per segment
  std::vector<std::size_t> seg_last_;   // one past last point index
  EnergyKernel kernel_;
};

namespace detail {

/// Delta_{i,j} on a raw coefficient matrix; the single implementation behind
/// discontinuity(), loss_ck() and the gradient.
double delta_at(const Breakpoints& bp, int degree,
                std::span<const double> coeffs, std::size_t i, int j,
                const ContinuityMode& mode);

/// Knot indices the mode couples: 1..m-1, plus m when the mode wraps.
std::size_t handled_knots(const Breakpoints& bp, const ContinuityMode& mode);

}  // namespace detail

}  // namespace ppfit

#endif
