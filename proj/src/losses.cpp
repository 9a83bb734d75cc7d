#include "ppfit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "detail/chunked.hpp"

namespace ppfit {

namespace {

// Knot abscissa and the two incident segment indices for Delta_{i,j}.
struct KnotPair {
  std::size_t plus_seg;
  double plus_x;
  std::size_t minus_seg;
  double minus_x;
};

KnotPair knot_pair(const Breakpoints& bp, std::size_t i) {
  const std::size_t m = bp.segment_count();
  if (i == m) return {0, bp.front(), m - 1, bp.back()};
  return {i, bp[i], i - 1, bp[i]};
}

std::size_t check_knot_index(const Breakpoints& bp, std::size_t i,
                             const ContinuityMode& mode) {
  const std::size_t m = bp.segment_count();
  const std::size_t hi = mode.wraps() ? m : m - 1;
  if (i < 1 || i > hi)
    throw std::out_of_range("discontinuity: knot index out of range for mode");
  return i;
}

double ck_divisor(std::size_t m, const ContinuityMode& mode) {
  if (mode.wraps()) return static_cast<double>(m);
  return m >= 2 ? static_cast<double>(m - 1) : 0.0;
}

}  // namespace

namespace detail {

double delta_at(const Breakpoints& bp, int degree,
                std::span<const double> coeffs, std::size_t i, int j,
                const ContinuityMode& mode) {
  check_knot_index(bp, i, mode);
  const auto kp = knot_pair(bp, i);
  const std::size_t dp1 = static_cast<std::size_t>(degree + 1);
  const std::span<const double> plus(coeffs.data() + kp.plus_seg * dp1, dp1);
  const std::span<const double> minus(coeffs.data() + kp.minus_seg * dp1, dp1);
  return poly_derivative(plus, kp.plus_x, j) -
         poly_derivative(minus, kp.minus_x, j);
}

std::size_t handled_knots(const Breakpoints& bp, const ContinuityMode& mode) {
  const std::size_t m = bp.segment_count();
  if (mode.wraps()) return m;
  return m >= 2 ? m - 1 : 0;
}

}  // namespace detail

void ObjectiveWeights::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(alpha + beta <= 1.0))
    throw std::invalid_argument(
        "weights: need alpha >= 0, beta >= 0, alpha + beta <= 1");
}

// ---------------------------------------------------------------- kernel --

EnergyKernel::EnergyKernel(const Breakpoints& bp, int degree)
    : segments_(bp.segment_count()), dp1_(degree + 1) {
  const std::size_t n = static_cast<std::size_t>(dp1_);
  g_.assign(segments_ * n * n, 0.0);
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < static_cast<long long>(segments_); ++s) {
    const std::size_t i = static_cast<std::size_t>(s);
    double* gi = g_.data() + i * n * n;
    for (int j = 2; j < dp1_; ++j) {
      for (int k = 2; k < dp1_; ++k) {
        const int p = j + k - 3;
        const double jk = static_cast<double>(j) * k * (j - 1) * (k - 1);
        gi[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(k)] =
            jk / static_cast<double>(p) *
            (std::pow(bp[i + 1], p) - std::pow(bp[i], p));
      }
    }
  }
}

double EnergyKernel::segment_value(std::size_t segment,
                                   std::span<const double> row) const {
  const std::size_t n = static_cast<std::size_t>(dp1_);
  const double* gi = g_.data() + segment * n * n;
  double s = 0.0;
  for (int j = 2; j < dp1_; ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    double inner = 0.0;
    for (int k = 2; k < dp1_; ++k)
      inner += gi[ju * n + static_cast<std::size_t>(k)] *
               row[static_cast<std::size_t>(k)];
    s += row[ju] * inner;
  }
  return s;
}

double EnergyKernel::value(std::span<const double> coeffs) const {
  const std::size_t n = static_cast<std::size_t>(dp1_);
  return detail::chunked_sum(segments_, [&](std::size_t i) {
    return segment_value(i, {coeffs.data() + i * n, n});
  });
}

void EnergyKernel::accumulate_gradient(std::span<const double> coeffs,
                                       double factor,
                                       std::span<double> grad) const {
  const std::size_t n = static_cast<std::size_t>(dp1_);
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < static_cast<long long>(segments_); ++s) {
    const std::size_t i = static_cast<std::size_t>(s);
    const double* gi = g_.data() + i * n * n;
    const double* ci = coeffs.data() + i * n;
    double* out = grad.data() + i * n;
    for (int j = 2; j < dp1_; ++j) {
      const std::size_t ju = static_cast<std::size_t>(j);
      double inner = 0.0;
      for (int k = 2; k < dp1_; ++k)
        inner += gi[ju * n + static_cast<std::size_t>(k)] *
                 ci[static_cast<std::size_t>(k)];
      out[ju] += factor * 2.0 * inner;
    }
  }
}

// ------------------------------------------------------------- evaluator --

LossEvaluator::LossEvaluator(Breakpoints bp, int degree, const Dataset& data,
                             ContinuityMode mode, ObjectiveWeights w)
    : bp_(std::move(bp)),
      degree_(degree),
      mode_(mode),
      w_(w),
      x_(data.x),
      y_(data.y),
      kernel_(bp_, degree) {
  w_.validate();
  if (mode_.order < 0) throw std::invalid_argument("mode: order must be >= 0");
  if (x_.empty()) throw std::invalid_argument("losses: empty dataset");
  if (x_.front() < bp_.front() || x_.back() > bp_.back())
    throw std::domain_error("losses: data outside the model domain");
  const std::size_t m = bp_.segment_count();
  seg_first_.assign(m, 0);
  seg_last_.assign(m, 0);
  for (std::size_t s = 0; s < m; ++s) {
    // points with x in [xi_s, xi_{s+1}); the last segment keeps x == xi_m
    const auto lo = std::lower_bound(x_.begin(), x_.end(), bp_[s]);
    const auto hi = s + 1 == m ? x_.end()
                               : std::lower_bound(x_.begin(), x_.end(), bp_[s + 1]);
    seg_first_[s] = static_cast<std::size_t>(lo - x_.begin());
    seg_last_[s] = static_cast<std::size_t>(hi - x_.begin());
  }
}

double LossEvaluator::l2(std::span<const double> coeffs) const {
  const std::size_t dp1 = static_cast<std::size_t>(degree_ + 1);
  const double sum = detail::chunked_sum(x_.size(), [&](std::size_t p) {
    const std::size_t s = bp_.segment_index(x_[p]);
    const double f = detail::poly_derivative(
        {coeffs.data() + s * dp1, dp1}, x_[p], 0);
    const double r = f - y_[p];
    return r * r;
  });
  return sum / static_cast<double>(x_.size());
}

double LossEvaluator::ck(std::span<const double> coeffs) const {
  const double divisor = ck_divisor(bp_.segment_count(), mode_);
  if (divisor == 0.0) return 0.0;
  const std::size_t m = bp_.segment_count();
  const std::size_t knots = detail::handled_knots(bp_, mode_);
  const double sum = detail::chunked_sum(knots, [&](std::size_t q) {
    const std::size_t i = q + 1;  // knot indices start at 1
    double s = 0.0;
    for (int j = 0; j <= mode_.order; ++j) {
      if (i == m && mode_.wraps() && j == 0 && !mode_.wrap_includes_value())
        continue;
      const double d = detail::delta_at(bp_, degree_, coeffs, i, j, mode_);
      s += d * d;
    }
    return s;
  });
  return sum / divisor;
}

LossBreakdown LossEvaluator::value(std::span<const double> coeffs) const {
  LossBreakdown b;
  b.l2 = l2(coeffs);
  b.lck = ck(coeffs);
  b.le = kernel_.value(coeffs);
  b.total = w_.alpha * b.lck + w_.beta * b.l2 + w_.energy_weight() * b.le;
  return b;
}

LossBreakdown LossEvaluator::value_and_gradient(std::span<const double> coeffs,
                                                std::span<double> grad) const {
  const LossBreakdown b = value(coeffs);
  const std::size_t m = bp_.segment_count();
  const std::size_t dp1 = static_cast<std::size_t>(degree_ + 1);
  const int k = mode_.order;
  std::fill(grad.begin(), grad.end(), 0.0);

  // Mismatches, reused by the two incident rows of each knot.
  const std::size_t knots = detail::handled_knots(bp_, mode_);
  std::vector<double> deltas(knots * static_cast<std::size_t>(k + 1), 0.0);
  for (std::size_t q = 0; q < knots; ++q)
    for (int j = 0; j <= k; ++j)
      deltas[q * static_cast<std::size_t>(k + 1) + static_cast<std::size_t>(j)] =
          detail::delta_at(bp_, degree_, coeffs, q + 1, j, mode_);

  const double divisor = ck_divisor(m, mode_);
  const double ck_factor = divisor > 0.0 ? 2.0 * w_.alpha / divisor : 0.0;
  const double l2_factor = 2.0 * w_.beta / static_cast<double>(x_.size());

  const auto add_knot_terms = [&](double* row, std::size_t i, double sign) {
    const auto kp = knot_pair(bp_, i);
    const double x = sign > 0.0 ? kp.plus_x : kp.minus_x;
    for (int j = 0; j <= k; ++j) {
      if (i == m && j == 0 && !mode_.wrap_includes_value()) continue;
      const double d =
          deltas[(i - 1) * static_cast<std::size_t>(k + 1) +
                 static_cast<std::size_t>(j)];
      const double c = sign * ck_factor * d;
      double xp = 1.0;
      for (int q = j; q < degree_ + 1; ++q) {
        row[q] += c * detail::falling_factorial(q, j) * xp;
        xp *= x;
      }
    }
  };

#pragma omp parallel for schedule(static)
  for (long long ss = 0; ss < static_cast<long long>(m); ++ss) {
    const std::size_t s = static_cast<std::size_t>(ss);
    double* row = grad.data() + s * dp1;
    const double* crow = coeffs.data() + s * dp1;

    // approximation term over the segment's own points
    for (std::size_t p = seg_first_[s]; p < seg_last_[s]; ++p) {
      const double f =
          detail::poly_derivative({crow, dp1}, x_[p], 0);
      const double r = l2_factor * (f - y_[p]);
      double xp = 1.0;
      for (std::size_t q = 0; q < dp1; ++q) {
        row[q] += r * xp;
        xp *= x_[p];
      }
    }

    // continuity terms: this row is the outgoing side of knot s and the
    // incoming side of knot s+1; wrap couples rows 0 and m-1.
    if (divisor > 0.0) {
      if (s >= 1) add_knot_terms(row, s, +1.0);
      if (s + 1 <= m - 1) add_knot_terms(row, s + 1, -1.0);
      if (mode_.wraps()) {
        if (s == 0) add_knot_terms(row, m, +1.0);
        if (s == m - 1) add_knot_terms(row, m, -1.0);
      }
    }
  }

  kernel_.accumulate_gradient(coeffs, w_.energy_weight(), grad);
  return b;
}

// -------------------------------------------------------- free functions --

double loss_l2(const PiecewisePolynomial& pp, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("loss_l2: empty dataset");
  const Breakpoints& bp = pp.breakpoints();
  if (data.x.front() < bp.front() || data.x.back() > bp.back())
    throw std::domain_error("loss_l2: data outside the model domain");
  const std::size_t dp1 = static_cast<std::size_t>(pp.degree() + 1);
  const double* coeffs = pp.coeffs().data();
  const double sum = detail::chunked_sum(data.size(), [&](std::size_t p) {
    const std::size_t s = bp.segment_index(data.x[p]);
    const double f = detail::poly_derivative(
        {coeffs + s * dp1, dp1}, data.x[p], 0);
    const double r = f - data.y[p];
    return r * r;
  });
  return sum / static_cast<double>(data.size());
}

double discontinuity(const PiecewisePolynomial& pp, std::size_t i, int j,
                     const ContinuityMode& mode) {
  if (j < 0) throw std::invalid_argument("discontinuity: negative order");
  return detail::delta_at(pp.breakpoints(), pp.degree(), pp.coeffs(), i, j,
                          mode);
}

double loss_ck(const PiecewisePolynomial& pp, const ContinuityMode& mode) {
  const Breakpoints& bp = pp.breakpoints();
  const std::size_t m = bp.segment_count();
  const double divisor = ck_divisor(m, mode);
  if (divisor == 0.0) return 0.0;
  const std::size_t knots = detail::handled_knots(bp, mode);
  const double sum = detail::chunked_sum(knots, [&](std::size_t q) {
    const std::size_t i = q + 1;
    double s = 0.0;
    for (int j = 0; j <= mode.order; ++j) {
      if (i == m && j == 0 && !mode.wrap_includes_value()) continue;
      const double d =
          detail::delta_at(bp, pp.degree(), pp.coeffs(), i, j, mode);
      s += d * d;
    }
    return s;
  });
  return sum / divisor;
}

double loss_energy(const PiecewisePolynomial& pp) {
  return EnergyKernel(pp.breakpoints(), pp.degree()).value(pp.coeffs());
}

double energy_quadrature(const PiecewisePolynomial& pp,
                         std::size_t subdivisions) {
  if (subdivisions < 1)
    throw std::invalid_argument("energy_quadrature: subdivisions >= 1");
  const Breakpoints& bp = pp.breakpoints();
  const std::size_t dp1 = static_cast<std::size_t>(pp.degree() + 1);
  const std::size_t n2 = 2 * subdivisions;
  return detail::chunked_sum(pp.segment_count(), [&](std::size_t s) {
    const double a = bp[s];
    const double b = bp[s + 1];
    const double h = (b - a) / static_cast<double>(n2);
    const std::span<const double> row{pp.coeffs().data() + s * dp1, dp1};
    double acc = 0.0;
    for (std::size_t q = 0; q <= n2; ++q) {
      const double x = q == n2 ? b : a + static_cast<double>(q) * h;
      const double f2 = detail::poly_derivative(row, x, 2);
      const double w = (q == 0 || q == n2) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
      acc += w * f2 * f2;
    }
    return acc * h / 3.0;
  });
}

LossBreakdown scalarized(const PiecewisePolynomial& pp, const Dataset& data,
                         const ContinuityMode& mode,
                         const ObjectiveWeights& w) {
  LossEvaluator eval(pp.breakpoints(), pp.degree(), data, mode, w);
  return eval.value(pp.coeffs());
}

std::vector<double> scalarized_gradient(const PiecewisePolynomial& pp,
                                        const Dataset& data,
                                        const ContinuityMode& mode,
                                        const ObjectiveWeights& w) {
  LossEvaluator eval(pp.breakpoints(), pp.degree(), data, mode, w);
  std::vector<double> grad(pp.coeffs().size(), 0.0);
  eval.value_and_gradient(pp.coeffs(), grad);
  return grad;
}

}  // namespace ppfit
