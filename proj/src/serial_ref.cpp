#include "ppfit/serial_ref.hpp"

#include <cmath>
#include <stdexcept>

namespace ppfit::serial {

namespace {

std::size_t find_segment(const Breakpoints& bp, double x) {
  if (!(x >= bp.front() && x <= bp.back()))
    throw std::domain_error("serial: x outside the domain");
  for (std::size_t s = 0; s + 1 < bp.segment_count(); ++s)
    if (x < bp[s + 1]) return s;
  return bp.segment_count() - 1;
}

double eval_derivative(const PiecewisePolynomial& pp, std::size_t seg,
                       double x, int r) {
  const auto row = pp.segment_coeffs(seg);
  double s = 0.0;
  for (int q = r; q <= pp.degree(); ++q) {
    double ff = 1.0;
    for (int t = 0; t < r; ++t) ff *= static_cast<double>(q - t);
    s += row[static_cast<std::size_t>(q)] * ff * std::pow(x, q - r);
  }
  return s;
}

double delta(const PiecewisePolynomial& pp, std::size_t i, int j) {
  const std::size_t m = pp.segment_count();
  if (i == m)
    return eval_derivative(pp, 0, pp.breakpoints().front(), j) -
           eval_derivative(pp, m - 1, pp.breakpoints().back(), j);
  return eval_derivative(pp, i, pp.breakpoints()[i], j) -
         eval_derivative(pp, i - 1, pp.breakpoints()[i], j);
}

}  // namespace

double loss_l2(const PiecewisePolynomial& pp, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("serial: empty dataset");
  double s = 0.0;
  for (std::size_t p = 0; p < data.size(); ++p) {
    const double f =
        eval_derivative(pp, find_segment(pp.breakpoints(), data.x[p]),
                        data.x[p], 0);
    const double r = f - data.y[p];
    s += r * r;
  }
  return s / static_cast<double>(data.size());
}

double loss_ck(const PiecewisePolynomial& pp, const ContinuityMode& mode) {
  const std::size_t m = pp.segment_count();
  const std::size_t hi = mode.wraps() ? m : (m >= 2 ? m - 1 : 0);
  if (hi == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 1; i <= hi; ++i) {
    for (int j = 0; j <= mode.order; ++j) {
      if (i == m && j == 0 && !mode.wrap_includes_value()) continue;
      const double d = delta(pp, i, j);
      s += d * d;
    }
  }
  return s / static_cast<double>(mode.wraps() ? m : m - 1);
}

double loss_energy(const PiecewisePolynomial& pp) {
  const Breakpoints& bp = pp.breakpoints();
  double s = 0.0;
  for (std::size_t i = 0; i < pp.segment_count(); ++i) {
    const auto row = pp.segment_coeffs(i);
    for (int j = 2; j <= pp.degree(); ++j) {
      for (int k = 2; k <= pp.degree(); ++k) {
        const int p = j + k - 3;
        s += row[static_cast<std::size_t>(j)] *
             row[static_cast<std::size_t>(k)] *
             (static_cast<double>(j) * k * (j - 1) * (k - 1) /
              static_cast<double>(p)) *
             (std::pow(bp[i + 1], p) - std::pow(bp[i], p));
      }
    }
  }
  return s;
}

double energy_quadrature(const PiecewisePolynomial& pp,
                         std::size_t subdivisions) {
  if (subdivisions < 1)
    throw std::invalid_argument("serial: subdivisions >= 1");
  const Breakpoints& bp = pp.breakpoints();
  const std::size_t n2 = 2 * subdivisions;
  double total = 0.0;
  for (std::size_t s = 0; s < pp.segment_count(); ++s) {
    const double a = bp[s];
    const double b = bp[s + 1];
    const double h = (b - a) / static_cast<double>(n2);
    double acc = 0.0;
    for (std::size_t q = 0; q <= n2; ++q) {
      const double x = q == n2 ? b : a + static_cast<double>(q) * h;
      const double f2 = eval_derivative(pp, s, x, 2);
      const double w = (q == 0 || q == n2) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
      acc += w * f2 * f2;
    }
    total += acc * h / 3.0;
  }
  return total;
}

std::vector<double> scalarized_gradient(const PiecewisePolynomial& pp,
                                        const Dataset& data,
                                        const ContinuityMode& mode,
                                        const ObjectiveWeights& w) {
  w.validate();
  const std::size_t m = pp.segment_count();
  const std::size_t dp1 = static_cast<std::size_t>(pp.degree() + 1);
  std::vector<double> grad(m * dp1, 0.0);

  const double l2f = 2.0 * w.beta / static_cast<double>(data.size());
  for (std::size_t p = 0; p < data.size(); ++p) {
    const std::size_t s = find_segment(pp.breakpoints(), data.x[p]);
    const double r = eval_derivative(pp, s, data.x[p], 0) - data.y[p];
    for (std::size_t q = 0; q < dp1; ++q)
      grad[s * dp1 + q] += l2f * r * std::pow(data.x[p], static_cast<int>(q));
  }

  const std::size_t hi = mode.wraps() ? m : (m >= 2 ? m - 1 : 0);
  if (hi > 0) {
    const double ckf =
        2.0 * w.alpha / static_cast<double>(mode.wraps() ? m : m - 1);
    for (std::size_t i = 1; i <= hi; ++i) {
      const std::size_t plus = i == m ? 0 : i;
      const std::size_t minus = i == m ? m - 1 : i - 1;
      const double xp = i == m ? pp.breakpoints().front() : pp.breakpoints()[i];
      const double xm = i == m ? pp.breakpoints().back() : pp.breakpoints()[i];
      for (int j = 0; j <= mode.order; ++j) {
        if (i == m && j == 0 && !mode.wrap_includes_value()) continue;
        const double d = delta(pp, i, j);
        for (int q = j; q <= pp.degree(); ++q) {
          double ff = 1.0;
          for (int t = 0; t < j; ++t) ff *= static_cast<double>(q - t);
          grad[plus * dp1 + static_cast<std::size_t>(q)] +=
              ckf * d * ff * std::pow(xp, q - j);
          grad[minus * dp1 + static_cast<std::size_t>(q)] -=
              ckf * d * ff * std::pow(xm, q - j);
        }
      }
    }
  }

  const double ef = 2.0 * w.energy_weight();
  const Breakpoints& bp = pp.breakpoints();
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = pp.segment_coeffs(i);
    for (int j = 2; j <= pp.degree(); ++j) {
      double inner = 0.0;
      for (int k = 2; k <= pp.degree(); ++k) {
        const int p = j + k - 3;
        inner += (static_cast<double>(j) * k * (j - 1) * (k - 1) /
                  static_cast<double>(p)) *
                 (std::pow(bp[i + 1], p) - std::pow(bp[i], p)) *
                 row[static_cast<std::size_t>(k)];
      }
      grad[i * dp1 + static_cast<std::size_t>(j)] += ef * inner;
    }
  }
  return grad;
}

}  // namespace ppfit::serial
