#include "ppfit/ckmin.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "detail/small_linalg.hpp"

namespace ppfit {

namespace {

double binom(int n, int k) {
  double v = 1.0;
  for (int t = 1; t <= k; ++t)
    v = v * static_cast<double>(n - k + t) / static_cast<double>(t);
  return v;
}

// h_j on the unit interval: degree 2k+1, flat to order k at t = 0,
// h_j^{(r)}(1) = (r == j). Built from powers t^{k+1}..t^{2k+1}, so the
// left-end conditions hold by construction and only a (k+1)^2 system
// remains. Returns (k+1) rows of 2k+2 local coefficients.
std::vector<std::vector<double>> hermite_local(int k) {
  const int nfree = k + 1;
  std::vector<double> a(static_cast<std::size_t>(nfree) * nfree, 0.0);
  for (int r = 0; r <= k; ++r)
    for (int ci = 0; ci < nfree; ++ci) {
      const int p = k + 1 + ci;
      double ff = 1.0;
      for (int t = 0; t < r; ++t) ff *= static_cast<double>(p - t);
      a[static_cast<std::size_t>(r) * nfree + ci] = ff;
    }
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(k + 1));
  for (int j = 0; j <= k; ++j) {
    std::vector<double> rhs(static_cast<std::size_t>(nfree), 0.0);
    rhs[static_cast<std::size_t>(j)] = 1.0;
    const std::vector<double> c = detail::solve_dense(a, rhs);
    std::vector<double> full(static_cast<std::size_t>(2 * k + 2), 0.0);
    for (int ci = 0; ci < nfree; ++ci)
      full[static_cast<std::size_t>(k + 1 + ci)] = c[static_cast<std::size_t>(ci)];
    rows[static_cast<std::size_t>(j)] = std::move(full);
  }
  return rows;
}

// sum_p loc[p] t^p with t = (x - a) / w, expanded in global powers of x and
// scaled by `scale`; accumulated into out (out has >= degree+1 entries).
void add_shifted(const std::vector<double>& loc, double scale, double a,
                 double w, std::vector<double>& out, std::size_t row_offset) {
  for (std::size_t p = 0; p < loc.size(); ++p) {
    if (loc[p] == 0.0) continue;
    const double cp = scale * loc[p] / std::pow(w, static_cast<double>(p));
    for (std::size_t q = 0; q <= p; ++q)
      out[row_offset + q] += cp * binom(static_cast<int>(p), static_cast<int>(q)) *
                             std::pow(-a, static_cast<double>(p - q));
  }
}

struct Knot {
  std::size_t i;        // xi index, 1..m
  std::size_t plus_seg;
  std::size_t minus_seg;
};

std::vector<Knot> handled(const std::size_t m, const ContinuityMode& mode) {
  std::vector<Knot> out;
  for (std::size_t i = 1; i <= m - 1; ++i) out.push_back({i, i, i - 1});
  if (mode.wraps()) out.push_back({m, 0, m - 1});
  return out;
}

// Upper bound on the evaluation noise of Delta_{i,j} given the incident
// rows: roundoff of a Horner pass is below ~2d*eps times the sum of term
// magnitudes. Mismatches under this bound are indistinguishable from zero,
// so correcting them only churns the coefficients.
double delta_noise_bound(const PiecewisePolynomial& pp, const Knot& kn,
                         int j, double xp, double xm) {
  const int d = pp.degree();
  double s = 0.0;
  for (int q = j; q <= d; ++q) {
    const double ff = detail::falling_factorial(q, j);
    s += std::fabs(pp.coeff(kn.plus_seg, q)) * ff *
         std::pow(std::fabs(xp), q - j);
    s += std::fabs(pp.coeff(kn.minus_seg, q)) * ff *
         std::pow(std::fabs(xm), q - j);
  }
  return 8.0 * static_cast<double>(d + 1) *
         std::numeric_limits<double>::epsilon() * s;
}

}  // namespace

std::vector<std::vector<double>> hermite_step_basis(int k, double a,
                                                    double b) {
  if (k < 0) throw std::invalid_argument("hermite_step_basis: k >= 0");
  if (!(b > a)) throw std::invalid_argument("hermite_step_basis: need b > a");
  const double w = b - a;
  const auto local = hermite_local(k);
  std::vector<std::vector<double>> out(local.size());
  for (int j = 0; j <= k; ++j) {
    std::vector<double> row(static_cast<std::size_t>(2 * k + 2), 0.0);
    add_shifted(local[static_cast<std::size_t>(j)],
                std::pow(w, static_cast<double>(j)), a, w, row, 0);
    out[static_cast<std::size_t>(j)] = std::move(row);
  }
  return out;
}

std::pair<PiecewisePolynomial, CorrectionReport> enforce_ck(
    const PiecewisePolynomial& pp, const ContinuityMode& mode,
    const Dataset* data) {
  const int k = mode.order;
  const int d = pp.degree();
  if (k < 0) throw std::invalid_argument("enforce_ck: order >= 0");
  if (d < 2 * k + 1)
    throw std::invalid_argument("enforce_ck: requires degree >= 2k+1");

  const Breakpoints& bp = pp.breakpoints();
  const std::size_t m = pp.segment_count();
  const std::size_t dp1 = static_cast<std::size_t>(d + 1);

  CorrectionReport report;
  report.le_before = loss_energy(pp);
  report.l2_before = data ? loss_l2(pp, *data)
                          : std::numeric_limits<double>::quiet_NaN();

  const auto local = hermite_local(k);
  // mirrored local basis: prescribed derivatives at t = 0, flat at t = 1
  std::vector<std::vector<double>> mirrored(local.size());
  for (int j = 0; j <= k; ++j) {
    std::vector<double> hm(static_cast<std::size_t>(2 * k + 2), 0.0);
    const auto& h = local[static_cast<std::size_t>(j)];
    for (std::size_t p = 0; p < h.size(); ++p) {
      if (h[p] == 0.0) continue;
      for (std::size_t q = 0; q <= p; ++q)
        hm[q] += h[p] * binom(static_cast<int>(p), static_cast<int>(q)) *
                 (q % 2 == 0 ? 1.0 : -1.0);
    }
    if (j % 2 == 1)
      for (double& c : hm) c = -c;
    mirrored[static_cast<std::size_t>(j)] = std::move(hm);
  }

  std::vector<double> coeffs = pp.coeffs();
  const auto knots = handled(m, mode);

  // one simultaneous pass: every mismatch is measured on the input model
  for (const Knot& kn : knots) {
    const double xp = kn.i == m ? bp.front() : bp[kn.i];
    const double xm = kn.i == m ? bp.back() : bp[kn.i];
    for (int j = 0; j <= k; ++j) {
      if (kn.i == m && j == 0 && !mode.wrap_includes_value()) continue;
      const double delta = detail::delta_at(bp, d, pp.coeffs(), kn.i, j, mode);
      const double mag = std::fabs(delta);
      report.max_abs_delta_before = std::max(report.max_abs_delta_before, mag);
      if (mag <= delta_noise_bound(pp, kn, j, xp, xm)) continue;

      // outgoing side: raise the right-end derivative by delta/2
      {
        const double a = bp[kn.minus_seg];
        const double w = bp[kn.minus_seg + 1] - a;
        add_shifted(local[static_cast<std::size_t>(j)],
                    0.5 * delta * std::pow(w, static_cast<double>(j)), a, w,
                    coeffs, kn.minus_seg * dp1);
      }
      // incoming side: lower the left-end derivative by delta/2
      {
        const double a = bp[kn.plus_seg];
        const double w = bp[kn.plus_seg + 1] - a;
        add_shifted(mirrored[static_cast<std::size_t>(j)],
                    -0.5 * delta * std::pow(w, static_cast<double>(j)), a, w,
                    coeffs, kn.plus_seg * dp1);
      }
    }
  }

  PiecewisePolynomial projected = pp.with_coeffs(std::move(coeffs));
  for (const Knot& kn : knots) {
    for (int j = 0; j <= k; ++j) {
      if (kn.i == m && j == 0 && !mode.wrap_includes_value()) continue;
      const double after = std::fabs(
          detail::delta_at(bp, d, projected.coeffs(), kn.i, j, mode));
      report.max_abs_delta_after = std::max(report.max_abs_delta_after, after);
    }
  }
  report.le_after = loss_energy(projected);
  report.l2_after = data ? loss_l2(projected, *data)
                         : std::numeric_limits<double>::quiet_NaN();
  return {std::move(projected), report};
}

}  // namespace ppfit
