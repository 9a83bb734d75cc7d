#ifndef PPFIT_CKMIN_HPP
#define PPFIT_CKMIN_HPP

#include <utility>
#include <vector>

#include "ppfit/losses.hpp"
#include "ppfit/piecewise_poly.hpp"

namespace ppfit {

struct CorrectionReport {
  double max_abs_delta_before = 0.0;
  double max_abs_delta_after = 0.0;
  double l2_before = 0.0;  // NaN when no dataset was supplied
  double l2_after = 0.0;
  double le_before = 0.0;
  double le_after = 0.0;
};

/// Hermite step basis on [a, b]: k+1 polynomials H_0..H_k of degree 2k+1 in
/// global power coefficients, with H_j and its first k derivatives vanishing
/// at a, and H_j^{(r)}(b) = (r == j). Rows have 2k+2 coefficients each.
std::vector<std::vector<double>> hermite_step_basis(int k, double a, double b);

/// Projects onto the set of exactly C^k models handled by the mode: every
/// coupled mismatch Delta_{i,j} is split half/half between the two incident
/// segments via Hermite corrections of degree 2k+1, all computed from the
/// input model in one simultaneous pass. Mismatches below the evaluation
/// noise floor of the incident coefficient rows are left untouched, which
/// makes the projection bitwise idempotent. Requires degree >= 2k+1.
/// When data is given the report carries l2 before/after.
std::pair<PiecewisePolynomial, CorrectionReport> enforce_ck(
    const PiecewisePolynomial& pp, const ContinuityMode& mode,
    const Dataset* data = nullptr);

}  // namespace ppfit

#endif
