#ifndef PPFIT_SERIAL_REF_HPP
#define PPFIT_SERIAL_REF_HPP

#include "ppfit/losses.hpp"
#include "ppfit/piecewise_poly.hpp"

// Straight-line reference implementations of the loss kernels: textbook
// loops, no OpenMP, no kernel caching, powers via std::pow. Kept for testing
// the parallel kernels and as the baseline in the benchmark tool.
namespace ppfit::serial {

double loss_l2(const PiecewisePolynomial& pp, const Dataset& data);
double loss_ck(const PiecewisePolynomial& pp, const ContinuityMode& mode);
double loss_energy(const PiecewisePolynomial& pp);
double energy_quadrature(const PiecewisePolynomial& pp,
                         std::size_t subdivisions);
std::vector<double> scalarized_gradient(const PiecewisePolynomial& pp,
                                        const Dataset& data,
                                        const ContinuityMode& mode,
                                        const ObjectiveWeights& w);

}  // namespace ppfit::serial

#endif
