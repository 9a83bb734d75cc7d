#ifndef PPFIT_TRAINER_HPP
#define PPFIT_TRAINER_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppfit/losses.hpp"
#include "ppfit/piecewise_poly.hpp"

namespace ppfit {

enum class OptimizerVariant { amsgrad, adam, sgd };

struct OptimizerHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  OptimizerVariant variant = OptimizerVariant::amsgrad;
};

enum class InitStrategy { per_segment_lsq, zeros };
enum class KnotPlacement { uniform, quantile };

struct FitConfig {
  int degree = 7;
  std::size_t segments = 16;
  ContinuityMode mode{ContinuityMode::Kind::periodic, 2};
  ObjectiveWeights weights{0.10, 0.45};
  int epochs = 1000;
  int patience = 100;
  OptimizerHyper hyper;
  InitStrategy init = InitStrategy::per_segment_lsq;
  KnotPlacement placement = KnotPlacement::uniform;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument
};

struct FitResult {
  PiecewisePolynomial model;
  std::vector<LossBreakdown> history;
  std::size_t best_epoch = 0;  // 0-based index into history
  bool stopped_early = false;
};

/// First/second moment state of the step rule; all matrices are shaped like
/// the coefficient matrix. Under amsgrad, second_moment_max is the running
/// entrywise maximum of second_moment.
struct OptimizerState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::vector<double> second_moment_max;
  long step_count = 0;

  explicit OptimizerState(std::size_t size)
      : first_moment(size, 0.0),
        second_moment(size, 0.0),
        second_moment_max(size, 0.0) {}
};

/// Raised when a loss or gradient turns non-finite. Carries the per-epoch
/// history recorded up to the last finite epoch.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::string what, std::vector<LossBreakdown> hist)
      : std::runtime_error(std::move(what)), history(std::move(hist)) {}
  std::vector<LossBreakdown> history;
};

/// Knots for a dataset: uniform over [x_1, x_n], or at data quantiles.
Breakpoints place_breakpoints(const Dataset& data, std::size_t segments,
                              KnotPlacement placement);

/// per_segment_lsq: each segment solves its own ridge-damped least squares
/// (damping 1e-8) on the points it owns; segments with fewer than degree+1
/// points fall back to a constant at the segment's mean y (0 if empty).
/// zeros: the all-zero matrix.
std::vector<double> init_coeffs(const Dataset& data, const Breakpoints& bp,
                                int degree, InitStrategy strategy);

/// One optimizer update, in place. amsgrad follows the original recursion
/// without bias correction; adam applies the standard bias correction.
/// Throws TrainingDiverged on non-finite gradient entries.
void optimizer_step(OptimizerState& state, std::vector<double>& coeffs,
                    std::span<const double> grad, const OptimizerHyper& hyper);

/// Full-batch descent on the scalarized total. Records one LossBreakdown per
/// epoch (evaluated before that epoch's update), restores the best-seen
/// coefficients, and stops early after `patience` consecutive epochs without
/// strict improvement (patience 0 disables early stopping).
FitResult fit(const Dataset& data, const FitConfig& config);

}  // namespace ppfit

#endif
