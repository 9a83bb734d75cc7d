#include "ppfit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail/small_linalg.hpp"

namespace ppfit {

void FitConfig::validate() const {
  if (degree < 0) throw std::invalid_argument("fit: degree must be >= 0");
  if (segments < 1) throw std::invalid_argument("fit: segments must be >= 1");
  if (epochs < 1) throw std::invalid_argument("fit: epochs must be >= 1");
  if (patience < 0) throw std::invalid_argument("fit: patience must be >= 0");
  if (mode.order < 0 || mode.order > degree)
    throw std::invalid_argument("fit: continuity order must be in [0, degree]");
  if (!(hyper.learning_rate > 0.0))
    throw std::invalid_argument("fit: learning rate must be positive");
  if (!(hyper.beta1 >= 0.0 && hyper.beta1 < 1.0) ||
      !(hyper.beta2 >= 0.0 && hyper.beta2 < 1.0))
    throw std::invalid_argument("fit: moment constants must lie in [0, 1)");
  if (!(hyper.epsilon > 0.0))
    throw std::invalid_argument("fit: epsilon must be positive");
  weights.validate();
}

Breakpoints place_breakpoints(const Dataset& data, std::size_t segments,
                              KnotPlacement placement) {
  if (segments < 1) throw std::invalid_argument("breakpoints: segments >= 1");
  const double a = data.x.front();
  const double b = data.x.back();
  if (!(a < b))
    throw std::invalid_argument("breakpoints: degenerate data range");
  if (placement == KnotPlacement::uniform)
    return Breakpoints::uniform(segments, a, b);
  // knots at data quantiles
  std::vector<double> xi(segments + 1);
  const std::size_t n = data.size();
  for (std::size_t i = 0; i <= segments; ++i) {
    const double pos = static_cast<double>(i) * static_cast<double>(n - 1) /
                       static_cast<double>(segments);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    xi[i] = lo + 1 < n ? data.x[lo] + frac * (data.x[lo + 1] - data.x[lo])
                       : data.x[n - 1];
  }
  xi.front() = a;
  xi.back() = b;
  for (std::size_t i = 1; i < xi.size(); ++i)
    if (!(xi[i - 1] < xi[i]))
      throw std::invalid_argument(
          "breakpoints: quantile placement needs more distinct x values");
  return Breakpoints(std::move(xi));
}

std::vector<double> init_coeffs(const Dataset& data, const Breakpoints& bp,
                                int degree, InitStrategy strategy) {
  const std::size_t m = bp.segment_count();
  const std::size_t dp1 = static_cast<std::size_t>(degree + 1);
  std::vector<double> coeffs(m * dp1, 0.0);
  if (strategy == InitStrategy::zeros) return coeffs;

  constexpr double kRidge = 1e-8;
  for (std::size_t s = 0; s < m; ++s) {
    const auto lo = std::lower_bound(data.x.begin(), data.x.end(), bp[s]);
    const auto hi = s + 1 == m
                        ? data.x.end()
                        : std::lower_bound(data.x.begin(), data.x.end(),
                                           bp[s + 1]);
    const std::size_t first = static_cast<std::size_t>(lo - data.x.begin());
    const std::size_t last = static_cast<std::size_t>(hi - data.x.begin());
    const std::size_t count = last - first;
    if (count == 0) continue;  // row stays zero
    if (count < dp1) {
      // constant fit at the segment's mean target
      double mean = 0.0;
      for (std::size_t p = first; p < last; ++p) mean += data.y[p];
      coeffs[s * dp1] = mean / static_cast<double>(count);
      continue;
    }
    // ridge-damped normal equations on the segment's own points
    std::vector<double> ata(dp1 * dp1, 0.0);
    std::vector<double> aty(dp1, 0.0);
    std::vector<double> pow_row(dp1);
    for (std::size_t p = first; p < last; ++p) {
      double xp = 1.0;
      for (std::size_t q = 0; q < dp1; ++q) {
        pow_row[q] = xp;
        xp *= data.x[p];
      }
      for (std::size_t r = 0; r < dp1; ++r) {
        aty[r] += pow_row[r] * data.y[p];
        for (std::size_t c = 0; c < dp1; ++c)
          ata[r * dp1 + c] += pow_row[r] * pow_row[c];
      }
    }
    for (std::size_t r = 0; r < dp1; ++r) ata[r * dp1 + r] += kRidge;
    const std::vector<double> sol = detail::solve_dense(ata, aty);
    std::copy(sol.begin(), sol.end(), coeffs.begin() + s * dp1);
  }
  return coeffs;
}

void optimizer_step(OptimizerState& state, std::vector<double>& coeffs,
                    std::span<const double> grad,
                    const OptimizerHyper& hyper) {
  for (double g : grad)
    if (!std::isfinite(g))
      throw TrainingDiverged("optimizer: non-finite gradient entry", {});
  state.step_count += 1;
  const std::size_t n = coeffs.size();
  switch (hyper.variant) {
    case OptimizerVariant::sgd:
      for (std::size_t i = 0; i < n; ++i)
        coeffs[i] -= hyper.learning_rate * grad[i];
      break;
    case OptimizerVariant::amsgrad:
      for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        state.first_moment[i] =
            hyper.beta1 * state.first_moment[i] + (1.0 - hyper.beta1) * g;
        state.second_moment[i] =
            hyper.beta2 * state.second_moment[i] + (1.0 - hyper.beta2) * g * g;
        state.second_moment_max[i] =
            std::max(state.second_moment_max[i], state.second_moment[i]);
        coeffs[i] -= hyper.learning_rate * state.first_moment[i] /
                     (std::sqrt(state.second_moment_max[i]) + hyper.epsilon);
      }
      break;
    case OptimizerVariant::adam: {
      const double c1 =
          1.0 - std::pow(hyper.beta1, static_cast<double>(state.step_count));
      const double c2 =
          1.0 - std::pow(hyper.beta2, static_cast<double>(state.step_count));
      for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        state.first_moment[i] =
            hyper.beta1 * state.first_moment[i] + (1.0 - hyper.beta1) * g;
        state.second_moment[i] =
            hyper.beta2 * state.second_moment[i] + (1.0 - hyper.beta2) * g * g;
        coeffs[i] -= hyper.learning_rate * (state.first_moment[i] / c1) /
                     (std::sqrt(state.second_moment[i] / c2) + hyper.epsilon);
      }
      break;
    }
  }
}

FitResult fit(const Dataset& data, const FitConfig& config) {
  config.validate();
  const Breakpoints bp =
      place_breakpoints(data, config.segments, config.placement);
  std::vector<double> coeffs =
      init_coeffs(data, bp, config.degree, config.init);
  const LossEvaluator eval(bp, config.degree, data, config.mode,
                           config.weights);

  OptimizerState state(coeffs.size());
  std::vector<double> grad(coeffs.size(), 0.0);
  std::vector<LossBreakdown> history;
  history.reserve(static_cast<std::size_t>(config.epochs));
  std::vector<double> best = coeffs;
  double best_total = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  int bad = 0;
  bool stopped_early = false;

  for (int e = 0; e < config.epochs; ++e) {
    const LossBreakdown bd = eval.value_and_gradient(coeffs, grad);
    if (!std::isfinite(bd.total))
      throw TrainingDiverged("fit: loss diverged", std::move(history));
    history.push_back(bd);
    if (bd.total < best_total) {
      best_total = bd.total;
      best = coeffs;
      best_epoch = static_cast<std::size_t>(e);
      bad = 0;
    } else {
      ++bad;
      if (config.patience > 0 && bad >= config.patience) {
        stopped_early = true;
        break;
      }
    }
    try {
      optimizer_step(state, coeffs, grad, config.hyper);
    } catch (TrainingDiverged& err) {
      throw TrainingDiverged(err.what(), std::move(history));
    }
  }

  return FitResult{PiecewisePolynomial(bp, config.degree, std::move(best)),
                   std::move(history), best_epoch, stopped_early};
}

}  // namespace ppfit
