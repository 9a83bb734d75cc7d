#ifndef PPFIT_PARETO_HPP
#define PPFIT_PARETO_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppfit/ckmin.hpp"
#include "ppfit/trainer.hpp"

namespace ppfit {

/// One grid point's post-projection measurements.
struct SweepRecord {
  double alpha = 0.0;
  double beta = 0.0;
  double l2 = 0.0;
  double le = 0.0;
  double lck = 0.0;
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
  std::string model_ref;  // assigned when the model is persisted
  bool failed = false;    // fit diverged; losses are not meaningful
};

struct SweepOutcome {
  SweepRecord record;
  std::optional<PiecewisePolynomial> model;  // projected model, absent on failure
  CorrectionReport correction;
};

/// Runs fit + enforce_ck + measurement for every (alpha, beta) grid point.
/// Grid points are independent and executed in parallel; outputs are ordered
/// like the grid and bitwise-identical to sequential execution. A diverging
/// fit marks its record failed and the sweep continues.
std::vector<SweepOutcome> sweep(const Dataset& data, const FitConfig& base,
                                std::span<const ObjectiveWeights> grid);

/// Records not dominated in (l2, le); r dominates s iff r.l2 <= s.l2 and
/// r.le <= s.le with at least one strict. Exact (l2, le) duplicates keep the
/// earliest. Output preserves input order. Failed records are never part of
/// the front and never dominate.
std::vector<std::size_t> pareto_front_indices(
    std::span<const SweepRecord> records);
std::vector<SweepRecord> pareto_front(const std::vector<SweepRecord>& records);

/// The eight (alpha, beta) pairs of the reference experiment grid.
std::vector<ObjectiveWeights> table1_grid();

/// table1_grid plus, for each alpha in {0.10, 0.50, 0.75, 0.99}, eight
/// log-spaced beta values in (0, 1-alpha]; exact duplicates removed.
std::vector<ObjectiveWeights> default_grid();

}  // namespace ppfit

#endif
