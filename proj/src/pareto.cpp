#include "ppfit/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ppfit {

std::vector<SweepOutcome> sweep(const Dataset& data, const FitConfig& base,
                                std::span<const ObjectiveWeights> grid) {
  for (const ObjectiveWeights& w : grid) w.validate();
  std::vector<SweepOutcome> out(grid.size());

#pragma omp parallel for schedule(dynamic)
  for (long long g = 0; g < static_cast<long long>(grid.size()); ++g) {
    const std::size_t gi = static_cast<std::size_t>(g);
    FitConfig cfg = base;
    cfg.weights = grid[gi];
    SweepOutcome& slot = out[gi];
    slot.record.alpha = cfg.weights.alpha;
    slot.record.beta = cfg.weights.beta;
    slot.record.seed = cfg.seed;
    try {
      FitResult res = fit(data, cfg);
      auto [projected, report] = enforce_ck(res.model, cfg.mode, &data);
      slot.record.l2 = loss_l2(projected, data);
      slot.record.le = loss_energy(projected);
      slot.record.lck = loss_ck(projected, cfg.mode);
      slot.record.epochs_run = res.history.size();
      slot.correction = report;
      slot.model = std::move(projected);
    } catch (const TrainingDiverged& err) {
      slot.record.failed = true;
      slot.record.epochs_run = err.history.size();
    }
  }
  return out;
}

std::vector<std::size_t> pareto_front_indices(
    std::span<const SweepRecord> records) {
  std::vector<std::size_t> order;
  order.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    if (!records[i].failed) order.push_back(i);
  // sort by l2, break ties toward smaller le then earlier index; a single
  // min-le scan then yields the non-dominated set
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].l2 != records[b].l2) return records[a].l2 < records[b].l2;
    if (records[a].le != records[b].le) return records[a].le < records[b].le;
    return a < b;
  });
  std::vector<std::size_t> kept;
  double best_le = std::numeric_limits<double>::infinity();
  for (std::size_t idx : order) {
    if (records[idx].le < best_le) {
      kept.push_back(idx);
      best_le = records[idx].le;
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<SweepRecord> pareto_front(const std::vector<SweepRecord>& records) {
  std::vector<SweepRecord> out;
  for (std::size_t idx : pareto_front_indices(records))
    out.push_back(records[idx]);
  return out;
}

std::vector<ObjectiveWeights> table1_grid() {
  return {{0.10, 0.900}, {0.10, 0.450}, {0.50, 0.500}, {0.50, 0.250},
          {0.75, 0.250}, {0.75, 0.125}, {0.99, 0.010}, {0.99, 0.005}};
}

std::vector<ObjectiveWeights> default_grid() {
  std::vector<ObjectiveWeights> grid = table1_grid();
  for (const double alpha : {0.10, 0.50, 0.75, 0.99}) {
    const double top = 1.0 - alpha;
    for (int q = 0; q < 8; ++q) {
      // eight beta values log-spaced over three decades, ending at 1 - alpha
      const double expo = -3.0 * static_cast<double>(7 - q) / 7.0;
      const ObjectiveWeights w{alpha, top * std::pow(10.0, expo)};
      const bool dup = std::any_of(grid.begin(), grid.end(),
                                   [&](const ObjectiveWeights& g) {
                                     return g.alpha == w.alpha &&
                                            g.beta == w.beta;
                                   });
      if (!dup) grid.push_back(w);
    }
  }
  return grid;
}

}  // namespace ppfit
