#ifndef PPFIT_IO_HPP
#define PPFIT_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ppfit/ckmin.hpp"
#include "ppfit/pareto.hpp"
#include "ppfit/trainer.hpp"

namespace ppfit {

/// splitmix64; the full dataset-generation pipeline is pinned so any
/// implementation reproduces identical datasets per seed.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1): top 53 bits of next().
  double unit();
};

/// Standard normals via Box-Muller on splitmix64: per pair of uniforms
/// (u1, u2), r = sqrt(-2 log(1 - u1)), returns r cos(2 pi u2) then
/// r sin(2 pi u2).
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}
  double next();

 private:
  SplitMix64 rng_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

/// Benchmark dataset: x_i uniform on [0, 1] (x_1 = 0, x_n = 1),
/// y_i = sin(4 pi x_i^2) + noise_sigma * N(0, 1), seeded.
Dataset gen_dataset(std::size_t n, std::uint64_t seed, double noise_sigma);

/// Two-column CSV with header "x,y". The reader sorts by x and rejects
/// non-finite values; malformed rows name their line number. The writer
/// emits 17 significant digits.
Dataset read_points_csv(const std::filesystem::path& path);
void write_points_csv(const std::filesystem::path& path, const Dataset& data);

/// Affine abscissa map u = (x - offset) / scale applied before fitting.
struct Normalization {
  double offset = 0.0;
  double scale = 1.0;
  double to_internal(double x) const { return (x - offset) / scale; }
  double to_original(double u) const { return offset + scale * u; }
};

/// Everything one fit run persists. Round-trips losslessly through the JSON
/// result format (schema version "1").
struct RunArtifact {
  FitConfig config;
  Normalization normalization;
  std::vector<double> breakpoints;
  std::vector<std::vector<double>> coeffs;  // m rows of degree+1 entries
  LossBreakdown losses;
  std::optional<CorrectionReport> correction;
  std::optional<SweepRecord> sweep;        // present for sweep grid points
  std::string dense_samples;               // path of the plot CSV, if written

  PiecewisePolynomial to_model() const;
  static RunArtifact from(const FitConfig& config, const Normalization& norm,
                          const PiecewisePolynomial& model,
                          const LossBreakdown& losses);
};

void write_result_json(const std::filesystem::path& path,
                       const RunArtifact& artifact);
RunArtifact read_result_json(const std::filesystem::path& path);

/// Dense samples as CSV "x,f,f1,f2"; x is mapped back to original units.
void write_plot_csv(const std::filesystem::path& path,
                    const PiecewisePolynomial& model,
                    const Normalization& norm,
                    std::size_t samples_per_segment);

}  // namespace ppfit

#endif
