#include "ppfit/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ppfit {

using ordered_json = nlohmann::ordered_json;

std::uint64_t SplitMix64::next() {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double NormalSampler::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = rng_.unit();
  const double u2 = rng_.unit();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(angle);
  has_cached_ = true;
  return r * std::cos(angle);
}

Dataset gen_dataset(std::size_t n, std::uint64_t seed, double noise_sigma) {
  if (n < 1) throw std::invalid_argument("gen_dataset: n >= 1");
  if (noise_sigma < 0.0)
    throw std::invalid_argument("gen_dataset: sigma >= 0");
  NormalSampler normal(seed);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = n == 1 ? 0.0
                  : static_cast<double>(i) / static_cast<double>(n - 1);
    y[i] = std::sin(4.0 * std::numbers::pi * x[i] * x[i]) +
           noise_sigma * normal.next();
  }
  return Dataset(std::move(x), std::move(y));
}

// ------------------------------------------------------------------- CSV --

namespace {

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("csv: malformed number at line " +
                             std::to_string(line_no));
  }
  while (used < tok.size() &&
         (tok[used] == ' ' || tok[used] == '\t' || tok[used] == '\r'))
    ++used;
  if (used != tok.size())
    throw std::runtime_error("csv: malformed number at line " +
                             std::to_string(line_no));
  if (!std::isfinite(v))
    throw std::runtime_error("csv: non-finite value at line " +
                             std::to_string(line_no));
  return v;
}

}  // namespace

Dataset read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<double, double>> pts;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("x", 0) == 0) continue;  // header
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("csv: missing comma at line " +
                               std::to_string(line_no));
    pts.emplace_back(parse_double(line.substr(0, comma), line_no),
                     parse_double(line.substr(comma + 1), line_no));
  }
  if (pts.empty()) throw std::runtime_error("csv: no data rows in " +
                                            path.string());
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> x(pts.size()), y(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    x[i] = pts[i].first;
    y[i] = pts[i].second;
  }
  return Dataset(std::move(x), std::move(y));
}

void write_points_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write " + path.string());
  out << "x,y\n";
  for (std::size_t i = 0; i < data.size(); ++i)
    out << format17(data.x[i]) << ',' << format17(data.y[i]) << '\n';
  if (!out) throw std::runtime_error("csv: write failed for " + path.string());
}

// ------------------------------------------------------------------ JSON --

namespace {

std::string mode_name(ContinuityMode::Kind k) {
  switch (k) {
    case ContinuityMode::Kind::open: return "open";
    case ContinuityMode::Kind::cyclic: return "cyclic";
    case ContinuityMode::Kind::periodic: return "periodic";
  }
  return "open";
}

ContinuityMode::Kind mode_from(const std::string& s) {
  if (s == "open") return ContinuityMode::Kind::open;
  if (s == "cyclic") return ContinuityMode::Kind::cyclic;
  if (s == "periodic") return ContinuityMode::Kind::periodic;
  throw std::runtime_error("result: unknown mode '" + s + "'");
}

std::string variant_name(OptimizerVariant v) {
  switch (v) {
    case OptimizerVariant::amsgrad: return "amsgrad";
    case OptimizerVariant::adam: return "adam";
    case OptimizerVariant::sgd: return "sgd";
  }
  return "amsgrad";
}

OptimizerVariant variant_from(const std::string& s) {
  if (s == "amsgrad") return OptimizerVariant::amsgrad;
  if (s == "adam") return OptimizerVariant::adam;
  if (s == "sgd") return OptimizerVariant::sgd;
  throw std::runtime_error("result: unknown optimizer '" + s + "'");
}

double num_or_nan(const ordered_json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null())
    return std::numeric_limits<double>::quiet_NaN();
  return j[key].get<double>();
}

ordered_json num_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

PiecewisePolynomial RunArtifact::to_model() const {
  std::vector<double> flat;
  flat.reserve(coeffs.size() * (coeffs.empty() ? 0 : coeffs.front().size()));
  for (const auto& row : coeffs) flat.insert(flat.end(), row.begin(), row.end());
  return PiecewisePolynomial(Breakpoints(breakpoints), config.degree,
                             std::move(flat));
}

RunArtifact RunArtifact::from(const FitConfig& config,
                              const Normalization& norm,
                              const PiecewisePolynomial& model,
                              const LossBreakdown& losses) {
  RunArtifact art;
  art.config = config;
  art.normalization = norm;
  art.breakpoints = model.breakpoints().values();
  const std::size_t dp1 = static_cast<std::size_t>(model.degree() + 1);
  art.coeffs.resize(model.segment_count());
  for (std::size_t s = 0; s < model.segment_count(); ++s) {
    const auto row = model.segment_coeffs(s);
    art.coeffs[s].assign(row.begin(), row.begin() + static_cast<long>(dp1));
  }
  art.losses = losses;
  return art;
}

void write_result_json(const std::filesystem::path& path,
                       const RunArtifact& artifact) {
  ordered_json j;
  j["version"] = "1";
  ordered_json cfg;
  cfg["degree"] = artifact.config.degree;
  cfg["segments"] = artifact.config.segments;
  cfg["k"] = artifact.config.mode.order;
  cfg["mode"] = mode_name(artifact.config.mode.kind);
  cfg["alpha"] = artifact.config.weights.alpha;
  cfg["beta"] = artifact.config.weights.beta;
  cfg["epochs"] = artifact.config.epochs;
  cfg["patience"] = artifact.config.patience;
  cfg["learning_rate"] = artifact.config.hyper.learning_rate;
  cfg["beta1"] = artifact.config.hyper.beta1;
  cfg["beta2"] = artifact.config.hyper.beta2;
  cfg["epsilon"] = artifact.config.hyper.epsilon;
  cfg["optimizer"] = variant_name(artifact.config.hyper.variant);
  cfg["init"] = artifact.config.init == InitStrategy::zeros ? "zeros"
                                                            : "per_segment_lsq";
  cfg["placement"] =
      artifact.config.placement == KnotPlacement::quantile ? "quantile"
                                                           : "uniform";
  cfg["seed"] = artifact.config.seed;
  j["config"] = std::move(cfg);
  j["normalization"] = {{"offset", artifact.normalization.offset},
                        {"scale", artifact.normalization.scale}};
  j["breakpoints"] = artifact.breakpoints;
  j["coeffs"] = artifact.coeffs;
  j["losses"] = {{"l2", num_or_null(artifact.losses.l2)},
                 {"lck", num_or_null(artifact.losses.lck)},
                 {"le", num_or_null(artifact.losses.le)},
                 {"total", num_or_null(artifact.losses.total)}};
  if (artifact.correction) {
    const CorrectionReport& r = *artifact.correction;
    j["correction"] = {{"max_abs_delta_before", r.max_abs_delta_before},
                       {"max_abs_delta_after", r.max_abs_delta_after},
                       {"l2_before", num_or_null(r.l2_before)},
                       {"l2_after", num_or_null(r.l2_after)},
                       {"le_before", r.le_before},
                       {"le_after", r.le_after}};
  } else {
    j["correction"] = nullptr;
  }
  if (artifact.sweep) {
    const SweepRecord& r = *artifact.sweep;
    j["sweep"] = {{"alpha", r.alpha},
                  {"beta", r.beta},
                  {"l2", r.l2},
                  {"le", r.le},
                  {"lck", r.lck},
                  {"seed", r.seed},
                  {"epochs_run", r.epochs_run},
                  {"model_ref", r.model_ref},
                  {"failed", r.failed}};
  }
  j["dense_samples"] = artifact.dense_samples;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("result: cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out)
    throw std::runtime_error("result: write failed for " + path.string());
}

RunArtifact read_result_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("result: cannot open " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("result: invalid JSON in " + path.string() +
                             ": " + e.what());
  }
  if (!j.contains("version"))
    throw std::runtime_error("result: missing version in " + path.string());
  if (j["version"].get<std::string>() != "1")
    throw std::runtime_error("result: unsupported version '" +
                             j["version"].get<std::string>() + "'");
  for (const char* key : {"config", "breakpoints", "coeffs", "losses"})
    if (!j.contains(key))
      throw std::runtime_error(std::string("result: missing key '") + key +
                               "' in " + path.string());

  RunArtifact art;
  const ordered_json& cfg = j["config"];
  art.config.degree = cfg.at("degree").get<int>();
  art.config.segments = cfg.at("segments").get<std::size_t>();
  art.config.mode.order = cfg.at("k").get<int>();
  art.config.mode.kind = mode_from(cfg.at("mode").get<std::string>());
  art.config.weights.alpha = cfg.at("alpha").get<double>();
  art.config.weights.beta = cfg.at("beta").get<double>();
  art.config.epochs = cfg.at("epochs").get<int>();
  art.config.patience = cfg.at("patience").get<int>();
  art.config.hyper.learning_rate = cfg.at("learning_rate").get<double>();
  art.config.hyper.beta1 = cfg.at("beta1").get<double>();
  art.config.hyper.beta2 = cfg.at("beta2").get<double>();
  art.config.hyper.epsilon = cfg.at("epsilon").get<double>();
  art.config.hyper.variant = variant_from(cfg.at("optimizer").get<std::string>());
  art.config.init = cfg.at("init").get<std::string>() == "zeros"
                        ? InitStrategy::zeros
                        : InitStrategy::per_segment_lsq;
  art.config.placement = cfg.at("placement").get<std::string>() == "quantile"
                             ? KnotPlacement::quantile
                             : KnotPlacement::uniform;
  art.config.seed = cfg.at("seed").get<std::uint64_t>();
  if (j.contains("normalization")) {
    art.normalization.offset = j["normalization"].at("offset").get<double>();
    art.normalization.scale = j["normalization"].at("scale").get<double>();
  }
  art.breakpoints = j["breakpoints"].get<std::vector<double>>();
  art.coeffs = j["coeffs"].get<std::vector<std::vector<double>>>();
  art.losses.l2 = num_or_nan(j["losses"], "l2");
  art.losses.lck = num_or_nan(j["losses"], "lck");
  art.losses.le = num_or_nan(j["losses"], "le");
  art.losses.total = num_or_nan(j["losses"], "total");
  if (j.contains("correction") && !j["correction"].is_null()) {
    const ordered_json& c = j["correction"];
    CorrectionReport r;
    r.max_abs_delta_before = c.at("max_abs_delta_before").get<double>();
    r.max_abs_delta_after = c.at("max_abs_delta_after").get<double>();
    r.l2_before = num_or_nan(c, "l2_before");
    r.l2_after = num_or_nan(c, "l2_after");
    r.le_before = c.at("le_before").get<double>();
    r.le_after = c.at("le_after").get<double>();
    art.correction = r;
  }
  if (j.contains("sweep")) {
    const ordered_json& s = j["sweep"];
    SweepRecord r;
    r.alpha = s.at("alpha").get<double>();
    r.beta = s.at("beta").get<double>();
    r.l2 = num_or_nan(s, "l2");
    r.le = num_or_nan(s, "le");
    r.lck = num_or_nan(s, "lck");
    r.seed = s.at("seed").get<std::uint64_t>();
    r.epochs_run = s.at("epochs_run").get<std::size_t>();
    r.model_ref = s.at("model_ref").get<std::string>();
    r.failed = s.at("failed").get<bool>();
    art.sweep = r;
  }
  if (j.contains("dense_samples") && j["dense_samples"].is_string())
    art.dense_samples = j["dense_samples"].get<std::string>();
  return art;
}

void write_plot_csv(const std::filesystem::path& path,
                    const PiecewisePolynomial& model,
                    const Normalization& norm,
                    std::size_t samples_per_segment) {
  const auto rows = dense_sample(model, samples_per_segment);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("plot: cannot write " + path.string());
  out << "x,f,f1,f2\n";
  // derivatives reported with respect to the original abscissa
  const double s1 = 1.0 / norm.scale;
  const double s2 = s1 * s1;
  for (const SampleRow& r : rows)
    out << format17(norm.to_original(r.x)) << ',' << format17(r.f) << ','
        << format17(r.f1 * s1) << ',' << format17(r.f2 * s2) << '\n';
  if (!out) throw std::runtime_error("plot: write failed for " + path.string());
}

}  // namespace ppfit
