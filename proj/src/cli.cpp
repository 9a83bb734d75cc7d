#include "ppfit/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>

#include "CLI11.hpp"
#include "json.hpp"
#include "ppfit/ckmin.hpp"
#include "ppfit/io.hpp"
#include "ppfit/pareto.hpp"
#include "ppfit/trainer.hpp"

namespace ppfit::cli {

namespace {

namespace fs = std::filesystem;

struct FitFlags {
  std::string data;
  FitConfig cfg;
  std::string mode = "periodic";
  std::string optimizer = "amsgrad";
  std::string init = "per_segment_lsq";
  std::string placement = "uniform";
  bool normalize = true;

  void add_common(CLI::App* cmd) {
    cmd->add_option("--data", data, "input points CSV")->required();
    cmd->add_option("--degree", cfg.degree, "polynomial degree");
    cmd->add_option("--segments", cfg.segments, "segment count");
    cmd->add_option("--k", cfg.mode.order, "continuity order");
    cmd->add_option("--mode", mode, "continuity handling")
        ->check(CLI::IsMember({"open", "cyclic", "periodic"}));
    cmd->add_option("--epochs", cfg.epochs, "training epochs");
    cmd->add_option("--patience", cfg.patience,
                    "early-stopping patience (0 disables)");
    cmd->add_option("--lr", cfg.hyper.learning_rate, "learning rate");
    cmd->add_option("--beta1", cfg.hyper.beta1, "first-moment constant");
    cmd->add_option("--beta2", cfg.hyper.beta2, "second-moment constant");
    cmd->add_option("--epsilon", cfg.hyper.epsilon, "optimizer epsilon");
    cmd->add_option("--optimizer", optimizer, "step rule")
        ->check(CLI::IsMember({"amsgrad", "adam", "sgd"}));
    cmd->add_option("--init", init, "coefficient initialization")
        ->check(CLI::IsMember({"per_segment_lsq", "zeros"}));
    cmd->add_option("--placement", placement, "knot placement")
        ->check(CLI::IsMember({"uniform", "quantile"}));
    cmd->add_option("--seed", cfg.seed, "run seed (echoed into artifacts)");
    cmd->add_flag("--normalize,!--no-normalize", normalize,
                  "map x to [0,1] before fitting (default on)");
  }

  FitConfig resolve() {
    FitConfig c = cfg;
    c.mode.kind = mode == "open"     ? ContinuityMode::Kind::open
                  : mode == "cyclic" ? ContinuityMode::Kind::cyclic
                                     : ContinuityMode::Kind::periodic;
    c.hyper.variant = optimizer == "adam"  ? OptimizerVariant::adam
                      : optimizer == "sgd" ? OptimizerVariant::sgd
                                           : OptimizerVariant::amsgrad;
    c.init = init == "zeros" ? InitStrategy::zeros
                             : InitStrategy::per_segment_lsq;
    c.placement = placement == "quantile" ? KnotPlacement::quantile
                                          : KnotPlacement::uniform;
    return c;
  }
};

Normalization make_normalization(const Dataset& data, bool enabled) {
  if (!enabled) return {};
  const double lo = data.x.front();
  const double hi = data.x.back();
  if (!(hi > lo))
    throw std::runtime_error("fit: data spans a single x value");
  return {lo, hi - lo};
}

Dataset apply_normalization(const Dataset& data, const Normalization& n) {
  std::vector<double> x(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) x[i] = n.to_internal(data.x[i]);
  return Dataset(std::move(x), data.y);
}

std::vector<ObjectiveWeights> load_grid(const std::string& source) {
  if (source == "table1") return table1_grid();
  if (source == "default") return default_grid();
  std::ifstream in(source);
  if (!in) throw std::runtime_error("sweep: cannot open grid file " + source);
  std::vector<ObjectiveWeights> grid;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("alpha", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("sweep: grid line " + std::to_string(line_no) +
                               " needs 'alpha,beta'");
    ObjectiveWeights w{std::stod(line.substr(0, comma)),
                       std::stod(line.substr(comma + 1))};
    w.validate();
    grid.push_back(w);
  }
  if (grid.empty()) throw std::runtime_error("sweep: empty grid file " + source);
  return grid;
}

std::string record_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sweep_%03zu.json", index);
  return buf;
}

int cmd_gen_data(std::size_t n, std::uint64_t seed, double sigma,
                 const std::string& out) {
  write_points_csv(out, gen_dataset(n, seed, sigma));
  std::cout << "wrote " << n << " points to " << out << "\n";
  return 0;
}

int cmd_fit(FitFlags& flags, const std::string& out,
            const std::string& plot_out, std::size_t plot_samples) {
  const FitConfig cfg = flags.resolve();
  cfg.weights.validate();
  if (cfg.degree < 2 * cfg.mode.order + 1)
    throw std::runtime_error(
        "fit: the continuity projection needs degree >= 2k+1");
  const Dataset raw = read_points_csv(flags.data);
  const Normalization norm = make_normalization(raw, flags.normalize);
  const Dataset data = apply_normalization(raw, norm);

  const FitResult res = fit(data, cfg);
  auto [projected, report] = enforce_ck(res.model, cfg.mode, &data);
  const LossBreakdown losses = scalarized(projected, data, cfg.mode, cfg.weights);

  RunArtifact art = RunArtifact::from(cfg, norm, projected, losses);
  art.correction = report;
  if (!plot_out.empty()) {
    write_plot_csv(plot_out, projected, norm, plot_samples);
    art.dense_samples = plot_out;
  }
  if (!out.empty()) write_result_json(out, art);
  std::printf("fit: l2=%.6g lck=%.6g le=%.6g total=%.6g epochs=%zu%s\n",
              losses.l2, losses.lck, losses.le, losses.total,
              res.history.size(), res.stopped_early ? " (early stop)" : "");
  return 0;
}

int cmd_sweep(FitFlags& flags, const std::string& grid_source,
              const std::string& out_dir) {
  const FitConfig base = flags.resolve();
  if (base.degree < 2 * base.mode.order + 1)
    throw std::runtime_error(
        "sweep: the continuity projection needs degree >= 2k+1");
  const std::vector<ObjectiveWeights> grid = load_grid(grid_source);
  const Dataset raw = read_points_csv(flags.data);
  const Normalization norm = make_normalization(raw, flags.normalize);
  const Dataset data = apply_normalization(raw, norm);

  fs::create_directories(out_dir);
  std::vector<SweepOutcome> outcomes = sweep(data, base, grid);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    SweepOutcome& oc = outcomes[i];
    oc.record.model_ref = record_name(i);
    FitConfig cfg = base;
    cfg.weights = {oc.record.alpha, oc.record.beta};
    RunArtifact art;
    if (oc.model) {
      LossBreakdown losses =
          scalarized(*oc.model, data, cfg.mode, cfg.weights);
      art = RunArtifact::from(cfg, norm, *oc.model, losses);
      art.correction = oc.correction;
    } else {
      art.config = cfg;
      art.normalization = norm;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      art.losses = {nan, nan, nan, nan};
    }
    art.sweep = oc.record;
    write_result_json(fs::path(out_dir) / oc.record.model_ref, art);
  }
  std::cout << "sweep: wrote " << outcomes.size() << " records to " << out_dir
            << "\n";
  return 0;
}

int cmd_front(const std::string& in_dir, const std::string& out) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("sweep_", 0) == 0 && name.size() > 5 &&
        name.substr(name.size() - 5) == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SweepRecord> records;
  for (const fs::path& f : files) {
    const RunArtifact art = read_result_json(f);
    if (!art.sweep)
      throw std::runtime_error("front: " + f.string() +
                               " is not a sweep record");
    records.push_back(*art.sweep);
  }
  const std::vector<SweepRecord> front = pareto_front(records);

  nlohmann::ordered_json j;
  j["version"] = "1";
  j["records"] = nlohmann::ordered_json::array();
  for (const SweepRecord& r : front) {
    j["records"].push_back({{"alpha", r.alpha},
                            {"beta", r.beta},
                            {"l2", r.l2},
                            {"le", r.le},
                            {"lck", r.lck},
                            {"seed", r.seed},
                            {"epochs_run", r.epochs_run},
                            {"model_ref", r.model_ref},
                            {"failed", r.failed}});
  }
  std::ofstream os(out);
  if (!os) throw std::runtime_error("front: cannot write " + out);
  os << j.dump(2) << '\n';
  std::cout << "front: " << front.size() << " of " << records.size()
            << " records are non-dominated\n";
  return 0;
}

int cmd_plot(const std::string& model_path, std::size_t samples,
             const std::string& out) {
  const RunArtifact art = read_result_json(model_path);
  write_plot_csv(out, art.to_model(), art.normalization, samples);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"piecewise-polynomial curve fitting with energy regularization"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate the benchmark dataset");
  std::size_t gen_n = 100;
  std::uint64_t gen_seed = 1;
  double gen_sigma = 0.1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of points");
  gen->add_option("--seed", gen_seed, "noise seed");
  gen->add_option("--sigma", gen_sigma, "noise standard deviation");
  gen->add_option("--out", gen_out, "output CSV")->required();

  // fit
  auto* fitc = app.add_subcommand("fit", "train one model and project it");
  FitFlags fit_flags;
  fit_flags.add_common(fitc);
  double fit_alpha = 0.10;
  double fit_beta = 0.45;
  std::string fit_out;
  std::string fit_plot;
  std::size_t fit_plot_samples = 20;
  fitc->add_option("--alpha", fit_alpha, "continuity weight");
  fitc->add_option("--beta", fit_beta, "approximation weight");
  fitc->add_option("--out", fit_out, "result JSON path");
  fitc->add_option("--plot-out", fit_plot, "dense-sample CSV path");
  fitc->add_option("--samples-per-segment", fit_plot_samples,
                   "rows per segment in --plot-out");

  // sweep
  auto* sweepc = app.add_subcommand("sweep", "fit a grid of (alpha, beta)");
  FitFlags sweep_flags;
  sweep_flags.add_common(sweepc);
  std::string sweep_grid = "table1";
  std::string sweep_dir;
  sweepc->add_option("--grid", sweep_grid,
                     "table1, default, or a CSV of alpha,beta rows");
  sweepc->add_option("--out-dir", sweep_dir, "output directory")->required();

  // front
  auto* frontc = app.add_subcommand("front", "Pareto front of sweep records");
  std::string front_dir;
  std::string front_out;
  frontc->add_option("--in-dir", front_dir, "directory of sweep records")
      ->required();
  frontc->add_option("--out", front_out, "output JSON")->required();

  // plot-data
  auto* plotc = app.add_subcommand("plot-data", "dense samples of a model");
  std::string plot_model;
  std::size_t plot_samples = 20;
  std::string plot_out;
  plotc->add_option("--model", plot_model, "result JSON")->required();
  plotc->add_option("--samples-per-segment", plot_samples, "rows per segment");
  plotc->add_option("--out", plot_out, "output CSV")->required();

  std::vector<const char*> argv;
  argv.push_back("ppfit");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_gen_data(gen_n, gen_seed, gen_sigma, gen_out);
    if (*fitc) {
      fit_flags.cfg.weights = {fit_alpha, fit_beta};
      return cmd_fit(fit_flags, fit_out, fit_plot, fit_plot_samples);
    }
    if (*sweepc) return cmd_sweep(sweep_flags, sweep_grid, sweep_dir);
    if (*frontc) return cmd_front(front_dir, front_out);
    if (*plotc) return cmd_plot(plot_model, plot_samples, plot_out);
  } catch (const TrainingDiverged& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ppfit::cli
