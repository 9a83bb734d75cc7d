#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "ppfit/cli.hpp"
#include "ppfit/io.hpp"

namespace fs = std::filesystem;
using ppfit::cli::run;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ppfit_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
  static int counter;
};
int TempDir::counter = 0;

std::string slurp(const fs::path& p) {
  std::ostringstream ss;
  ss << std::ifstream(p).rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gen-data then fit produces a well-formed projected artifact") {
  TempDir tmp;
  const std::string csv = tmp.file("d.csv");
  const std::string out = tmp.file("fit.json");
  CHECK(run({"gen-data", "--n", "100", "--seed", "1", "--sigma", "0.1",
             "--out", csv}) == 0);
  const std::string before = slurp(csv);

  CHECK(run({"fit", "--data", csv, "--alpha", "0.10", "--beta", "0.45",
             "--epochs", "200", "--out", out}) == 0);
  CHECK(slurp(csv) == before);  // inputs are never mutated

  const ppfit::RunArtifact art = ppfit::read_result_json(out);
  CHECK(art.coeffs.size() == 16);
  CHECK(art.coeffs.front().size() == 8);
  REQUIRE(art.correction.has_value());
  // the projection drove every mismatch to the numerical floor
  CHECK(art.losses.lck <= 1e-12);
  CHECK(art.losses.total ==
        0.10 * art.losses.lck + 0.45 * art.losses.l2 +
            (1.0 - 0.10 - 0.45) * art.losses.le);
}

TEST_CASE("fit rejects invalid weights with a usage error") {
  TempDir tmp;
  const std::string csv = tmp.file("d.csv");
  REQUIRE(run({"gen-data", "--n", "20", "--out", csv}) == 0);
  CHECK(run({"fit", "--data", csv, "--alpha", "0.6", "--beta", "0.6"}) == 1);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}) == 1);
  CHECK(run({"no-such-command"}) == 1);
  CHECK(run({"gen-data"}) == 1);                       // missing --out
  CHECK(run({"fit", "--data", "/nonexistent.csv"}) == 1);
  CHECK(run({"plot-data", "--model", "/nonexistent.json", "--out",
             "/tmp/x.csv"}) == 1);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("diverging training exits with 2") {
  TempDir tmp;
  const std::string csv = tmp.file("d.csv");
  REQUIRE(run({"gen-data", "--n", "30", "--seed", "6", "--out", csv}) == 0);
  CHECK(run({"fit", "--data", csv, "--alpha", "0", "--beta", "1",
             "--optimizer", "sgd", "--lr", "1e6", "--init", "zeros",
             "--patience", "0", "--epochs", "300"}) == 2);
}

TEST_CASE("placement and normalization flags are accepted") {
  TempDir tmp;
  const std::string csv = tmp.file("d.csv");
  // data on [0, 10] exercises a non-identity normalization
  std::ofstream f(csv);
  f << "x,y\n";
  for (int i = 0; i <= 40; ++i)
    f << (0.25 * i) << ',' << (0.1 * i) << '\n';
  f.close();
  const std::string out = tmp.file("fit.json");
  CHECK(run({"fit", "--data", csv, "--degree", "3", "--segments", "3", "--k",
             "1", "--mode", "open", "--epochs", "40", "--placement",
             "quantile", "--out", out}) == 0);
  const auto art = ppfit::read_result_json(out);
  CHECK(art.normalization.offset == 0.0);
  CHECK(art.normalization.scale == 10.0);
  CHECK(art.breakpoints.front() == 0.0);
  CHECK(art.breakpoints.back() == 1.0);

  CHECK(run({"fit", "--data", csv, "--degree", "3", "--segments", "3", "--k",
             "1", "--mode", "open", "--epochs", "40", "--no-normalize",
             "--out", out}) == 0);
  const auto art2 = ppfit::read_result_json(out);
  CHECK(art2.normalization.scale == 1.0);
  CHECK(art2.breakpoints.back() == 10.0);
}

TEST_CASE("sweep writes one record per table1 grid point and front filters") {
  TempDir tmp;
  const std::string csv = tmp.file("d.csv");
  REQUIRE(run({"gen-data", "--n", "60", "--seed", "2", "--out", csv}) == 0);
  const std::string dir = tmp.file("sweep");
  CHECK(run({"sweep", "--data", csv, "--grid", "table1", "--segments", "8",
             "--epochs", "150", "--out-dir", dir}) == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++files;
    const auto art = ppfit::read_result_json(e.path());
    REQUIRE(art.sweep.has_value());
    CHECK_FALSE(art.sweep->failed);
    CHECK(art.sweep->model_ref == e.path().filename().string());
  }
  CHECK(files == 8);

  const std::string front = tmp.file("front.json");
  CHECK(run({"front", "--in-dir", dir, "--out", front}) == 0);
  nlohmann::json j;
  std::ifstream(front) >> j;
  CHECK(j["version"] == "1");
  CHECK(j["records"].size() >= 1);
  CHECK(j["records"].size() <= 8);
}

TEST_CASE("plot-data emits m * samples rows ordered in x") {
  TempDir tmp;
  const std::string csv = tmp.file("d.csv");
  const std::string out = tmp.file("fit.json");
  const std::string plot = tmp.file("plot.csv");
  REQUIRE(run({"gen-data", "--n", "40", "--seed", "3", "--out", csv}) == 0);
  REQUIRE(run({"fit", "--data", csv, "--segments", "4", "--epochs", "50",
               "--out", out}) == 0);
  CHECK(run({"plot-data", "--model", out, "--samples-per-segment", "5",
             "--out", plot}) == 0);
  std::ifstream in(plot);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,f,f1,f2");
  std::size_t rows = 0;
  double prev = -1e300;
  double first = 0.0, last = 0.0;
  while (std::getline(in, line)) {
    const double x = std::stod(line);
    if (rows == 0) first = x;
    last = x;
    CHECK(x >= prev);
    prev = x;
    ++rows;
  }
  CHECK(rows == 4 * 5);
  CHECK(first == 0.0);
  CHECK(last == 1.0);
}

TEST_CASE("custom grid files drive the sweep") {
  TempDir tmp;
  const std::string csv = tmp.file("d.csv");
  REQUIRE(run({"gen-data", "--n", "30", "--seed", "4", "--out", csv}) == 0);
  const std::string grid = tmp.file("grid.csv");
  std::ofstream(grid) << "alpha,beta\n0.5,0.25\n0.9,0.05\n";
  const std::string dir = tmp.file("sw");
  CHECK(run({"sweep", "--data", csv, "--grid", grid, "--segments", "4",
             "--epochs", "60", "--out-dir", dir}) == 0);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 2);

  std::ofstream(grid) << "0.7,0.7\n";  // violates alpha + beta <= 1
  CHECK(run({"sweep", "--data", csv, "--grid", grid, "--out-dir", dir}) == 1);
}

TEST_CASE("a failed grid point is recorded and front still works") {
  TempDir tmp;
  const std::string csv = tmp.file("d.csv");
  REQUIRE(run({"gen-data", "--n", "25", "--seed", "8", "--out", csv}) == 0);
  const std::string grid = tmp.file("grid.csv");
  std::ofstream(grid) << "0.0,1.0\n0.5,0.25\n";
  const std::string dir = tmp.file("sw");
  // sgd at lr 1e6 diverges; the sweep must keep going and exit 0
  CHECK(run({"sweep", "--data", csv, "--grid", grid, "--segments", "2",
             "--degree", "5", "--k", "1", "--mode", "open", "--optimizer",
             "sgd", "--lr", "1e6", "--init", "zeros", "--patience", "0",
             "--epochs", "300", "--out-dir", dir}) == 0);
  const auto a = ppfit::read_result_json(fs::path(dir) / "sweep_000.json");
  REQUIRE(a.sweep.has_value());
  CHECK(a.sweep->failed);
  CHECK(a.coeffs.empty());
  const std::string front = tmp.file("front.json");
  CHECK(run({"front", "--in-dir", dir, "--out", front}) == 0);
  nlohmann::json j;
  std::ifstream(front) >> j;
  for (const auto& r : j["records"]) CHECK(r["failed"] == false);
}
