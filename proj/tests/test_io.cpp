#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "epmotion/ics.hpp"
#include "epmotion/io.hpp"
#include "epmotion/oracle.hpp"
#include "epmotion/svg.hpp"

using namespace epmotion;
namespace fs = std::filesystem;

namespace {

ToyModelSpec spec(int n, Parity p) {
  ToyModelSpec s;
  s.n = n;
  s.parity = p;
  return s;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("epmotion_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

TrajectoryRecord short_record(const ToyModel& model) {
  const auto multiplets = detect_crossings(model, 0.0);
  const auto clusters = resolve_clusters_and_signs(multiplets[0], model);
  PropagationOptions options;
  options.delta_end = 0.5;
  options.grid = 500;
  options.sample_every = 100;
  options.integrator = Integrator::Rk4;
  return propagate(clusters[0].state, model, options);
}

}  // namespace

TEST_CASE("format_double round-trips doubles exactly") {
  for (double x : {0.1, -3.0, 1e-300, 12345.678901234567}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("trajectory JSONL round-trips samples and status") {
  const ToyModel model(spec(7, Parity::Odd));
  const TrajectoryRecord record = short_record(model);
  REQUIRE(record.status == RunStatus::Completed);

  TempDir tmp;
  const std::string path = (tmp.path / "traj.jsonl").string();
  write_trajectory_jsonl(record, path);
  write_record_meta(record, path + ".meta.json");
  const TrajectoryRecord loaded = read_trajectory_jsonl(path);
  CHECK(loaded.status == RunStatus::Completed);
  REQUIRE(loaded.samples.size() == record.samples.size());
  for (size_t k = 0; k < record.samples.size(); ++k) {
    CHECK(loaded.samples[k].delta == record.samples[k].delta);
    CHECK(loaded.samples[k].lambda == record.samples[k].lambda);
    CHECK((loaded.samples[k].ep_energies - record.samples[k].ep_energies)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("CSV output carries a header matching the sample layout") {
  const ToyModel model(spec(7, Parity::Odd));
  const TrajectoryRecord record = short_record(model);
  TempDir tmp;
  const std::string path = (tmp.path / "traj.csv").string();
  write_trajectory_csv(record, path);
  const std::string text = slurp(path);
  CHECK(text.rfind("delta,re_lambda,im_lambda", 0) == 0);
  CHECK(text.find("re_ep_0") != std::string::npos);
  CHECK(text.find("res_closure") != std::string::npos);
}

TEST_CASE("repeated propagation produces byte-identical artifacts") {
  const ToyModel model(spec(7, Parity::Even));
  TempDir tmp;
  std::string first, second;
  for (int round = 0; round < 2; ++round) {
    const TrajectoryRecord record = short_record(model);
    const std::string path =
        (tmp.path / ("round" + std::to_string(round) + ".jsonl")).string();
    write_trajectory_jsonl(record, path);
    (round == 0 ? first : second) = slurp(path);
  }
  CHECK(first == second);
  CHECK(!first.empty());
}

TEST_CASE("crossings and validation serializers emit parseable JSON") {
  const ToyModel model(spec(7, Parity::Odd));
  const auto multiplets = detect_crossings(model, 0.0);
  TempDir tmp;
  const std::string cpath = (tmp.path / "crossings.json").string();
  write_crossings_json(multiplets, cpath);
  CHECK(slurp(cpath).find("lambda_in") != std::string::npos);

  std::vector<ValidationPoint> points(1);
  points[0].delta = 0.5;
  points[0].discrepancy = 1e-9;
  const std::string vpath = (tmp.path / "validation.json").string();
  write_validation_json(points, vpath);
  const auto loaded = read_validation_json(vpath);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].delta == 0.5);
  CHECK(loaded[0].discrepancy == 1e-9);
}

TEST_CASE("sweep CSV lists every eigenvalue at every grid point") {
  const ToyModel model(spec(1, Parity::Odd));
  const SpectrumSweep sweep = sweep_spectrum(model, {0.0, 0.5}, {0.0, 1.0});
  TempDir tmp;
  const std::string path = (tmp.path / "sweep.csv").string();
  write_sweep_csv(sweep, path);
  const std::string text = slurp(path);
  // header + 2 lambdas * 2 deltas * 2 eigenvalues
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 8);
}

TEST_CASE("SVG writers emit well-formed self-contained figures") {
  const ToyModel model(spec(7, Parity::Even));
  const auto multiplets = detect_crossings(model, 0.0);
  const TrajectoryRecord record = short_record(model);
  TempDir tmp;

  std::vector<double> lambdas;
  for (int k = 0; k <= 100; ++k) lambdas.push_back(0.02 + 0.98 * k / 100.0);
  const SpectrumSweep sweep = sweep_spectrum(model, lambdas, {0.0, 0.5, 1.0});
  const std::string sweep_path = (tmp.path / "sweep.svg").string();
  plot_sweep_panels(sweep, sweep_path);
  const std::string sweep_svg = slurp(sweep_path);
  CHECK(sweep_svg.find("<svg") != std::string::npos);
  CHECK(sweep_svg.find("</svg>") != std::string::npos);

  const std::string cross_path = (tmp.path / "crossings.svg").string();
  plot_crossing_diagram(model, 0.0, 0.02, 1.0, 101, multiplets, cross_path);
  CHECK(slurp(cross_path).find("</svg>") != std::string::npos);

  const std::string plane_path = (tmp.path / "plane.svg").string();
  plot_lambda_plane({record}, {1}, false, plane_path);
  CHECK(slurp(plane_path).find("polyline") != std::string::npos);

  const std::string energy_path = (tmp.path / "energy.svg").string();
  plot_energy_plane({record}, energy_path);
  CHECK(slurp(energy_path).find("</svg>") != std::string::npos);
}
