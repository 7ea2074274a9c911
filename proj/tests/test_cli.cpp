#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("epmotion_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(EPMOTION_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("crossings subcommand writes the multiplet report") {
  TempDir tmp;
  const int code = run_cli("crossings --model toy --n 7 --parity odd --out " +
                           tmp.path.string());
  CHECK(code == 0);
  CHECK(fs::exists(tmp.path / "crossings.json"));
  CHECK(fs::exists(tmp.path / "crossings.svg"));
  CHECK(slurp(tmp.path / "crossings.json").find("lambda_in") !=
        std::string::npos);
}

TEST_CASE("run subcommand produces the full artifact set and a summary") {
  TempDir tmp;
  const int code = run_cli(
      "run --model toy --n 7 --parity odd --grid 2000 --check-every 200 "
      "--rk4 --checkpoints 0.5 1.0 --out " +
      tmp.path.string());
  CHECK(code == 0);
  CHECK(fs::exists(tmp.path / "summary.json"));
  CHECK(fs::exists(tmp.path / "lambda_plane.svg"));
  CHECK(fs::exists(tmp.path / "energy_plane.svg"));
  CHECK(fs::exists(tmp.path / "sweep.svg"));
  bool has_cluster = false, has_validation = false;
  for (const auto& entry : fs::directory_iterator(tmp.path)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("cluster_", 0) == 0 && name.ends_with(".jsonl"))
      has_cluster = true;
    if (name.rfind("validation_", 0) == 0) has_validation = true;
  }
  CHECK(has_cluster);
  CHECK(has_validation);
  CHECK(slurp(tmp.path / "summary.json").find("completed") !=
        std::string::npos);

  // report renders the summary of an existing run directory
  CHECK(run_cli("report " + tmp.path.string()) == 0);
}

TEST_CASE("seed-ep start follows the analytic N=1 trajectory") {
  TempDir tmp;
  const int code = run_cli(
      "run --model toy --n 1 --parity odd --start-delta 0.5 --seed-ep 0+2i "
      "--grid 5000 --check-every 500 --rk4 --skip-validate --out " +
      tmp.path.string());
  CHECK(code == 0);
  const std::string meta = slurp(tmp.path / "cluster_seed.jsonl.meta.json");
  CHECK(meta.find("\"status\": \"completed\"") != std::string::npos);
  // final lambda must be ~i (lambda = i*omega/delta at delta=1)
  const auto re_pos = meta.find("\"final_im_lambda\": ");
  REQUIRE(re_pos != std::string::npos);
  const double im = std::stod(meta.substr(re_pos + 19));
  CHECK(std::abs(im - 1.0) <= 1e-4);
}

TEST_CASE("invalid arguments yield a nonzero exit status") {
  TempDir tmp;
  CHECK(run_cli("run --model toy --n 4 --parity odd --out " +
                tmp.path.string()) != 0);
  CHECK(run_cli("report " + (tmp.path / "missing").string()) != 0);
}
