#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <epmotion/eom.hpp>
#include <epmotion/ics.hpp>
#include <epmotion/io.hpp>
#include <epmotion/model.hpp>
#include <epmotion/oracle.hpp>
#include <epmotion/svg.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace epmotion;

namespace {

Complex parse_complex(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
  if (s.empty()) throw CLI::ValidationError("empty complex literal");
  const auto ipos = s.find_first_of("ij");
  if (ipos == std::string::npos) return Complex(std::stod(s), 0.0);
  // Split off the trailing imaginary term: find its leading sign.
  size_t split = std::string::npos;
  for (size_t k = ipos; k-- > 0;) {
    if ((s[k] == '+' || s[k] == '-') && k > 0 && s[k - 1] != 'e' &&
        s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string re_part = (split == std::string::npos) ? "" : s.substr(0, split);
  std::string im_part = s.substr(re_part.size());
  im_part.erase(im_part.find_first_of("ij"), 1);
  if (im_part.empty() || im_part == "+") im_part = "1";
  if (im_part == "-") im_part = "-1";
  const double re = re_part.empty() ? 0.0 : std::stod(re_part);
  return Complex(re, std::stod(im_part));
}

struct ModelOptions {
  std::string config_path;
  std::string model = "toy";
  int n = 19;
  double omega = 1.0;
  std::string parity = "odd";
  std::string out_dir;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override");
    cmd->add_option("--model", model, "registered family name");
    cmd->add_option("--n", n, "toy model N (odd)");
    cmd->add_option("--omega", omega, "toy model level spacing");
    cmd->add_option("--parity", parity, "sector parity: odd|even");
    cmd->add_option("--out", out_dir, "output directory (default $EPMOTION_OUT_DIR or ./out)");
  }

  json merged(const CLI::App* cmd) const {
    json cfg;
    cfg["model"] = model;
    cfg["n"] = n;
    cfg["omega"] = omega;
    cfg["parity"] = parity;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot read config: " + config_path);
      const json file_cfg = json::parse(in);
      for (auto it = file_cfg.begin(); it != file_cfg.end(); ++it) {
        cfg[it.key()] = it.value();
      }
      // Explicit flags win over the file.
      if (cmd->count("--model")) cfg["model"] = model;
      if (cmd->count("--n")) cfg["n"] = n;
      if (cmd->count("--omega")) cfg["omega"] = omega;
      if (cmd->count("--parity")) cfg["parity"] = parity;
    }
    return cfg;
  }

  fs::path resolve_out() const {
    if (!out_dir.empty()) return out_dir;
    if (const char* env = std::getenv("EPMOTION_OUT_DIR")) return env;
    return "out";
  }
};

struct ScanOptionsCli {
  double lambda_min = 0.02;
  double lambda_max = 1.0;
  int scan_points = 2001;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda-min", lambda_min, "crossing scan lower edge");
    cmd->add_option("--lambda-max", lambda_max, "crossing scan upper edge");
    cmd->add_option("--scan-points", scan_points, "crossing scan grid points");
  }

  CrossingScanOptions to_options() const {
    CrossingScanOptions options;
    options.lambda_min = lambda_min;
    options.lambda_max = lambda_max;
    options.scan_points = scan_points;
    return options;
  }
};

int fail(const std::string& stage, const std::exception& e) {
  json diag;
  diag["stage"] = stage;
  diag["error"] = e.what();
  std::cerr << diag.dump() << std::endl;
  return 1;
}

struct ClusterRun {
  std::string label;
  double lambda_in = 0.0;
  int multiplicity = 0;
  std::vector<int> signs;
  TrajectoryRecord record;
  double max_residual = 0.0;
  double oracle_discrepancy = -1.0;  // -1: not validated
  std::string oracle_error;
};

void write_summary(const std::vector<ClusterRun>& runs, const fs::path& dir) {
  json out = json::array();
  for (const auto& run : runs) {
    json row;
    row["label"] = run.label;
    row["lambda_in"] = run.lambda_in;
    row["multiplicity"] = run.multiplicity;
    row["signs"] = run.signs;
    row["status"] = to_string(run.record.status);
    row["halt_delta"] = run.record.halt_delta;
    row["halt_message"] = run.record.halt_message;
    if (!run.record.samples.empty()) {
      const auto& last = run.record.samples.back();
      row["final_delta"] = last.delta;
      row["final_re_lambda"] = last.lambda.real();
      row["final_im_lambda"] = last.lambda.imag();
    }
    row["max_residual"] = run.max_residual;
    if (run.oracle_discrepancy >= 0.0) {
      row["oracle_discrepancy"] = run.oracle_discrepancy;
    }
    if (!run.oracle_error.empty()) row["oracle_error"] = run.oracle_error;
    out.push_back(std::move(row));
  }
  std::ofstream stream(dir / "summary.json", std::ios::binary);
  stream << out.dump(2) << '\n';
}

int cmd_crossings(const ModelOptions& model_opts, const CLI::App* cmd,
                  const ScanOptionsCli& scan, double delta_in) {
  std::shared_ptr<HamiltonianFamily> family;
  try {
    family = make_family(model_opts.merged(cmd));
  } catch (const std::exception& e) {
    return fail("build-model", e);
  }
  std::vector<CrossingMultiplet> multiplets;
  try {
    multiplets = detect_crossings(*family, delta_in, scan.to_options());
  } catch (const std::exception& e) {
    return fail("detect-crossings", e);
  }
  const fs::path dir = model_opts.resolve_out();
  fs::create_directories(dir);
  write_crossings_json(multiplets, (dir / "crossings.json").string());
  plot_crossing_diagram(*family, delta_in, scan.lambda_min, scan.lambda_max,
                        401, multiplets, (dir / "crossings.svg").string());
  std::cout << "multiplets: " << multiplets.size() << '\n';
  for (const auto& multiplet : multiplets) {
    std::cout << "  lambda_in=" << std::setprecision(12) << multiplet.lambda_in
              << "  multiplicity=" << multiplet.pairs.size() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exceptional-point trajectory toolkit"};
  app.require_subcommand(1);

  // ---- crossings ----
  auto* crossings_cmd =
      app.add_subcommand("crossings", "scan for Hermitian level crossings");
  ModelOptions crossings_model;
  ScanOptionsCli crossings_scan;
  double crossings_delta = 0.0;
  crossings_model.attach(crossings_cmd);
  crossings_scan.attach(crossings_cmd);
  crossings_cmd->add_option("--delta", crossings_delta, "delta of the scan");

  // ---- run ----
  auto* run_cmd = app.add_subcommand("run", "full pipeline: crossings, "
                                            "clusters, propagation, plots");
  ModelOptions run_model;
  ScanOptionsCli run_scan;
  run_model.attach(run_cmd);
  run_scan.attach(run_cmd);
  double start_delta = 0.0, end_delta = 1.0, tol = 0.0005;
  long grid = 100000, check_every = 1000;
  bool rk4 = false, fold_upper = false, skip_validate = false;
  std::string seed_ep;
  std::vector<double> checkpoints{0.25, 0.5, 0.75, 1.0};
  run_cmd->add_option("--start-delta", start_delta, "initial delta");
  run_cmd->add_option("--end-delta", end_delta, "final delta");
  run_cmd->add_option("--grid", grid, "number of propagation steps G");
  run_cmd->add_option("--tol", tol, "per-check residual tolerance");
  run_cmd->add_option("--check-every", check_every, "consistency cadence");
  run_cmd->add_flag("--rk4", rk4, "fourth-order one-step scheme");
  run_cmd->add_flag("--fold-upper", fold_upper,
                    "plot lambda paths folded into Im >= 0");
  run_cmd->add_flag("--skip-validate", skip_validate,
                    "skip the oracle validation stage");
  run_cmd->add_option("--seed-ep", seed_ep,
                      "complex lambda seed for a direct EP start, e.g. 0+2i");
  run_cmd->add_option("--checkpoints", checkpoints,
                      "delta checkpoints for oracle validation")
      ->expected(-1);

  // ---- sweep ----
  auto* sweep_cmd = app.add_subcommand("sweep", "dense spectra over a grid");
  ModelOptions sweep_model;
  sweep_model.attach(sweep_cmd);
  double sweep_lmin = 0.0, sweep_lmax = 1.0;
  int sweep_points = 201;
  std::vector<double> sweep_deltas{0.0, 0.5, 1.0};
  sweep_cmd->add_option("--lambda-min", sweep_lmin, "lambda grid lower edge");
  sweep_cmd->add_option("--lambda-max", sweep_lmax, "lambda grid upper edge");
  sweep_cmd->add_option("--points", sweep_points, "lambda grid points");
  sweep_cmd->add_option("--deltas", sweep_deltas, "delta panel values")
      ->expected(-1);

  // ---- validate ----
  auto* validate_cmd =
      app.add_subcommand("validate", "oracle check of a recorded trajectory");
  ModelOptions validate_model;
  validate_model.attach(validate_cmd);
  std::string validate_input;
  std::vector<double> validate_checkpoints{0.25, 0.5, 0.75, 1.0};
  validate_cmd->add_option("--input", validate_input, "trajectory JSONL file")
      ->required();
  validate_cmd
      ->add_option("--checkpoints", validate_checkpoints, "delta checkpoints")
      ->expected(-1);

  // ---- report ----
  auto* report_cmd =
      app.add_subcommand("report", "human-readable summary of a run directory");
  std::string report_dir;
  report_cmd->add_option("dir", report_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (crossings_cmd->parsed()) {
    return cmd_crossings(crossings_model, crossings_cmd, crossings_scan,
                         crossings_delta);
  }

  if (sweep_cmd->parsed()) {
    std::shared_ptr<HamiltonianFamily> family;
    try {
      family = make_family(sweep_model.merged(sweep_cmd));
    } catch (const std::exception& e) {
      return fail("build-model", e);
    }
    std::vector<double> lambdas(sweep_points);
    for (int k = 0; k < sweep_points; ++k) {
      lambdas[k] =
          sweep_lmin + (sweep_lmax - sweep_lmin) * k / (sweep_points - 1);
    }
    const SpectrumSweep sweep = sweep_spectrum(*family, lambdas, sweep_deltas);
    const fs::path dir = sweep_model.resolve_out();
    fs::create_directories(dir);
    write_sweep_csv(sweep, (dir / "sweep.csv").string());
    plot_sweep_panels(sweep, (dir / "sweep.svg").string());
    std::cout << "wrote " << (dir / "sweep.csv").string() << '\n';
    return 0;
  }

  if (validate_cmd->parsed()) {
    std::shared_ptr<HamiltonianFamily> family;
    try {
      family = make_family(validate_model.merged(validate_cmd));
    } catch (const std::exception& e) {
      return fail("build-model", e);
    }
    try {
      const TrajectoryRecord record = read_trajectory_jsonl(validate_input);
      const auto points =
          validate_trajectory(record, *family, validate_checkpoints);
      const fs::path dir = validate_model.resolve_out();
      fs::create_directories(dir);
      write_validation_json(points, (dir / "validation.json").string());
      double max_disc = 0.0;
      for (const auto& p : points) max_disc = std::max(max_disc, p.discrepancy);
      std::cout << "max discrepancy: " << max_disc << '\n';
    } catch (const std::exception& e) {
      return fail("validate", e);
    }
    return 0;
  }

  if (report_cmd->parsed()) {
    const fs::path summary_path = fs::path(report_dir) / "summary.json";
    std::ifstream in(summary_path);
    if (!in) {
      std::cerr << "missing " << summary_path.string() << '\n';
      return 1;
    }
    const json summary = json::parse(in);
    std::cout << std::left << std::setw(10) << "cluster" << std::setw(14)
              << "lambda_in" << std::setw(4) << "M" << std::setw(26)
              << "final lambda" << std::setw(13) << "max_resid"
              << std::setw(13) << "oracle" << "status\n";
    for (const auto& row : summary) {
      std::ostringstream final_lambda;
      if (row.contains("final_re_lambda")) {
        final_lambda << std::setprecision(6)
                     << row["final_re_lambda"].get<double>() << std::showpos
                     << row["final_im_lambda"].get<double>() << "i";
      }
      std::ostringstream status;
      status << row.value("status", "?");
      if (row.value("status", "") != "completed") {
        status << " (halt at delta=" << row.value("halt_delta", 0.0) << ")";
      }
      std::cout << std::left << std::setw(10)
                << row.value("label", std::string("?")) << std::setw(14)
                << std::setprecision(8) << row.value("lambda_in", 0.0)
                << std::setw(4) << row.value("multiplicity", 0) << std::setw(26)
                << final_lambda.str() << std::setw(13)
                << row.value("max_residual", 0.0) << std::setw(13)
                << (row.contains("oracle_discrepancy")
                        ? std::to_string(row["oracle_discrepancy"].get<double>())
                        : std::string("-"))
                << status.str() << '\n';
    }
    return 0;
  }

  // ---- run ----
  std::shared_ptr<HamiltonianFamily> family;
  try {
    family = make_family(run_model.merged(run_cmd));
  } catch (const std::exception& e) {
    return fail("build-model", e);
  }
  const fs::path dir = run_model.resolve_out();
  fs::create_directories(dir);

  PropagationOptions prop;
  prop.delta_end = end_delta;
  prop.grid = grid;
  prop.tolerance = tol;
  prop.sample_every = check_every;
  prop.integrator = rk4 ? Integrator::Rk4 : Integrator::Euler;

  std::vector<ClusterRun> runs;
  try {
    if (!seed_ep.empty()) {
      const Complex seed = parse_complex(seed_ep);
      ClusterRun run;
      run.label = "seed";
      run.multiplicity = 1;
      const EpState state = ep_state_from_seed(*family, start_delta, seed);
      run.lambda_in = state.lambda.real();
      run.record = propagate(state, *family, prop);
      runs.push_back(std::move(run));
    } else {
      ScanOptionsCli scan = run_scan;
      std::vector<CrossingMultiplet> multiplets =
          detect_crossings(*family, start_delta, scan.to_options());
      write_crossings_json(multiplets, (dir / "crossings.json").string());
      plot_crossing_diagram(*family, start_delta, scan.lambda_min,
                            scan.lambda_max, 401, multiplets,
                            (dir / "crossings.svg").string());
      ResolveOptions resolve;
      resolve.step_size = std::copysign(resolve.step_size,
                                        end_delta - start_delta);
      const double span = std::abs(end_delta - start_delta);
      if (resolve.trial_steps * std::abs(resolve.step_size) > span) {
        resolve.step_size = std::copysign(span / resolve.trial_steps,
                                          end_delta - start_delta);
      }
      resolve.tolerance = tol;
      for (size_t mi = 0; mi < multiplets.size(); ++mi) {
        const auto clusters =
            resolve_clusters_and_signs(multiplets[mi], *family, resolve);
        for (size_t ci = 0; ci < clusters.size(); ++ci) {
          ClusterRun run;
          run.label = "m" + std::to_string(mi) + "_c" + std::to_string(ci);
          run.lambda_in = multiplets[mi].lambda_in;
          run.multiplicity =
              static_cast<int>(clusters[ci].hypothesis.member_pairs.size());
          run.signs = clusters[ci].hypothesis.signs;
          run.record = propagate(clusters[ci].state, *family, prop);
          runs.push_back(std::move(run));
        }
      }
    }
  } catch (const std::exception& e) {
    return fail("propagate", e);
  }

  try {
    for (auto& run : runs) {
      const fs::path base = dir / ("cluster_" + run.label);
      write_trajectory_jsonl(run.record, base.string() + ".jsonl");
      write_trajectory_csv(run.record, base.string() + ".csv");
      write_record_meta(run.record, base.string() + ".jsonl.meta.json");
      for (const auto& sample : run.record.samples) {
        run.max_residual = std::max(run.max_residual, sample.residuals.max());
      }
    }
  } catch (const std::exception& e) {
    return fail("write-artifacts", e);
  }

  if (!skip_validate) {
    for (auto& run : runs) {
      if (run.record.samples.size() < 2) continue;
      const double lo = std::min(run.record.samples.front().delta,
                                 run.record.samples.back().delta);
      const double hi = std::max(run.record.samples.front().delta,
                                 run.record.samples.back().delta);
      std::vector<double> in_range;
      for (double c : checkpoints) {
        if (c >= lo && c <= hi) in_range.push_back(c);
      }
      if (in_range.empty()) continue;
      try {
        const auto points = validate_trajectory(run.record, *family, in_range);
        run.oracle_discrepancy = 0.0;
        for (const auto& p : points) {
          run.oracle_discrepancy = std::max(run.oracle_discrepancy,
                                            p.discrepancy);
        }
        write_validation_json(
            points, (dir / ("validation_" + run.label + ".json")).string());
      } catch (const std::exception& e) {
        run.oracle_error = e.what();
      }
    }
  }

  try {
    std::vector<TrajectoryRecord> records;
    std::vector<int> sizes;
    for (const auto& run : runs) {
      records.push_back(run.record);
      sizes.push_back(run.multiplicity);
    }
    plot_lambda_plane(records, sizes, fold_upper,
                      (dir / "lambda_plane.svg").string());
    plot_energy_plane(records, (dir / "energy_plane.svg").string());

    std::vector<double> lambdas(201);
    for (int k = 0; k < 201; ++k) {
      lambdas[k] = run_scan.lambda_min +
                   (run_scan.lambda_max - run_scan.lambda_min) * k / 200.0;
    }
    const std::vector<double> panel_deltas{start_delta,
                                           0.5 * (start_delta + end_delta),
                                           end_delta};
    const SpectrumSweep sweep = sweep_spectrum(*family, lambdas, panel_deltas);
    write_sweep_csv(sweep, (dir / "sweep.csv").string());
    plot_sweep_panels(sweep, (dir / "sweep.svg").string());
    write_summary(runs, dir);
  } catch (const std::exception& e) {
    return fail("plots", e);
  }

  int exit_code = 0;
  for (const auto& run : runs) {
    std::cout << run.label << ": " << to_string(run.record.status)
              << ", max residual " << run.max_residual;
    if (run.oracle_discrepancy >= 0.0) {
      std::cout << ", oracle discrepancy " << run.oracle_discrepancy;
    }
    std::cout << '\n';
    if (run.record.status != RunStatus::Completed) exit_code = 1;
  }
  return exit_code;
}
