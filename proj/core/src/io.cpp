#include "epmotion/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace epmotion {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

void append_reim(std::ostringstream& line, const CVector& v,
                 const char* prefix, bool json_style) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (json_style) {
      line << ",\"re_" << prefix << k << "\":" << format_double(v[k].real())
           << ",\"im_" << prefix << k << "\":" << format_double(v[k].imag());
    } else {
      line << ',' << format_double(v[k].real()) << ','
           << format_double(v[k].imag());
    }
  }
}

std::string sample_line(const TrajectorySample& s, bool json_style) {
  std::ostringstream line;
  if (json_style) {
    line << "{\"delta\":" << format_double(s.delta)
         << ",\"re_lambda\":" << format_double(s.lambda.real())
         << ",\"im_lambda\":" << format_double(s.lambda.imag());
  } else {
    line << format_double(s.delta) << ',' << format_double(s.lambda.real())
         << ',' << format_double(s.lambda.imag());
  }
  append_reim(line, s.ep_energies, "ep_", json_style);
  append_reim(line, s.ordinary_energies, "ord_", json_style);
  if (json_style) {
    line << ",\"res_eigen\":" << format_double(s.residuals.max_eigen_residual)
         << ",\"res_orth\":"
         << format_double(s.residuals.max_orthonormality_residual)
         << ",\"res_closure\":"
         << format_double(s.residuals.max_closure_residual)
         << ",\"ldot_spread\":" << format_double(s.residuals.lambda_dot_spread)
         << "}";
  } else {
    line << ',' << format_double(s.residuals.max_eigen_residual) << ','
         << format_double(s.residuals.max_orthonormality_residual) << ','
         << format_double(s.residuals.max_closure_residual) << ','
         << format_double(s.residuals.lambda_dot_spread);
  }
  return line.str();
}

}  // namespace

std::string format_double(double x) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return out.str();
}

void write_trajectory_jsonl(const TrajectoryRecord& record,
                            const std::string& path) {
  std::ofstream out = open_out(path);
  for (const auto& sample : record.samples) {
    out << sample_line(sample, /*json_style=*/true) << '\n';
  }
}

void write_trajectory_csv(const TrajectoryRecord& record,
                          const std::string& path) {
  std::ofstream out = open_out(path);
  out << "delta,re_lambda,im_lambda";
  if (!record.samples.empty()) {
    const auto& first = record.samples.front();
    for (Eigen::Index k = 0; k < first.ep_energies.size(); ++k) {
      out << ",re_ep_" << k << ",im_ep_" << k;
    }
    for (Eigen::Index k = 0; k < first.ordinary_energies.size(); ++k) {
      out << ",re_ord_" << k << ",im_ord_" << k;
    }
  }
  out << ",res_eigen,res_orth,res_closure,ldot_spread\n";
  for (const auto& sample : record.samples) {
    out << sample_line(sample, /*json_style=*/false) << '\n';
  }
}

void write_record_meta(const TrajectoryRecord& record,
                       const std::string& path) {
  json meta;
  meta["status"] = to_string(record.status);
  meta["halt_delta"] = record.halt_delta;
  meta["halt_message"] = record.halt_message;
  meta["samples"] = record.samples.size();
  if (!record.samples.empty()) {
    meta["final_delta"] = record.samples.back().delta;
    meta["final_re_lambda"] = record.samples.back().lambda.real();
    meta["final_im_lambda"] = record.samples.back().lambda.imag();
  }
  open_out(path) << meta.dump(2) << '\n';
}

TrajectoryRecord read_trajectory_jsonl(const std::string& path) {
  std::ifstream in = open_in(path);
  TrajectoryRecord record;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json row = json::parse(line);
    TrajectorySample sample;
    sample.delta = row.at("delta").get<double>();
    sample.lambda = Complex(row.at("re_lambda").get<double>(),
                            row.at("im_lambda").get<double>());
    std::vector<Complex> ep, ord;
    for (int k = 0; row.contains("re_ep_" + std::to_string(k)); ++k) {
      ep.emplace_back(row["re_ep_" + std::to_string(k)].get<double>(),
                      row["im_ep_" + std::to_string(k)].get<double>());
    }
    for (int k = 0; row.contains("re_ord_" + std::to_string(k)); ++k) {
      ord.emplace_back(row["re_ord_" + std::to_string(k)].get<double>(),
                       row["im_ord_" + std::to_string(k)].get<double>());
    }
    sample.ep_energies =
        Eigen::Map<CVector>(ep.data(), static_cast<Eigen::Index>(ep.size()));
    sample.ordinary_energies =
        Eigen::Map<CVector>(ord.data(), static_cast<Eigen::Index>(ord.size()));
    sample.residuals.max_eigen_residual = row.value("res_eigen", 0.0);
    sample.residuals.max_orthonormality_residual = row.value("res_orth", 0.0);
    sample.residuals.max_closure_residual = row.value("res_closure", 0.0);
    sample.residuals.lambda_dot_spread = row.value("ldot_spread", 0.0);
    record.samples.push_back(std::move(sample));
  }

  const std::string meta_path = path + ".meta.json";
  std::ifstream meta_in(meta_path, std::ios::binary);
  if (meta_in) {
    json meta = json::parse(meta_in);
    const std::string status = meta.value("status", "completed");
    if (status == "tolerance_breach") {
      record.status = RunStatus::ToleranceBreach;
    } else if (status == "near_collision") {
      record.status = RunStatus::NearCollision;
    } else if (status == "singular_denominator") {
      record.status = RunStatus::SingularDenominator;
    } else {
      record.status = RunStatus::Completed;
    }
    record.halt_delta = meta.value("halt_delta", 0.0);
    record.halt_message = meta.value("halt_message", std::string());
  }
  return record;
}

void write_crossings_json(const std::vector<CrossingMultiplet>& multiplets,
                          const std::string& path) {
  json out = json::array();
  for (const auto& multiplet : multiplets) {
    json entry;
    entry["lambda_in"] = multiplet.lambda_in;
    entry["delta_in"] = multiplet.delta_in;
    entry["multiplicity"] = multiplet.pairs.size();
    json pairs = json::array();
    for (const auto& pair : multiplet.pairs) {
      json p;
      p["level_a"] = pair.level_a;
      p["level_b"] = pair.level_b;
      p["energy"] = pair.energy;
      p["slope_a"] = pair.slope_a;
      p["slope_b"] = pair.slope_b;
      pairs.push_back(std::move(p));
    }
    entry["pairs"] = std::move(pairs);
    out.push_back(std::move(entry));
  }
  open_out(path) << out.dump(2) << '\n';
}

void write_sweep_csv(const SpectrumSweep& sweep, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "lambda,delta,k,re_E,im_E\n";
  for (size_t d = 0; d < sweep.delta_values.size(); ++d) {
    for (size_t l = 0; l < sweep.lambda_values.size(); ++l) {
      const CVector& eigs = sweep.energies[d][l];
      for (Eigen::Index k = 0; k < eigs.size(); ++k) {
        out << format_double(sweep.lambda_values[l]) << ','
            << format_double(sweep.delta_values[d]) << ',' << k << ','
            << format_double(eigs[k].real()) << ','
            << format_double(eigs[k].imag()) << '\n';
      }
    }
  }
}

void write_validation_json(const std::vector<ValidationPoint>& points,
                           const std::string& path) {
  json out = json::array();
  for (const auto& point : points) {
    json p;
    p["delta"] = point.delta;
    p["re_lambda_record"] = point.lambda_record.real();
    p["im_lambda_record"] = point.lambda_record.imag();
    p["re_lambda_oracle"] = point.lambda_oracle.real();
    p["im_lambda_oracle"] = point.lambda_oracle.imag();
    p["discrepancy"] = point.discrepancy;
    p["condition"] = point.condition;
    out.push_back(std::move(p));
  }
  open_out(path) << out.dump(2) << '\n';
}

std::vector<ValidationPoint> read_validation_json(const std::string& path) {
  json in = json::parse(open_in(path));
  std::vector<ValidationPoint> points;
  for (const auto& p : in) {
    ValidationPoint point;
    point.delta = p.at("delta").get<double>();
    point.lambda_record = Complex(p.at("re_lambda_record").get<double>(),
                                  p.at("im_lambda_record").get<double>());
    point.lambda_oracle = Complex(p.at("re_lambda_oracle").get<double>(),
                                  p.at("im_lambda_oracle").get<double>());
    point.discrepancy = p.at("discrepancy").get<double>();
    point.condition = p.at("condition").get<double>();
    points.push_back(point);
  }
  return points;
}

}  // namespace epmotion
