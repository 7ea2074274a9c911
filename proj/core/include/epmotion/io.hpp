#ifndef EPMOTION_IO_HPP
#define EPMOTION_IO_HPP

#include <string>
#include <vector>

#include "epmotion/eom.hpp"
#include "epmotion/ics.hpp"
#include "epmotion/oracle.hpp"

namespace epmotion {

struct IoError : Error {
  using Error::Error;
};

/// One sample per line: delta, lambda, EP/ordinary energies (re/im split) and
/// the residual fields.  Deterministic 17-digit formatting.
void write_trajectory_jsonl(const TrajectoryRecord& record,
                            const std::string& path);
void write_trajectory_csv(const TrajectoryRecord& record,
                          const std::string& path);

/// Run status, halt point and message for one record.
void write_record_meta(const TrajectoryRecord& record, const std::string& path);

/// Reads samples back; status/halt fields come from the side-car meta file
/// when present, else default to Completed.
TrajectoryRecord read_trajectory_jsonl(const std::string& path);

void write_crossings_json(const std::vector<CrossingMultiplet>& multiplets,
                          const std::string& path);

/// Rows: lambda, delta, k, re_E, im_E.
void write_sweep_csv(const SpectrumSweep& sweep, const std::string& path);

void write_validation_json(const std::vector<ValidationPoint>& points,
                           const std::string& path);
std::vector<ValidationPoint> read_validation_json(const std::string& path);

/// 17-significant-digit decimal form, stable across runs on one platform.
std::string format_double(double x);

}  // namespace epmotion

#endif
