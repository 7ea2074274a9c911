#ifndef EPMOTION_SVG_HPP
#define EPMOTION_SVG_HPP

#include <string>
#include <vector>

#include "epmotion/eom.hpp"
#include "epmotion/ics.hpp"
#include "epmotion/oracle.hpp"

namespace epmotion {

/// Real parts of the spectrum against lambda, one panel per delta value;
/// eigenvalue lines joined by nearest-neighbor matching between grid points.
void plot_sweep_panels(const SpectrumSweep& sweep, const std::string& path);

/// Hermitian eigenvalue lines at delta_in over [lambda_min, lambda_max] with
/// one marker per crossing multiplet, styled by multiplicity.
void plot_crossing_diagram(const HamiltonianFamily& family, double delta_in,
                           double lambda_min, double lambda_max, int points,
                           const std::vector<CrossingMultiplet>& multiplets,
                           const std::string& path);

/// EP paths in the complex lambda plane, one polyline per record; styling
/// keyed to the cluster size of each record.  fold_upper reflects every point
/// into Im(lambda) >= 0 before plotting.
void plot_lambda_plane(const std::vector<TrajectoryRecord>& records,
                       const std::vector<int>& cluster_sizes, bool fold_upper,
                       const std::string& path);

/// EP energies in the complex plane, one polyline per EP of each record.
void plot_energy_plane(const std::vector<TrajectoryRecord>& records,
                       const std::string& path);

}  // namespace epmotion

#endif
