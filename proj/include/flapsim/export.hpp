#pragma once

#include <string>

#include "flapsim/compare.hpp"
#include "flapsim/simulator.hpp"
#include "flapsim/wake.hpp"

namespace flapsim {

// Shortest decimal that parses back to exactly the same double. All exports
// use it, so identical inputs give byte-identical files and a re-ingested
// file reproduces the original values.
std::string format_number(double v);

// Force history in the load-cell CSV schema: lift on the x channel, side
// force on y, drag on z, matching torque axes in N mm. A trace ingested
// from this text compares against its own record with zero residual.
std::string record_csv(const ForceRecord& rec, double airspeed,
                       double flap_frequency);

// Circulation snapshots, one row per station per stored time.
std::string snapshots_csv(const ForceRecord& rec);

// Sampled wake plane with a self-describing metadata header; one row per
// grid node, n1*n2 rows in row-major order (i2 outer, i1 inner).
std::string wake_grid_csv(const WakeGrid& grid, double t);

// Comparison summary as labelled key: value lines plus the cycle curves.
std::string report_text(const std::string& label, const ComparisonReport& rep);

void write_file(const std::string& path, const std::string& content);

}  // namespace flapsim
