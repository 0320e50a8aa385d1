#pragma once

#include <vector>

#include "flapsim/loadcell.hpp"
#include "flapsim/simulator.hpp"

namespace flapsim {

// Outcome of holding a simulated force record against a load-cell trace.
// Lift pairs with the load-cell x channel, drag with z. Both series are
// rebased to their own start time, resampled to a common grid, and the
// measurement is shifted by the lag that best correlates the lift channels
// before the residuals are taken.
struct ComparisonReport {
    double rms_lift = 0.0;            // N, after alignment
    double rms_drag = 0.0;            // N, same lag as the lift alignment
    double detected_frequency = 0.0;  // Hz, from the measured trace
    double alignment_offset = 0.0;    // s; positive = measurement lags the sim
    double overlap = 0.0;             // s of data compared
    double grid_dt = 0.0;             // s, common resampling step

    // Cycle-averaged force curves over one flap period, 64 phase bins.
    std::vector<double> cycle_phase;  // bin centers, fraction of a period
    std::vector<double> sim_lift_cycle;
    std::vector<double> meas_lift_cycle;
    std::vector<double> sim_drag_cycle;
    std::vector<double> meas_drag_cycle;
};

// Lag (in seconds, multiples of dt) that maximizes the Pearson correlation
// of b against a; positive means b lags a. Ties prefer the smallest |lag|.
double alignment_lag(const std::vector<double>& a, const std::vector<double>& b,
                     double dt, int max_lag);

// Throws InsufficientOverlapError when the shorter series covers less than
// two flap periods, ConfigError when flap_frequency is not positive.
ComparisonReport compare(const ForceRecord& rec, const LoadCellTrace& trace,
                         double flap_frequency);

}  // namespace flapsim
