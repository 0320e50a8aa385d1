#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace flapsim {

// Six-axis load-cell recording. Forces in N, torques in N mm, time in s and
// strictly increasing. The x channel carries lift, z carries drag.
struct LoadCellTrace {
    std::vector<double> t;
    Eigen::MatrixX3d force;   // N
    Eigen::MatrixX3d torque;  // N mm
    int dropped_rows = 0;     // rows discarded for non-finite fields

    double airspeed = 0.0;           // m/s, file metadata
    double nominal_frequency = 0.0;  // Hz, file metadata

    bool flapping = false;
    double detected_frequency = 0.0;  // Hz; 0 when the trace is not flapping

    int size() const { return static_cast<int>(t.size()); }
};

// CSV ingest. Expects optional "# key value" metadata lines, then the exact
// header t_s,fx_N,fy_N,fz_N,tx_Nmm,ty_Nmm,tz_Nmm. Rows containing
// non-finite values are dropped and counted. Throws FormatError on a bad
// header, malformed row, empty or non-monotonic data, and GapError when a
// time gap exceeds five times the median sample interval. A positive
// lowpass_hz applies a zero-phase low-pass before frequency detection.
LoadCellTrace ingest_loadcell_text(const std::string& text, double lowpass_hz = 0.0);
LoadCellTrace ingest_loadcell(const std::string& path, double lowpass_hz = 0.0);

// Dominant oscillation frequency of a series sampled at times t, by windowed
// spectral scan with local refinement. Returns 0 when the series carries no
// clear periodic component (sets *flapping accordingly when non-null).
double detect_frequency(const std::vector<double>& t, const Eigen::VectorXd& x,
                        bool* flapping = nullptr);

}  // namespace flapsim
