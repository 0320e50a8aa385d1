#pragma once

#include <vector>

#include <Eigen/Dense>

#include "flapsim/simulator.hpp"

namespace flapsim {

// One straight vortex filament, directed a -> b. Negative strength is the
// same filament with reversed orientation.
struct WakeFilament {
    Eigen::Vector3d a, b;
    double gamma;  // m^2/s
};

// Frozen lattice of the shed vorticity. Streamwise columns carry the
// circulation change across the span at shed time, spanwise rows the change
// over time, so circulation is conserved at every interior lattice node.
struct WakeSheet {
    std::vector<WakeFilament> filaments;
    int rows = 0;   // shed snapshots used
    int edges = 0;  // spanwise cell edges (stations + 1)
    bool degenerate_convection = false;  // hover fallback engaged
};

// Builds the lattice as seen at time t_now: trailing-edge cell edges convect
// with the freestream from their shed times. Zero-strength filaments are
// dropped. At zero airspeed the convection falls back to the mean
// trailing-edge drift of the run and the sheet is flagged degenerate.
// Throws EmptyHistoryError when the record holds fewer than two snapshots.
WakeSheet shed_wake(const ForceRecord& rec, const SimConfig& cfg,
                    double t_now);

// Induced velocity of one finite segment. Inside the Rankine core radius the
// magnitude scales by (d/core)^2; collinear evaluation points see zero.
Eigen::Vector3d biot_savart_segment(const Eigen::Vector3d& p,
                                    const WakeFilament& f, double core);

struct PlaneSpec {
    Eigen::Vector3d origin;                    // node (0, 0)
    Eigen::Vector3d e1, e2;                    // unit, orthogonal
    int n1 = 41, n2 = 21;                      // nodes along e1, e2
    double d1 = 0.01, d2 = 0.01;               // node spacing, m
    void validate() const;                     // throws ConfigError
};

// Velocities and the in-plane curl (about e1 x e2) on a regular grid.
// Row-major storage: index = i2 * n1 + i1.
struct WakeGrid {
    PlaneSpec plane;
    std::vector<Eigen::Vector3d> vel;
    std::vector<double> curl;  // central differences, one-sided at borders
};

// Sums every filament at every node with a smoothing core of a quarter of
// the finer node spacing.
WakeGrid sample_plane(const WakeSheet& sheet, const PlaneSpec& plane);

// Transverse cut through the wake, `offset` metres downstream of the
// trailing edge (default one mean chord), spanning the wake width.
PlaneSpec default_plane(const SimConfig& cfg, double offset = -1.0);

}  // namespace flapsim
