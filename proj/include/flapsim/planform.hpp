#pragma once

#include <vector>

#include <Eigen/Dense>

#include "flapsim/body.hpp"

namespace flapsim {

// Trapezoidal chord per wing segment; chords extend toward -x from the
// leading edge (the segment axis).
struct Planform {
    double proximal_root_chord = 0.035;  // m, at the shoulder
    double proximal_tip_chord = 0.030;   // m, at the elbow
    double distal_root_chord = 0.030;    // m, at the elbow
    double distal_tip_chord = 0.012;     // m, at the wing tip

    void validate() const;  // throws ConfigError
};

// Chord at arc position along one segment's leading edge.
double chord_at(const Planform& pf, const WingLayout& w, bool distal,
                double arc);

// One spanwise strip with its local flow. Frames are inertial unit vectors:
// chord_hat points leading edge -> trailing edge, normal_hat out of the top
// surface, lift_hat/drag_hat per the in-plane relative wind.
struct BladeElement {
    int side;          // +1 left, -1 right
    bool distal;
    bool on_body;      // carry-through strip under the body, no flapping
    double arc;        // strip center along the leading edge, m
    double chord;      // m
    double ds;         // flattened span width, m
    double y_flat;     // signed flattened span position, body frame, m

    Eigen::Vector3d p;          // quarter-chord point, inertial
    Eigen::Vector3d chord_hat, normal_hat, span_hat;
    Eigen::Vector2d v_plane;    // relative wind (chordwise, normal), m/s
    double speed;               // |v_plane|
    double alpha;               // rad, positive = flow hits the underside
    double u_eff;               // lag-time airspeed scale, m/s
    Eigen::Vector3d lift_hat, drag_hat;
    Matrix38 J;                 // quarter-chord velocity map
    Eigen::Vector3d p_te;       // trailing-edge point, inertial (wake origin)
};

// Flattened wing semispan (wing surface only): proximal length plus the
// fold-projected distal length.
double wing_semispan_flat(const WingLayout& w, double qe);

// Per-segment uniform tiling of both wings, n elements per segment per side.
// freestream = air velocity in the inertial frame.
std::vector<BladeElement> discretize_wing(const BodyState& s,
                                          const WingLayout& w,
                                          const Planform& pf,
                                          const Eigen::Vector3d& freestream,
                                          int n_per_segment,
                                          double u_floor = 0.05);

// Full-span cosine-spaced stations for the lifting-line model, tips to tips
// including the body carry-through strip. theta_k = k pi / (m+1); outermost
// cells extend to the tips so the strips tile the whole span.
struct SpanStations {
    double span;                  // full flattened wingspan S, m
    double root_chord;            // c0 at the symmetry axis, m
    std::vector<double> theta;    // m collocation angles, increasing
    std::vector<BladeElement> el; // m elements, y decreasing (left tip first)
};

SpanStations discretize_span(const BodyState& s, const WingLayout& w,
                             const Planform& pf,
                             const Eigen::Vector3d& freestream, int m,
                             double u_floor = 0.05);

}  // namespace flapsim
