#pragma once

#include <vector>

#include <Eigen/Dense>

#include "flapsim/planform.hpp"

namespace flapsim {

// Empirical flat-plate coefficient fits; angles in the formulas are degrees.
struct DickinsonCoeffs {
    double cl0 = 0.225, cl_amp = 1.58, cl_freq = 2.13, cl_phase = 7.2;
    double cd0 = 1.92, cd_amp = 1.55, cd_freq = 2.04, cd_phase = 9.82;

    void validate() const;  // throws ConfigError
};

// alpha in radians; C_L = cl0 + cl_amp sin(cl_freq a_deg - cl_phase), and
// C_D = cd0 - cd_amp cos(cd_freq a_deg - cd_phase).
double dickinson_cl(double alpha, const DickinsonCoeffs& c = {});
double dickinson_cd(double alpha, const DickinsonCoeffs& c = {});

// f = q c ds (C_L lift_hat + C_D drag_hat), q = 1/2 rho speed^2. Inertial N.
Eigen::Vector3d element_force(const BladeElement& el, double rho, double cl,
                              double cd);

// Virtual-work map of an element force into generalized coordinates. The
// translational rows carry f itself, so totals sum exactly.
Vector8d generalized_force(const BladeElement& el, const Eigen::Vector3d& f);

struct AeroTotals {
    Vector8d u = Vector8d::Zero();                      // generalized force
    Eigen::Vector3d force = Eigen::Vector3d::Zero();    // inertial, N
    Eigen::Vector3d moment = Eigen::Vector3d::Zero();   // about ref, N m
};

// Sums quasi-steady element forces in element (index) order. moment is taken
// about `about` (normally the body COM), in the inertial frame.
AeroTotals quasisteady_forces(const std::vector<BladeElement>& els, double rho,
                              const Eigen::Vector3d& about,
                              const DickinsonCoeffs& c = {});

}  // namespace flapsim
