#pragma once

#include <array>

#include <Eigen/Dense>

namespace flapsim {

using JointVec = Eigen::Matrix<double, 7, 1>;

// Index of each free joint angle inside JointVec. Joints 4, 7 and 10 close the
// three kinematic loops and carry no angle of their own.
enum JointIndex : int { kQ1 = 0, kQ2, kQ3, kQ5, kQ6, kQ8, kQ9 };

// Planar wing-drive linkage: seven moving links, ten revolute joints, one
// motor DOF at joint 1. The linkage plane is the body y-z plane; +y points
// outboard on the left side, +z up. Angles are absolute in that plane.
//
// Chains (e(a) = (cos a, sin a)):
//   p2  = p1 + crank_arm        * e(q1)
//   p3  = p1 + crank_arm2       * e(q1 + crank_arm2_phase)
//   p4  = p2 + coupler_a        * e(q2)   =  p5 + shoulder_arm * e(q5 + shoulder_arm_phase)
//   p7  = p3 + coupler_b        * e(q3)   =  p8 + rocker_arm   * e(q8 + rocker_arm_phase)
//   p6  = p5 + shoulder_to_elbow* e(q5)
//   p9  = p6 + elbow_lever      * e(q6 + elbow_lever_phase)
//   p10 = p9 + elbow_link       * e(q9)   =  p8 + rocker_arm2  * e(q8)
//
// q5 is the proximal wing (shoulder) direction, q6 the distal wing direction;
// the elbow fold angle is q6 - q5.
struct LinkageConfig {
    Eigen::Vector2d p1{0.0, 0.0};
    Eigen::Vector2d p5{0.027512, 0.011279};
    Eigen::Vector2d p8{0.030873, -0.000901};

    double crank_arm = 0.007244;
    double crank_arm2 = 0.007284;
    double crank_arm2_phase = 1.1042558551027963;   // rad (63.2692 deg)
    double coupler_a = 0.031619;
    double shoulder_arm = 0.017810;
    double shoulder_arm_phase = 2.0900213072876976; // rad (119.7494 deg)
    double coupler_b = 0.028051;
    double rocker_arm = 0.020264;
    double rocker_arm_phase = 0.6153036104858369;   // rad (35.2543 deg)
    double shoulder_to_elbow = 0.060;
    double elbow_lever = 0.011732;
    double elbow_lever_phase = -1.3012843290311842; // rad (-74.5581 deg)
    double rocker_arm2 = 0.013502;
    double elbow_link = 0.053673;

    // Assembly branch reference (angles at q1 = 0 for the default geometry).
    JointVec reference_q{
        (JointVec() << 0.0, 1.0956730318480454, 0.4695376606620325,
         -0.1872810410482257, -0.3205518245069574, 1.0832287615505696,
         2.7062160073881976)
            .finished()};

    double assembly_tol = 1e-6;     // m, forward-kinematics closure check
    double projection_tol = 1e-9;   // m, drift threshold triggering projection
    double singular_cond = 1e12;

    void validate() const;  // throws ConfigError
};

struct LinkageState {
    JointVec q;
    JointVec dq;
};

struct JointPositions {
    std::array<Eigen::Vector2d, 10> p;  // p[i] = joint i+1
    double closure_residual;            // max loop gap, m
};

struct JointAccelerations {
    JointVec ddq;
    double condition;  // of the 7x7 constraint system
};

// Shoulder/elbow trajectory handed to the body dynamics: angles, rates and
// the accelerations that act as the constraint right-hand side.
struct GaitSample {
    double qs, qe;
    double dqs, dqe;
    double ddqs, ddqe;
};

// Joint positions from the chain definitions. Throws AssemblyError when a
// loop gap exceeds cfg.assembly_tol.
JointPositions forward_kinematics(const LinkageConfig& cfg, const JointVec& q);

// Dependent angles for a given crank angle by direct circle intersection,
// branch chosen nearest to `guess`. Throws AssemblyError if a loop cannot
// close.
JointVec assemble(const LinkageConfig& cfg, double q1, const JointVec& guess);

// Loop-closure residual g(q) (3 loops x 2 components) and its Jacobian.
Eigen::Matrix<double, 6, 1> constraint_residual(const LinkageConfig& cfg,
                                                const JointVec& q);
Eigen::Matrix<double, 6, 7> constraint_jacobian(const LinkageConfig& cfg,
                                                const JointVec& q);

// Differentiated loop closure plus the motor row ddq1 = u_k, solved for all
// seven joint accelerations. Throws SingularLinkageError at dead points.
JointAccelerations solve_joint_accelerations(const LinkageConfig& cfg,
                                             const JointVec& q,
                                             const JointVec& dq, double u_k);

// Newton correction of the dependent angles onto the closure manifold (crank
// angle untouched), then velocity projection onto its tangent.
void project_positions(const LinkageConfig& cfg, JointVec& q);
void project_velocities(const LinkageConfig& cfg, const JointVec& q,
                        JointVec& dq);

// One RK4 step of (q, dq) under constant motor acceleration u_k, with
// drift projection whenever the closure residual passes cfg.projection_tol.
LinkageState step_kinematics(const LinkageConfig& cfg, const LinkageState& s,
                             double u_k, double dt);

// Shoulder = q5, elbow fold = q6 - q5, accelerations from the constraint
// solve at (q, dq, u_k).
GaitSample gait_sample(const LinkageConfig& cfg, const JointVec& q,
                       const JointVec& dq, double u_k);

}  // namespace flapsim
