#pragma once

#include <Eigen/Dense>

namespace flapsim {

using Vector8d = Eigen::Matrix<double, 8, 1>;
using Matrix8d = Eigen::Matrix<double, 8, 8>;
using Matrix38 = Eigen::Matrix<double, 3, 8>;

// Generalized velocity/acceleration ordering:
//   [0:3) body COM translation, [3] shoulder, [4] elbow, [5:8) body angular
//   velocity (body frame).
enum DofIndex : int { kVx = 0, kVy, kVz, kQs, kQe, kWx, kWy, kWz };

struct BodyState {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();   // COM, inertial
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();  // body -> inertial
    Eigen::Vector3d v = Eigen::Vector3d::Zero();   // COM velocity, inertial
    Eigen::Vector3d w = Eigen::Vector3d::Zero();   // angular velocity, body
    double qs = 0.0, qe = 0.0;                     // shoulder, elbow fold
    double dqs = 0.0, dqe = 0.0;
};

// Wing mounting and segment lengths, left side; the right side mirrors in y.
// Both segments hinge about axes parallel to body x: the shoulder flaps the
// proximal segment by qs, the elbow folds the distal one by a further qe.
// The segment axis is the leading edge; chords extend toward -x. A fixed
// incidence pitches each segment nose-up about its span axis.
struct WingLayout {
    Eigen::Vector3d shoulder{0.0, 0.015, 0.0};  // body frame, left side
    double proximal_length = 0.060;
    double distal_length = 0.075;
    double incidence = 0.0;  // rad
};

// Mass properties of one wing-segment pair member (left values; mirrored).
// com_arc is the distance along the leading edge from the segment root,
// com_chord the chordwise offset (negative = behind the leading edge).
// inertia is diagonal in the segment frame (chord, span, normal axes).
struct SegmentMass {
    double mass = 0.0;
    double com_arc = 0.0;
    double com_chord = 0.0;
    Eigen::Vector3d inertia_diag = Eigen::Vector3d::Zero();
};

struct MassModel {
    double body_mass = 0.0156;
    Eigen::Vector3d body_inertia_diag{2.0e-6, 6.0e-6, 6.0e-6};
    SegmentMass proximal;
    SegmentMass distal;
    Eigen::Vector3d gravity{0.0, 0.0, -9.81};

    void validate() const;  // throws ConfigError
};

// Kinematics of one material point riding a wing segment: inertial position
// and velocity, the 3x8 map J = d(velocity)/d(generalized velocity), and the
// acceleration the point has when all generalized accelerations vanish.
struct PointKinematics {
    Eigen::Vector3d p;
    Eigen::Vector3d v;
    Matrix38 J;
    Eigen::Vector3d a_bias;
};

// Frame and angular terms of a whole segment (needed for inertia).
struct SegmentKinematics {
    Eigen::Matrix3d Q;          // segment -> body
    Eigen::Vector3d w_seg;      // angular velocity, segment frame
    Matrix38 Jw;                // d(w_seg)/d(generalized velocity)
    Eigen::Vector3d alpha_bias; // segment angular acceleration at zero accel
};

// side = +1 left, -1 right; distal selects the outer segment.
// local = (chordwise, arc-along-leading-edge, normal) in the segment frame.
PointKinematics wing_point(const BodyState& s, const WingLayout& w, int side,
                           bool distal, const Eigen::Vector3d& local);
SegmentKinematics wing_segment(const BodyState& s, const WingLayout& w,
                               int side, bool distal);

// Generalized mass matrix of body + four wing segments. Symmetric positive
// definite for valid mass models.
Matrix8d mass_matrix(const MassModel& m, const WingLayout& w,
                     const BodyState& s);

// Gravity minus velocity-product (Coriolis/centrifugal/gyroscopic) terms, so
// that  M a = h + u  for unforced motion.
Vector8d bias_forces(const MassModel& m, const WingLayout& w,
                     const BodyState& s);

struct ConstrainedAccel {
    Vector8d a;
    Eigen::Vector2d lambda;  // shoulder/elbow constraint torques
};

// Solves  M a = h + u + Jc' lambda  subject to  Jc a = y  where Jc selects
// the shoulder and elbow accelerations. Schur-complement elimination on the
// Cholesky factor of M. Throws SingularKKTError.
ConstrainedAccel solve_constrained(const Matrix8d& M, const Vector8d& h,
                                   const Vector8d& u,
                                   const Eigen::Vector2d& y);

}  // namespace flapsim
