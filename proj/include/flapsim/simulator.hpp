#pragma once

#include <vector>

#include <Eigen/Dense>

#include "flapsim/body.hpp"
#include "flapsim/gait.hpp"
#include "flapsim/linkage.hpp"
#include "flapsim/planform.hpp"
#include "flapsim/quasisteady.hpp"
#include "flapsim/unsteady.hpp"

namespace flapsim {

enum class AeroMode { kQuasisteady, kWagner };
enum class GaitMode { kLinkage, kPrescribed };

// PI tracking of the crank speed target 2 pi f. With dq1(0) already at the
// target the error stays identically zero and the crank turns uniformly.
struct CrankController {
    double kp = 40.0;  // 1/s
    double ki = 400.0; // 1/s^2
};

// Wing-segment masses sized for the default airframe; MassModel itself
// defaults to massless wings, which free flight cannot use.
MassModel default_mass_model();

struct SimConfig {
    double rho = 1.225;           // kg/m^3
    double airspeed = 1.65;       // m/s, freestream blows along -x
    double dt = 2.5e-4;           // s
    double duration = 2.0;        // s
    double flap_frequency = 4.5;  // Hz, crank target (linkage gait)
    AeroMode aero = AeroMode::kWagner;
    GaitMode gait_mode = GaitMode::kLinkage;
    bool tethered = true;   // body clamped to the mount, forces still logged
    int span_stations = 16;       // lifting-line collocation points
    int elements_per_segment = 6; // quasi-steady blade elements
    double u_floor = 0.05;        // m/s
    int snapshot_stride = 20;     // steps between circulation snapshots

    WingLayout wing;
    Planform planform;
    MassModel mass = default_mass_model();
    LinkageConfig linkage;
    PrescribedGait gait;  // used when gait_mode == kPrescribed
    WagnerConstants wagner;
    DickinsonCoeffs dickinson;
    CrankController crank;

    Eigen::Vector3d freestream() const { return {-airspeed, 0.0, 0.0}; }
    // Airspeed scale handed to the circulation dynamics, floored for hover.
    double airspeed_scale() const {
        return airspeed > u_floor ? airspeed : u_floor;
    }
    void validate() const;  // throws ConfigError
};

// Everything the integrator advances. Body qs/qe mirror the gait and are
// overwritten from it at every evaluation, never integrated on their own.
struct FullState {
    double t = 0.0;
    BodyState body;
    LinkageState link{JointVec::Zero(), JointVec::Zero()};
    double ierr = 0.0;        // integral of the crank speed error
    Eigen::VectorXd zeta;     // [a_n | z1 | z2], empty in quasi-steady mode
};

// One evaluation of the vector field plus everything worth logging about it.
struct Derivative {
    GaitSample gait;              // trajectory actually imposed on the wing
    Vector8d accel;               // constrained generalized accelerations
    Eigen::Vector2d lambda = Eigen::Vector2d::Zero();  // gait torques, N m
    AeroTotals aero;
    double u_k = 0.0;             // motor acceleration command
    JointVec link_ddq = JointVec::Zero();
    Eigen::VectorXd zeta_dot;
    double linkage_residual = 0.0;     // loop closure gap, m
    double constraint_residual = 0.0;  // |Jc a - y|_inf
    Eigen::VectorXd cl;                // per-element lift coefficient
    Eigen::VectorXd gamma;             // bound circulation per station
    std::vector<Eigen::Vector3d> te;   // station trailing edges, inertial
};

Derivative derivative(const SimConfig& cfg, const FullState& s);

struct StepResult {
    FullState next;
    Derivative start;  // the k1 evaluation, for logging
};

// Classical RK4. The rotation advances through exp on SO(3): the attitude
// block integrates a local rotation vector whose rate is dexpinv-corrected,
// so R stays exactly orthogonal. Throws NonFiniteStateError naming the state
// block that first went non-finite.
StepResult rk4_step(const SimConfig& cfg, const FullState& s, double dt);

struct ForceSample {
    double t = 0.0;
    Eigen::Vector3d force = Eigen::Vector3d::Zero();   // net aero, inertial
    Eigen::Vector3d moment = Eigen::Vector3d::Zero();  // about body COM
    double linkage_residual = 0.0;
    double constraint_residual = 0.0;
};

// Circulation/state snapshot for wake reconstruction.
struct SnapshotRow {
    double t = 0.0;
    Eigen::VectorXd zeta;
    Eigen::VectorXd gamma;
    Eigen::VectorXd cl;
    std::vector<Eigen::Vector3d> te;
};

struct ForceRecord {
    double dt = 0.0;       // uniform sample interval
    int stations = 0;      // spanwise stations per snapshot (0: quasi-steady)
    std::vector<ForceSample> samples;     // one per step, at step start
    std::vector<SnapshotRow> snapshots;   // every snapshot_stride steps
};

struct SimResult {
    ForceRecord record;
    FullState final_state;
};

// Crank angle at rate 2 pi f (linkage mode), or phase 0 of the prescribed
// gait; body at rest at the origin, circulation states zero.
FullState initial_state(const SimConfig& cfg);

// Fixed-step integration over cfg.duration. Deterministic: identical
// configurations produce bit-identical records.
SimResult run(const SimConfig& cfg);

}  // namespace flapsim
