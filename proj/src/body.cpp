#include "flapsim/body.hpp"

#include <array>
#include <cmath>

#include "flapsim/errors.hpp"
#include "flapsim/rotation.hpp"

namespace flapsim {

namespace {

// Segment -> body rotation: flap about body x by side*psi, then fixed
// incidence nose-up about the span axis, Q = R_x(side*psi) R_y(-incidence).
// R_y commutes with the y-mirror, so assembling both sides from one trig
// evaluation makes left and right wings bitwise mirror images.
Eigen::Matrix3d segment_rotation(double psi, double incidence, int side) {
    const double cp = std::cos(psi), sp = std::sin(psi);
    const double ci = std::cos(incidence), si = std::sin(incidence);
    const double s = static_cast<double>(side);
    Eigen::Matrix3d Q;
    Q << ci, 0.0, -si,
        -s * sp * si, cp, -s * sp * ci,
        cp * si, s * sp, cp * ci;
    return Q;
}

struct SegSpec {
    double psi, dpsi;
};

SegSpec seg_spec(const BodyState& s, bool distal) {
    if (distal) return {s.qs + s.qe, s.dqs + s.dqe};
    return {s.qs, s.dqs};
}

struct SegmentBody {
    int side;
    bool distal;
    const SegmentMass* mass;
};

std::array<SegmentBody, 4> segment_bodies(const MassModel& m) {
    return {{{+1, false, &m.proximal},
             {-1, false, &m.proximal},
             {+1, true, &m.distal},
             {-1, true, &m.distal}}};
}

}  // namespace

void MassModel::validate() const {
    if (!(body_mass > 0.0)) throw ConfigError("body mass must be positive");
    if (proximal.mass < 0.0 || distal.mass < 0.0)
        throw ConfigError("segment masses must be non-negative");
    if ((body_inertia_diag.array() <= 0.0).any())
        throw ConfigError("body inertia must be positive definite");
    if ((proximal.inertia_diag.array() < 0.0).any() ||
        (distal.inertia_diag.array() < 0.0).any())
        throw ConfigError("segment inertias must be non-negative");
}

PointKinematics wing_point(const BodyState& s, const WingLayout& w, int side,
                           bool distal, const Eigen::Vector3d& local) {
    const SegSpec sp = seg_spec(s, distal);
    const double sd = static_cast<double>(side);
    const Eigen::Vector3d xhat = Eigen::Vector3d::UnitX();

    const Eigen::Matrix3d Q = segment_rotation(sp.psi, w.incidence, side);
    const Eigen::Vector3d sh{w.shoulder.x(), sd * w.shoulder.y(),
                             w.shoulder.z()};
    // Rotating offset of the segment root relative to the shoulder; zero for
    // the proximal segment, the proximal leading edge for the distal one.
    Eigen::Vector3d fore = Eigen::Vector3d::Zero();
    if (distal) {
        const Eigen::Matrix3d Qp = segment_rotation(s.qs, w.incidence, side);
        fore = Qp * Eigen::Vector3d(0.0, sd * w.proximal_length, 0.0);
    }
    const Eigen::Vector3d arm =
        Q * Eigen::Vector3d(local.x(), sd * local.y(), local.z());
    const Eigen::Vector3d cb = sh + fore + arm;  // body-frame offset from COM

    // Everything rotating about body x: d/dt V = sd * rate * x^ x V.
    const Eigen::Vector3d dfore = sd * s.dqs * xhat.cross(fore);
    const Eigen::Vector3d darm = sd * sp.dpsi * xhat.cross(arm);
    const Eigen::Vector3d dc = dfore + darm;

    PointKinematics out;
    out.p = s.p + s.R * cb;
    out.v = s.v + s.R * (s.w.cross(cb) + dc);

    out.J.setZero();
    out.J.block<3, 3>(0, 0).setIdentity();
    out.J.col(kQs) = s.R * (sd * xhat.cross(fore + arm));
    out.J.col(kQe) = distal ? Eigen::Vector3d(s.R * (sd * xhat.cross(arm)))
                            : Eigen::Vector3d::Zero();
    out.J.block<3, 3>(0, kWx) = -s.R * hat(cb);

    // Coasting point acceleration (all generalized accelerations zero).
    const Eigen::Vector3d ddc =
        sd * s.dqs * xhat.cross(dfore) + sd * sp.dpsi * xhat.cross(darm);
    out.a_bias = s.R * (s.w.cross(s.w.cross(cb)) + 2.0 * s.w.cross(dc) + ddc);
    return out;
}

SegmentKinematics wing_segment(const BodyState& s, const WingLayout& w,
                               int side, bool distal) {
    const SegSpec sp = seg_spec(s, distal);
    const double sd = static_cast<double>(side);
    const Eigen::Vector3d xhat = Eigen::Vector3d::UnitX();

    SegmentKinematics out;
    out.Q = segment_rotation(sp.psi, w.incidence, side);
    const Eigen::Vector3d hinge = sd * (out.Q.transpose() * xhat);

    out.w_seg = out.Q.transpose() * s.w + sp.dpsi * hinge;
    out.Jw.setZero();
    out.Jw.block<3, 3>(0, kWx) = out.Q.transpose();
    out.Jw.col(kQs) = hinge;
    if (distal) out.Jw.col(kQe) = hinge;

    // d/dt(Q^T w) at frozen accelerations; Qdot = sd dpsi [x]x Q.
    out.alpha_bias = -sp.dpsi * sd * (out.Q.transpose() * xhat.cross(s.w));
    return out;
}

Matrix8d mass_matrix(const MassModel& m, const WingLayout& w,
                     const BodyState& s) {
    Matrix8d M = Matrix8d::Zero();
    M.block<3, 3>(0, 0) = m.body_mass * Eigen::Matrix3d::Identity();
    M.block<3, 3>(kWx, kWx) = m.body_inertia_diag.asDiagonal();

    for (const SegmentBody& sb : segment_bodies(m)) {
        if (sb.mass->mass == 0.0 && sb.mass->inertia_diag.isZero()) continue;
        const Eigen::Vector3d local{sb.mass->com_chord, sb.mass->com_arc, 0.0};
        const PointKinematics pk = wing_point(s, w, sb.side, sb.distal, local);
        const SegmentKinematics sk = wing_segment(s, w, sb.side, sb.distal);
        M.noalias() += sb.mass->mass * pk.J.transpose() * pk.J;
        M.noalias() +=
            sk.Jw.transpose() * sb.mass->inertia_diag.asDiagonal() * sk.Jw;
    }
    return M;
}

Vector8d bias_forces(const MassModel& m, const WingLayout& w,
                     const BodyState& s) {
    Vector8d h = Vector8d::Zero();
    h.segment<3>(0) = m.body_mass * m.gravity;
    h.segment<3>(kWx) = -s.w.cross(m.body_inertia_diag.asDiagonal() * s.w);

    for (const SegmentBody& sb : segment_bodies(m)) {
        if (sb.mass->mass == 0.0 && sb.mass->inertia_diag.isZero()) continue;
        const Eigen::Vector3d local{sb.mass->com_chord, sb.mass->com_arc, 0.0};
        const PointKinematics pk = wing_point(s, w, sb.side, sb.distal, local);
        const SegmentKinematics sk = wing_segment(s, w, sb.side, sb.distal);
        h.noalias() +=
            pk.J.transpose() * (sb.mass->mass * (m.gravity - pk.a_bias));
        const Eigen::Vector3d Iw =
            sb.mass->inertia_diag.asDiagonal() * sk.w_seg;
        h.noalias() -= sk.Jw.transpose() *
                       (sb.mass->inertia_diag.asDiagonal() * sk.alpha_bias +
                        sk.w_seg.cross(Iw));
    }
    return h;
}

ConstrainedAccel solve_constrained(const Matrix8d& M, const Vector8d& h,
                                   const Vector8d& u,
                                   const Eigen::Vector2d& y) {
    const Eigen::LLT<Matrix8d> llt(M);
    if (llt.info() != Eigen::Success)
        throw SingularKKTError("mass matrix not positive definite");

    Eigen::Matrix<double, 8, 2> Jt = Eigen::Matrix<double, 8, 2>::Zero();
    Jt(kQs, 0) = 1.0;
    Jt(kQe, 1) = 1.0;

    const Vector8d Minv_f = llt.solve(h + u);
    const Eigen::Matrix<double, 8, 2> W = llt.solve(Jt);
    const Eigen::Matrix2d S = Jt.transpose() * W;  // Jc M^-1 Jc'
    const Eigen::Vector2d r = y - Jt.transpose() * Minv_f;

    const double det = S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0);
    const double scale = S.cwiseAbs().maxCoeff();
    if (!(std::abs(det) > 1e-14 * scale * scale))
        throw SingularKKTError("constraint Schur complement singular");

    ConstrainedAccel out;
    out.lambda = S.ldlt().solve(r);
    out.a = Minv_f + W * out.lambda;
    return out;
}

}  // namespace flapsim
