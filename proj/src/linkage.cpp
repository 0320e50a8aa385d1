#include "flapsim/linkage.hpp"

#include <cmath>

#include "flapsim/errors.hpp"

namespace flapsim {

namespace {

using Eigen::Vector2d;

Vector2d e(double a) { return {std::cos(a), std::sin(a)}; }

// d/da e(a)
Vector2d ep(double a) { return {-std::sin(a), std::cos(a)}; }

double circ_dist(double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * M_PI));
}

struct CircleHit {
    Vector2d first, second;
};

// Both intersections of circles (c1, r1) and (c2, r2).
CircleHit circle_intersect(const Vector2d& c1, double r1, const Vector2d& c2,
                           double r2) {
    const Vector2d d = c2 - c1;
    const double L = d.norm();
    if (L > r1 + r2 || L < std::abs(r1 - r2) || L == 0.0)
        throw AssemblyError("linkage loop cannot close: circle gap " +
                            std::to_string(L));
    const double a = (r1 * r1 - r2 * r2 + L * L) / (2.0 * L);
    const double h2 = r1 * r1 - a * a;
    const double h = std::sqrt(std::max(h2, 0.0));
    const Vector2d mid = c1 + a / L * d;
    const Vector2d perp{-d.y() / L, d.x() / L};
    return {mid + h * perp, mid - h * perp};
}

}  // namespace

void LinkageConfig::validate() const {
    const double lengths[] = {crank_arm,  crank_arm2, coupler_a,
                              shoulder_arm, coupler_b,  rocker_arm,
                              shoulder_to_elbow, elbow_lever, rocker_arm2,
                              elbow_link};
    for (double L : lengths)
        if (!(L > 0.0))
            throw ConfigError("linkage link lengths must be positive");
    if (!(assembly_tol > 0.0) || !(projection_tol > 0.0))
        throw ConfigError("linkage tolerances must be positive");
    // The reference pose must itself assemble.
    forward_kinematics(*this, reference_q);
}

JointPositions forward_kinematics(const LinkageConfig& c, const JointVec& q) {
    JointPositions out;
    const Vector2d p2 = c.p1 + c.crank_arm * e(q[kQ1]);
    const Vector2d p3 = c.p1 + c.crank_arm2 * e(q[kQ1] + c.crank_arm2_phase);
    const Vector2d p4a = p2 + c.coupler_a * e(q[kQ2]);
    const Vector2d p4b = c.p5 + c.shoulder_arm * e(q[kQ5] + c.shoulder_arm_phase);
    const Vector2d p7a = p3 + c.coupler_b * e(q[kQ3]);
    const Vector2d p7b = c.p8 + c.rocker_arm * e(q[kQ8] + c.rocker_arm_phase);
    const Vector2d p6 = c.p5 + c.shoulder_to_elbow * e(q[kQ5]);
    const Vector2d p9 = p6 + c.elbow_lever * e(q[kQ6] + c.elbow_lever_phase);
    const Vector2d p10a = p9 + c.elbow_link * e(q[kQ9]);
    const Vector2d p10b = c.p8 + c.rocker_arm2 * e(q[kQ8]);

    const double res = std::max({(p4a - p4b).norm(), (p7a - p7b).norm(),
                                 (p10a - p10b).norm()});
    if (res > c.assembly_tol)
        throw AssemblyError("linkage loops do not close at given angles, gap " +
                            std::to_string(res) + " m");

    out.p = {c.p1, p2, p3, p4a, c.p5, p6, p7a, c.p8, p9, p10b};
    out.closure_residual = res;
    return out;
}

Eigen::Matrix<double, 6, 1> constraint_residual(const LinkageConfig& c,
                                                const JointVec& q) {
    Eigen::Matrix<double, 6, 1> g;
    const Vector2d p2 = c.p1 + c.crank_arm * e(q[kQ1]);
    const Vector2d p3 = c.p1 + c.crank_arm2 * e(q[kQ1] + c.crank_arm2_phase);
    g.segment<2>(0) = p2 + c.coupler_a * e(q[kQ2]) - c.p5 -
                      c.shoulder_arm * e(q[kQ5] + c.shoulder_arm_phase);
    g.segment<2>(2) = p3 + c.coupler_b * e(q[kQ3]) - c.p8 -
                      c.rocker_arm * e(q[kQ8] + c.rocker_arm_phase);
    g.segment<2>(4) = c.p5 + c.shoulder_to_elbow * e(q[kQ5]) +
                      c.elbow_lever * e(q[kQ6] + c.elbow_lever_phase) +
                      c.elbow_link * e(q[kQ9]) - c.p8 -
                      c.rocker_arm2 * e(q[kQ8]);
    return g;
}

Eigen::Matrix<double, 6, 7> constraint_jacobian(const LinkageConfig& c,
                                                const JointVec& q) {
    Eigen::Matrix<double, 6, 7> G = Eigen::Matrix<double, 6, 7>::Zero();
    G.block<2, 1>(0, kQ1) = c.crank_arm * ep(q[kQ1]);
    G.block<2, 1>(0, kQ2) = c.coupler_a * ep(q[kQ2]);
    G.block<2, 1>(0, kQ5) =
        -c.shoulder_arm * ep(q[kQ5] + c.shoulder_arm_phase);
    G.block<2, 1>(2, kQ1) = c.crank_arm2 * ep(q[kQ1] + c.crank_arm2_phase);
    G.block<2, 1>(2, kQ3) = c.coupler_b * ep(q[kQ3]);
    G.block<2, 1>(2, kQ8) = -c.rocker_arm * ep(q[kQ8] + c.rocker_arm_phase);
    G.block<2, 1>(4, kQ5) = c.shoulder_to_elbow * ep(q[kQ5]);
    G.block<2, 1>(4, kQ6) = c.elbow_lever * ep(q[kQ6] + c.elbow_lever_phase);
    G.block<2, 1>(4, kQ9) = c.elbow_link * ep(q[kQ9]);
    G.block<2, 1>(4, kQ8) = -c.rocker_arm2 * ep(q[kQ8]);
    return G;
}

JointAccelerations solve_joint_accelerations(const LinkageConfig& c,
                                             const JointVec& q,
                                             const JointVec& dq, double u_k) {
    // Differentiating G(q) dq = 0 once more: G ddq = sum of signed L e(q+f) dq^2
    // (the e'' = -e centripetal terms moved to the right side), plus the motor
    // row ddq1 = u_k.
    Eigen::Matrix<double, 7, 7> A = Eigen::Matrix<double, 7, 7>::Zero();
    A.topRows<6>() = constraint_jacobian(c, q);
    A(6, kQ1) = 1.0;

    auto sq = [](double x) { return x * x; };
    Eigen::Matrix<double, 7, 1> b;
    b.segment<2>(0) =
        c.crank_arm * e(q[kQ1]) * sq(dq[kQ1]) +
        c.coupler_a * e(q[kQ2]) * sq(dq[kQ2]) -
        c.shoulder_arm * e(q[kQ5] + c.shoulder_arm_phase) * sq(dq[kQ5]);
    b.segment<2>(2) =
        c.crank_arm2 * e(q[kQ1] + c.crank_arm2_phase) * sq(dq[kQ1]) +
        c.coupler_b * e(q[kQ3]) * sq(dq[kQ3]) -
        c.rocker_arm * e(q[kQ8] + c.rocker_arm_phase) * sq(dq[kQ8]);
    b.segment<2>(4) =
        c.shoulder_to_elbow * e(q[kQ5]) * sq(dq[kQ5]) +
        c.elbow_lever * e(q[kQ6] + c.elbow_lever_phase) * sq(dq[kQ6]) +
        c.elbow_link * e(q[kQ9]) * sq(dq[kQ9]) -
        c.rocker_arm2 * e(q[kQ8]) * sq(dq[kQ8]);
    b[6] = u_k;

    const Eigen::JacobiSVD<Eigen::Matrix<double, 7, 7>> svd(
        A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues()(6);
    const double smax = svd.singularValues()(0);
    if (!(smin > 0.0) || smax / smin > c.singular_cond)
        throw SingularLinkageError(
            "linkage constraint system singular (dead point), cond " +
            std::to_string(smax / std::max(smin, 1e-300)));

    JointAccelerations out;
    out.ddq = svd.solve(b);
    out.condition = smax / smin;
    return out;
}

JointVec assemble(const LinkageConfig& c, double q1, const JointVec& guess) {
    JointVec q;
    q[kQ1] = q1;
    const Vector2d p2 = c.p1 + c.crank_arm * e(q1);
    const Vector2d p3 = c.p1 + c.crank_arm2 * e(q1 + c.crank_arm2_phase);

    auto angle = [](const Vector2d& from, const Vector2d& to) {
        const Vector2d d = to - from;
        return std::atan2(d.y(), d.x());
    };

    // Loop 1: p4 on circle(p2, coupler_a) and circle(p5, shoulder_arm).
    {
        const CircleHit h = circle_intersect(p2, c.coupler_a, c.p5, c.shoulder_arm);
        const double cand1 = angle(c.p5, h.first) - c.shoulder_arm_phase;
        const double cand2 = angle(c.p5, h.second) - c.shoulder_arm_phase;
        const Vector2d p4 = circ_dist(cand1, guess[kQ5]) <=
                                    circ_dist(cand2, guess[kQ5])
                                ? h.first
                                : h.second;
        q[kQ5] = angle(c.p5, p4) - c.shoulder_arm_phase;
        q[kQ2] = angle(p2, p4);
    }
    // Loop 2: p7 on circle(p3, coupler_b) and circle(p8, rocker_arm).
    {
        const CircleHit h = circle_intersect(p3, c.coupler_b, c.p8, c.rocker_arm);
        const double cand1 = angle(c.p8, h.first) - c.rocker_arm_phase;
        const double cand2 = angle(c.p8, h.second) - c.rocker_arm_phase;
        const Vector2d p7 = circ_dist(cand1, guess[kQ8]) <=
                                    circ_dist(cand2, guess[kQ8])
                                ? h.first
                                : h.second;
        q[kQ8] = angle(c.p8, p7) - c.rocker_arm_phase;
        q[kQ3] = angle(p3, p7);
    }
    // Loop 3: p9 on circle(p6, elbow_lever) and circle(p10, elbow_link).
    {
        const Vector2d p6 = c.p5 + c.shoulder_to_elbow * e(q[kQ5]);
        const Vector2d p10 = c.p8 + c.rocker_arm2 * e(q[kQ8]);
        const CircleHit h = circle_intersect(p6, c.elbow_lever, p10, c.elbow_link);
        const double cand1 = angle(p6, h.first) - c.elbow_lever_phase;
        const double cand2 = angle(p6, h.second) - c.elbow_lever_phase;
        const Vector2d p9 = circ_dist(cand1, guess[kQ6]) <=
                                    circ_dist(cand2, guess[kQ6])
                                ? h.first
                                : h.second;
        q[kQ6] = angle(p6, p9) - c.elbow_lever_phase;
        q[kQ9] = angle(p9, p10);
    }
    return q;
}

void project_positions(const LinkageConfig& c, JointVec& q) {
    // Newton on the six dependent angles; the crank is the driven coordinate
    // and stays where the integrator put it.
    static constexpr int dep[6] = {kQ2, kQ3, kQ5, kQ6, kQ8, kQ9};
    JointVec qn = q;
    for (int it = 0; it < 30; ++it) {
        const Eigen::Matrix<double, 6, 1> g = constraint_residual(c, qn);
        if (g.lpNorm<Eigen::Infinity>() < 1e-13) {
            q = qn;
            return;
        }
        const Eigen::Matrix<double, 6, 7> G = constraint_jacobian(c, qn);
        Eigen::Matrix<double, 6, 6> Gd;
        for (int j = 0; j < 6; ++j) Gd.col(j) = G.col(dep[j]);
        const Eigen::Matrix<double, 6, 1> step = Gd.partialPivLu().solve(-g);
        if (!step.allFinite()) break;
        for (int j = 0; j < 6; ++j) qn[dep[j]] += step[j];
        if (step.lpNorm<Eigen::Infinity>() > 1.0) break;  // diverging
    }
    // Newton stalled; re-assemble from scratch on the nearest branch.
    q = assemble(c, q[kQ1], q);
}

void project_velocities(const LinkageConfig& c, const JointVec& q,
                        JointVec& dq) {
    static constexpr int dep[6] = {kQ2, kQ3, kQ5, kQ6, kQ8, kQ9};
    const Eigen::Matrix<double, 6, 7> G = constraint_jacobian(c, q);
    Eigen::Matrix<double, 6, 6> Gd;
    for (int j = 0; j < 6; ++j) Gd.col(j) = G.col(dep[j]);
    const Eigen::Matrix<double, 6, 1> rhs = -G.col(kQ1) * dq[kQ1];
    const Eigen::Matrix<double, 6, 1> dqd = Gd.partialPivLu().solve(rhs);
    for (int j = 0; j < 6; ++j) dq[dep[j]] = dqd[j];
}

LinkageState step_kinematics(const LinkageConfig& c, const LinkageState& s,
                             double u_k, double dt) {
    struct Deriv {
        JointVec dq, ddq;
    };
    auto f = [&](const JointVec& q, const JointVec& dq) -> Deriv {
        return {dq, solve_joint_accelerations(c, q, dq, u_k).ddq};
    };
    const Deriv k1 = f(s.q, s.dq);
    const Deriv k2 = f(s.q + 0.5 * dt * k1.dq, s.dq + 0.5 * dt * k1.ddq);
    const Deriv k3 = f(s.q + 0.5 * dt * k2.dq, s.dq + 0.5 * dt * k2.ddq);
    const Deriv k4 = f(s.q + dt * k3.dq, s.dq + dt * k3.ddq);

    LinkageState out;
    out.q = s.q + dt / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    out.dq = s.dq + dt / 6.0 * (k1.ddq + 2.0 * k2.ddq + 2.0 * k3.ddq + k4.ddq);

    if (constraint_residual(c, out.q).lpNorm<Eigen::Infinity>() >
        c.projection_tol) {
        project_positions(c, out.q);
        project_velocities(c, out.q, out.dq);
    }
    return out;
}

GaitSample gait_sample(const LinkageConfig& c, const JointVec& q,
                       const JointVec& dq, double u_k) {
    const JointAccelerations acc = solve_joint_accelerations(c, q, dq, u_k);
    GaitSample g;
    g.qs = q[kQ5];
    g.qe = q[kQ6] - q[kQ5];
    g.dqs = dq[kQ5];
    g.dqe = dq[kQ6] - dq[kQ5];
    g.ddqs = acc.ddq[kQ5];
    g.ddqe = acc.ddq[kQ6] - acc.ddq[kQ5];
    return g;
}

}  // namespace flapsim
