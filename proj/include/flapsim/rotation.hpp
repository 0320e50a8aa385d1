#pragma once

#include <Eigen/Dense>

namespace flapsim {

inline Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

// Rodrigues form of exp([phi]x). Series branch below ~1e-6 rad keeps the
// ratio terms well conditioned.
inline Eigen::Matrix3d exp_so3(const Eigen::Vector3d& phi) {
    const double t = phi.norm();
    const Eigen::Matrix3d K = hat(phi);
    double a, b;
    if (t < 1e-6) {
        a = 1.0 - t * t / 6.0;
        b = 0.5 - t * t / 24.0;
    } else {
        a = std::sin(t) / t;
        b = (1.0 - std::cos(t)) / (t * t);
    }
    return Eigen::Matrix3d::Identity() + a * K + b * K * K;
}

// One attitude step with body-frame angular velocity held constant:
// R(t+dt) = R exp([w dt]x). Exactly orthogonal up to rounding.
inline Eigen::Matrix3d integrate_rotation(const Eigen::Matrix3d& R,
                                          const Eigen::Vector3d& w_body,
                                          double dt) {
    return R * exp_so3(w_body * dt);
}

// Inverse right-trivialized tangent of exp, truncated: maps angular velocity
// to the rate of exponential coordinates near phi. Two correction terms are
// enough for the per-step |phi| ~ |w| dt used by the integrator.
inline Eigen::Vector3d dexpinv(const Eigen::Vector3d& phi,
                               const Eigen::Vector3d& w) {
    const Eigen::Vector3d c = phi.cross(w);
    return w - 0.5 * c + phi.cross(c) / 12.0;
}

}  // namespace flapsim
