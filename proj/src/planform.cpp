#include "flapsim/planform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flapsim/errors.hpp"
#include "flapsim/rotation.hpp"

namespace flapsim {

void Planform::validate() const {
    const auto check = [](double v, const char* name) {
        if (!(v > 0.0))
            throw ConfigError(std::string("planform.") + name + " must be positive");
    };
    check(proximal_root_chord, "proximal_root_chord");
    check(proximal_tip_chord, "proximal_tip_chord");
    check(distal_root_chord, "distal_root_chord");
    check(distal_tip_chord, "distal_tip_chord");
}

double chord_at(const Planform& pf, const WingLayout& w, bool distal,
                double arc) {
    const double len = distal ? w.distal_length : w.proximal_length;
    const double root = distal ? pf.distal_root_chord : pf.proximal_root_chord;
    const double tip = distal ? pf.distal_tip_chord : pf.proximal_tip_chord;
    const double t = std::clamp(arc / len, 0.0, 1.0);
    return root + (tip - root) * t;
}

double wing_semispan_flat(const WingLayout& w, double qe) {
    return w.proximal_length + w.distal_length * std::cos(qe);
}

namespace {

// In-plane relative wind, angle of attack, and the lift/drag directions.
// A degenerate in-plane wind leaves zero direction vectors and alpha = 0 so
// downstream forces vanish instead of dividing by zero.
void fill_flow(BladeElement& e, const Eigen::Vector3d& v_rel, double u_floor) {
    const double vc = v_rel.dot(e.chord_hat);
    const double vn = v_rel.dot(e.normal_hat);
    e.v_plane = {vc, vn};
    e.speed = e.v_plane.norm();
    if (e.speed > 0.0) {
        e.alpha = std::atan2(vn, vc);
        e.drag_hat = (vc * e.chord_hat + vn * e.normal_hat) / e.speed;
        e.lift_hat = (-vn * e.chord_hat + vc * e.normal_hat) / e.speed;
    } else {
        e.alpha = 0.0;
        e.drag_hat.setZero();
        e.lift_hat.setZero();
    }
    e.u_eff = std::max(v_rel.norm(), u_floor);
}

BladeElement make_wing_element(const BodyState& s, const WingLayout& w,
                               const Planform& pf,
                               const Eigen::Vector3d& freestream, int side,
                               bool distal, double arc, double ds,
                               double y_flat, double u_floor) {
    BladeElement e;
    e.side = side;
    e.distal = distal;
    e.on_body = false;
    e.arc = arc;
    e.chord = chord_at(pf, w, distal, arc);
    e.ds = ds;
    e.y_flat = y_flat;

    const SegmentKinematics seg = wing_segment(s, w, side, distal);
    const Eigen::Matrix3d F = s.R * seg.Q;  // segment -> inertial
    e.chord_hat = -F.col(0);
    e.span_hat = side * F.col(1);
    e.normal_hat = F.col(2);

    const PointKinematics pk =
        wing_point(s, w, side, distal, {-0.25 * e.chord, arc, 0.0});
    e.p = pk.p;
    e.J = pk.J;
    e.p_te = pk.p + 0.75 * e.chord * e.chord_hat;
    fill_flow(e, freestream - pk.v, u_floor);
    return e;
}

// Carry-through strip under the body: rides the body frame at the shoulder
// line, pitched by the fixed incidence, untouched by the gait.
BladeElement make_body_element(const BodyState& s, const WingLayout& w,
                               const Planform& pf,
                               const Eigen::Vector3d& freestream,
                               double y_signed, double ds, double u_floor) {
    BladeElement e;
    e.side = y_signed >= 0.0 ? 1 : -1;
    e.distal = false;
    e.on_body = true;
    e.arc = std::abs(y_signed);
    e.chord = pf.proximal_root_chord;
    e.ds = ds;
    e.y_flat = y_signed;

    const double ci = std::cos(w.incidence), si = std::sin(w.incidence);
    Eigen::Matrix3d Q;
    Q << ci, 0.0, -si, 0.0, 1.0, 0.0, si, 0.0, ci;
    const Eigen::Matrix3d F = s.R * Q;
    e.chord_hat = -F.col(0);
    e.span_hat = e.side * F.col(1);
    e.normal_hat = F.col(2);

    const Eigen::Vector3d cb =
        Eigen::Vector3d(w.shoulder.x(), y_signed, w.shoulder.z()) +
        Q * Eigen::Vector3d(-0.25 * e.chord, 0.0, 0.0);
    e.p = s.p + s.R * cb;
    e.J.setZero();
    e.J.block<3, 3>(0, kVx) = Eigen::Matrix3d::Identity();
    e.J.block<3, 3>(0, kWx) = -s.R * hat(cb);
    const Eigen::Vector3d v = s.v + s.R * (s.w.cross(cb));
    e.p_te = e.p + 0.75 * e.chord * e.chord_hat;
    fill_flow(e, freestream - v, u_floor);
    return e;
}

}  // namespace

std::vector<BladeElement> discretize_wing(const BodyState& s,
                                          const WingLayout& w,
                                          const Planform& pf,
                                          const Eigen::Vector3d& freestream,
                                          int n_per_segment,
                                          double u_floor) {
    const int n = n_per_segment;
    const double cq = std::cos(s.qe);
    std::vector<BladeElement> out;
    out.reserve(static_cast<size_t>(4 * n));
    for (int side : {1, -1}) {
        for (int i = 0; i < n; ++i) {
            const double arc = (i + 0.5) * w.proximal_length / n;
            out.push_back(make_wing_element(
                s, w, pf, freestream, side, false, arc,
                w.proximal_length / n, side * (w.shoulder.y() + arc),
                u_floor));
        }
        for (int i = 0; i < n; ++i) {
            const double arc = (i + 0.5) * w.distal_length / n;
            // Fold projects the distal strips onto the flattened span.
            out.push_back(make_wing_element(
                s, w, pf, freestream, side, true, arc,
                cq * w.distal_length / n,
                side * (w.shoulder.y() + w.proximal_length + arc * cq),
                u_floor));
        }
    }
    return out;
}

SpanStations discretize_span(const BodyState& s, const WingLayout& w,
                             const Planform& pf,
                             const Eigen::Vector3d& freestream, int m,
                             double u_floor) {
    const double sy = w.shoulder.y();
    const double lp = w.proximal_length;
    const double ld = w.distal_length;
    const double cq = std::cos(s.qe);
    const double semi = sy + wing_semispan_flat(w, s.qe);

    SpanStations out;
    out.span = 2.0 * semi;
    out.root_chord = pf.proximal_root_chord;
    out.theta.resize(static_cast<size_t>(m));
    const double dth = std::numbers::pi / (m + 1);
    for (int k = 0; k < m; ++k) out.theta[static_cast<size_t>(k)] = (k + 1) * dth;

    // Stations y = (S/2) cos(theta) and cell edges at the theta midpoints,
    // outer cells stretched to the tips. Mirrored halves are copied so the
    // grid is symmetric to the last bit.
    std::vector<double> y(static_cast<size_t>(m));
    std::vector<double> edge(static_cast<size_t>(m) + 1);
    edge[0] = semi;
    edge[static_cast<size_t>(m)] = -semi;
    for (int k = 0; k < m; ++k) {
        const size_t i = static_cast<size_t>(k);
        if (2 * k + 1 < m) {
            y[i] = semi * std::cos(out.theta[i]);
        } else if (2 * k + 1 == m) {
            y[i] = 0.0;
        } else {
            y[i] = -y[static_cast<size_t>(m - 1 - k)];
        }
        if (k == 0) continue;
        if (2 * k < m) {
            edge[i] = semi * std::cos((k + 0.5) * dth);
        } else if (2 * k == m) {
            edge[i] = 0.0;
        } else {
            edge[i] = -edge[static_cast<size_t>(m - k)];
        }
    }

    out.el.reserve(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        const size_t i = static_cast<size_t>(k);
        const double ds = edge[i] - edge[i + 1];
        const double s_abs = std::abs(y[i]);
        if (s_abs <= sy) {
            out.el.push_back(
                make_body_element(s, w, pf, freestream, y[i], ds, u_floor));
        } else {
            const int side = y[i] > 0.0 ? 1 : -1;
            bool distal = s_abs > sy + lp;
            double arc;
            if (distal) {
                arc = cq > 1e-9 ? (s_abs - sy - lp) / cq : ld;
                arc = std::clamp(arc, 0.0, ld);
            } else {
                arc = s_abs - sy;
            }
            out.el.push_back(make_wing_element(s, w, pf, freestream, side,
                                               distal, arc, ds, y[i],
                                               u_floor));
        }
    }
    return out;
}

}  // namespace flapsim
