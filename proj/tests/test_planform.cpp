#include <doctest.h>

#include <cmath>

#include "flapsim/errors.hpp"
#include "flapsim/planform.hpp"
#include "flapsim/rotation.hpp"

using namespace flapsim;

namespace {

BodyState moving_state() {
    BodyState s;
    s.p = {0.1, -0.2, 0.3};
    s.R = exp_so3({0.3, -0.5, 0.8});
    s.v = {0.4, -0.1, 0.25};
    s.w = {1.2, -0.8, 0.5};
    s.qs = 0.35;
    s.qe = -0.55;
    s.dqs = 6.0;
    s.dqe = -4.0;
    return s;
}

// Same state advanced by t with every rate held constant; R moves on the
// group so the traced points are material points of the same configuration.
BodyState coast(const BodyState& s0, double t) {
    BodyState s = s0;
    s.p = s0.p + s0.v * t;
    s.R = s0.R * exp_so3(s0.w * t);
    s.qs = s0.qs + s0.dqs * t;
    s.qe = s0.qe + s0.dqe * t;
    return s;
}

}  // namespace

TEST_CASE("wing tiling covers the flattened semispan exactly") {
    BodyState s = moving_state();
    WingLayout w;
    Planform pf;
    const int n = 5;
    const auto els = discretize_wing(s, w, pf, {-3.0, 0.0, 0.0}, n);
    REQUIRE(els.size() == static_cast<size_t>(4 * n));
    double left = 0.0, right = 0.0;
    for (const auto& el : els) (el.side > 0 ? left : right) += el.ds;
    const double semi = wing_semispan_flat(w, s.qe);
    CHECK(std::abs(left - semi) < 1e-12);
    CHECK(std::abs(right - semi) < 1e-12);
}

TEST_CASE("planform area is invariant under refinement") {
    BodyState s = moving_state();
    WingLayout w;
    Planform pf;
    auto area = [&](int n) {
        double a = 0.0;
        for (const auto& el : discretize_wing(s, w, pf, {0.0, 0.0, 0.0}, n)) {
            if (el.side > 0) a += el.chord * el.ds;
        }
        return a;
    };
    CHECK(std::abs(area(4) - area(9)) < 1e-12);

    Planform rect;
    rect.proximal_root_chord = rect.proximal_tip_chord = 0.03;
    rect.distal_root_chord = rect.distal_tip_chord = 0.03;
    for (const auto& el : discretize_wing(s, w, rect, {0.0, 0.0, 0.0}, 4)) {
        CHECK(el.chord == 0.03);
    }
}

TEST_CASE("folded distal strips contribute cosine-projected width") {
    BodyState s;
    s.qe = 1.0;
    WingLayout w;
    Planform pf;
    const int n = 4;
    for (const auto& el : discretize_wing(s, w, pf, {0.0, 0.0, 0.0}, n)) {
        const double expect = el.distal
                                  ? std::cos(1.0) * w.distal_length / n
                                  : w.proximal_length / n;
        CHECK(std::abs(el.ds - expect) < 1e-15);
    }
}

TEST_CASE("quarter-chord points sit a quarter chord behind the leading edge") {
    BodyState s;
    s.qe = 0.8;
    WingLayout w;
    Planform pf;
    for (const auto& el : discretize_wing(s, w, pf, {0.0, 0.0, 0.0}, 3)) {
        const double sd = el.side;
        Eigen::Vector3d expect;
        if (el.distal) {
            expect = {-0.25 * el.chord,
                      sd * (w.shoulder.y() + w.proximal_length +
                            el.arc * std::cos(s.qe)),
                      el.arc * std::sin(s.qe)};
        } else {
            expect = {-0.25 * el.chord, sd * (w.shoulder.y() + el.arc), 0.0};
        }
        CHECK((el.p - expect).norm() < 1e-15);
        // trailing edge: a further 3/4 chord along the chord line
        CHECK((el.p_te - el.p - 0.75 * el.chord * el.chord_hat).norm() <
              1e-15);
    }
}

TEST_CASE("incidence pitches the chord line nose up") {
    BodyState s;
    WingLayout w;
    w.incidence = 0.12;
    Planform pf;
    const double ci = std::cos(0.12), si = std::sin(0.12);
    for (const auto& el : discretize_wing(s, w, pf, {0.0, 0.0, 0.0}, 2)) {
        // trailing edge behind and below the leading edge, top normal
        // leaning backward; identical on both sides
        CHECK(std::abs(el.chord_hat.x() + ci) < 1e-15);
        CHECK(std::abs(el.chord_hat.z() + si) < 1e-15);
        CHECK(std::abs(el.normal_hat.x() + si) < 1e-15);
        CHECK(std::abs(el.normal_hat.z() - ci) < 1e-15);
    }
}

TEST_CASE("angle of attack equals geometric incidence in pure freestream") {
    BodyState s;
    WingLayout w;
    w.incidence = 0.12;
    Planform pf;
    for (const auto& el : discretize_wing(s, w, pf, {-3.0, 0.0, 0.0}, 3)) {
        CHECK(std::abs(el.alpha - 0.12) < 1e-12);
        CHECK(std::abs(el.speed - 3.0) < 1e-12);
        CHECK(el.u_eff == 3.0);
        CHECK((el.drag_hat - Eigen::Vector3d(-1.0, 0.0, 0.0)).norm() < 1e-12);
        CHECK((el.lift_hat - Eigen::Vector3d(0.0, 0.0, 1.0)).norm() < 1e-12);
    }
}

TEST_CASE("lift and drag directions frame the in-plane wind") {
    BodyState s = moving_state();
    WingLayout w;
    w.incidence = 0.1;
    Planform pf;
    for (const auto& el : discretize_wing(s, w, pf, {-2.0, 0.3, 0.5}, 4)) {
        REQUIRE(el.speed > 0.1);
        CHECK(std::abs(el.lift_hat.norm() - 1.0) < 1e-12);
        CHECK(std::abs(el.drag_hat.norm() - 1.0) < 1e-12);
        CHECK(std::abs(el.lift_hat.dot(el.drag_hat)) < 1e-12);
        // drag cross lift recovers the span axis of the segment frame
        const Eigen::Vector3d axis = el.drag_hat.cross(el.lift_hat);
        CHECK((axis - static_cast<double>(el.side) * el.span_hat).norm() <
              1e-12);
        // in-plane wind magnitude is recovered along the drag direction
        const Eigen::Vector2d vp = el.v_plane;
        CHECK(std::abs(vp.norm() - el.speed) < 1e-15);
        CHECK(std::abs(std::atan2(vp.y(), vp.x()) - el.alpha) < 1e-15);
    }
}

TEST_CASE("degenerate in-plane wind zeroes the force directions") {
    BodyState s;
    WingLayout w;
    Planform pf;
    // pure spanwise flow: no in-plane component at all
    for (const auto& el : discretize_wing(s, w, pf, {0.0, 0.3, 0.0}, 2)) {
        CHECK(el.speed == 0.0);
        CHECK(el.alpha == 0.0);
        CHECK(el.lift_hat.norm() == 0.0);
        CHECK(el.drag_hat.norm() == 0.0);
        CHECK(el.u_eff == 0.3);
    }

    // and a floor kicks in when even the 3D relative wind vanishes
    for (const auto& el : discretize_wing(s, w, pf, {0.0, 0.0, 0.0}, 2)) {
        CHECK(el.u_eff == 0.05);
    }
}

TEST_CASE("station grid spans tip to tip symmetrically") {
    BodyState s = moving_state();
    WingLayout w;
    Planform pf;
    const int m = 17;
    const SpanStations st = discretize_span(s, w, pf, {-3.0, 0.0, 0.0}, m);
    REQUIRE(st.theta.size() == static_cast<size_t>(m));
    REQUIRE(st.el.size() == static_cast<size_t>(m));
    CHECK(std::abs(st.span -
                   2.0 * (w.shoulder.y() + wing_semispan_flat(w, s.qe))) <
          1e-15);
    CHECK(st.root_chord == pf.proximal_root_chord);

    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        const auto& el = st.el[k];
        total += el.ds;
        CHECK(std::abs(st.theta[k] - (k + 1) * M_PI / (m + 1)) < 1e-15);
        if (k > 0) CHECK(st.el[k - 1].y_flat > el.y_flat);
        // mirror partner: identical grid values to the last bit
        const auto& mirror = st.el[m - 1 - k];
        CHECK(el.y_flat == -mirror.y_flat);
        CHECK(el.ds == mirror.ds);
        CHECK(el.chord == mirror.chord);
        CHECK(el.chord > 0.0);
    }
    CHECK(std::abs(total - st.span) < 1e-12);

    const auto& mid = st.el[(m - 1) / 2];
    CHECK(mid.on_body);
    CHECK(mid.y_flat == 0.0);
    CHECK(mid.chord == pf.proximal_root_chord);
    CHECK_FALSE(st.el.front().on_body);
    CHECK(st.el.front().distal);
}

TEST_CASE("stations ride the correct wing segment") {
    BodyState s;
    s.qe = 0.8;
    WingLayout w;
    Planform pf;
    const double sy = w.shoulder.y(), lp = w.proximal_length;
    const SpanStations st = discretize_span(s, w, pf, {0.0, 0.0, 0.0}, 33);
    for (const auto& el : st.el) {
        const double ay = std::abs(el.y_flat);
        if (el.on_body) {
            CHECK(ay <= sy + 1e-15);
            CHECK((el.p - Eigen::Vector3d(-0.25 * el.chord, el.y_flat, 0.0))
                      .norm() < 1e-15);
            // gait columns of the velocity map are dead for the strip
            CHECK(el.J.col(kQs).norm() == 0.0);
            CHECK(el.J.col(kQe).norm() == 0.0);
        } else if (el.distal) {
            const double arc = (ay - sy - lp) / std::cos(s.qe);
            CHECK(arc >= -1e-12);
            CHECK(arc <= w.distal_length + 1e-12);
            CHECK(std::abs(el.p.z() - arc * std::sin(s.qe)) < 1e-12);
            CHECK(std::abs(el.chord - chord_at(pf, w, true, arc)) < 1e-12);
        } else {
            CHECK(std::abs(el.p.z()) < 1e-15);
            CHECK(std::abs(el.chord - chord_at(pf, w, false, ay - sy)) <
                  1e-12);
        }
    }
}

TEST_CASE("element velocity map matches a traced material point") {
    BodyState s0 = moving_state();
    WingLayout w;
    w.incidence = 0.15;
    Planform pf;
    const Eigen::Vector3d fs{-2.0, 0.1, 0.4};

    Vector8d vd;
    vd << s0.v, s0.dqs, s0.dqe, s0.w;

    // wing elements are arc-indexed, so a fixed index is a material point
    const auto els0 = discretize_wing(s0, w, pf, fs, 3);
    const double h = 1e-3;
    auto wing_at = [&](double t) { return discretize_wing(coast(s0, t), w, pf, fs, 3); };
    const auto ep = wing_at(h), em = wing_at(-h);
    const auto ep2 = wing_at(2.0 * h), em2 = wing_at(-2.0 * h);
    for (size_t i = 0; i < els0.size(); ++i) {
        const Eigen::Vector3d v_fd =
            (8.0 * (ep[i].p - em[i].p) - (ep2[i].p - em2[i].p)) / (12.0 * h);
        CHECK((els0[i].J * vd - v_fd).norm() < 1e-9);
    }

    // span stations are y-indexed; with the fold rate frozen the grid is
    // rigid in the wing and indices stay material
    BodyState sf = s0;
    sf.dqe = 0.0;
    Vector8d vf = vd;
    vf[kQe] = 0.0;
    const SpanStations st0 = discretize_span(sf, w, pf, fs, 9);
    auto span_at = [&](double t) { return discretize_span(coast(sf, t), w, pf, fs, 9); };
    const auto sp = span_at(h), sm = span_at(-h);
    const auto sp2 = span_at(2.0 * h), sm2 = span_at(-2.0 * h);
    for (size_t i = 0; i < st0.el.size(); ++i) {
        const Eigen::Vector3d v_fd =
            (8.0 * (sp.el[i].p - sm.el[i].p) - (sp2.el[i].p - sm2.el[i].p)) /
            (12.0 * h);
        CHECK((st0.el[i].J * vf - v_fd).norm() < 1e-9);
    }
}

TEST_CASE("planform validation rejects a zero chord") {
    Planform pf;
    pf.distal_tip_chord = 0.0;
    CHECK_THROWS_AS(pf.validate(), ConfigError);
}
