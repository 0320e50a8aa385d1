#include <cmath>
#include <vector>

#include <doctest.h>

#include "flapsim/errors.hpp"
#include "flapsim/simulator.hpp"

using namespace flapsim;

namespace {

SimConfig base_config() {
    SimConfig cfg;
    cfg.gait_mode = GaitMode::kPrescribed;
    cfg.span_stations = 8;
    cfg.elements_per_segment = 4;
    return cfg;
}

// Steady lifting-line fixed point of the circulation dynamics on the given
// stations: adot = 0 collapses the collocation system onto the monoplane
// equation, zdot = 0 pins the lag states at psi_i w.
double steady_lift_z(const SpanStations& st, const WagnerConstants& wc,
                     double rho, double U) {
    const int m = static_cast<int>(st.theta.size());
    Eigen::MatrixXd A(m, m);
    Eigen::VectorXd vn = normal_velocities(st);
    for (int k = 0; k < m; ++k) {
        const double th = st.theta[static_cast<size_t>(k)];
        const double ck = st.el[static_cast<size_t>(k)].chord;
        for (int n = 1; n <= m; ++n)
            A(k, n - 1) = U * (st.root_chord / ck) * std::sin(n * th) +
                          wc.a0 * st.root_chord * U / (4.0 * st.span) * n *
                              std::sin(n * th) / std::sin(th);
    }
    const Eigen::VectorXd a = A.partialPivLu().solve(vn);
    const Eigen::VectorXd w = vn + induced_downwash(st, wc, a, U);
    Eigen::VectorXd zeta(3 * m);
    zeta << a, wc.psi1 * w, wc.psi2 * w;
    return unsteady_forces(st, wc, zeta, rho, U, Eigen::Vector3d::Zero())
        .force.z();
}

}  // namespace

TEST_CASE("hover with a frozen gait and no gravity is an equilibrium") {
    SimConfig cfg = base_config();
    cfg.tethered = false;
    cfg.airspeed = 0.0;
    cfg.mass.gravity.setZero();
    cfg.gait.amp_s = cfg.gait.amp_e = 0.0;

    const FullState s = initial_state(cfg);
    const Derivative d = derivative(cfg, s);
    CHECK(d.accel.norm() == 0.0);
    CHECK(d.aero.force.norm() == 0.0);
    CHECK(d.aero.u.norm() == 0.0);
    CHECK(d.zeta_dot.norm() == 0.0);

    // Zero dynamics must leave the state bit-identical.
    const StepResult r = rk4_step(cfg, s, cfg.dt);
    CHECK(r.next.body.p == s.body.p);
    CHECK(r.next.body.R == s.body.R);
    CHECK(r.next.body.v == s.body.v);
    CHECK(r.next.body.w == s.body.w);
    CHECK(r.next.zeta == s.zeta);
}

TEST_CASE("tether changes the dynamics, never the reported aerodynamics") {
    SimConfig tethered = base_config();
    SimConfig free_cfg = tethered;
    free_cfg.tethered = false;

    FullState s = initial_state(free_cfg);
    s.t = 0.03;  // mid-stroke: nonzero gait rates
    for (int i = 0; i < s.zeta.size(); ++i)
        s.zeta[i] = 0.01 * std::sin(3.0 * i + 0.4);

    const Derivative dt_ = derivative(tethered, s);
    const Derivative df = derivative(free_cfg, s);
    CHECK(dt_.aero.force == df.aero.force);
    CHECK(dt_.aero.moment == df.aero.moment);
    CHECK(dt_.aero.u == df.aero.u);
    CHECK(dt_.zeta_dot == df.zeta_dot);

    // Tethered: body rows clamped, gait accelerations passed through.
    CHECK(dt_.accel.segment<3>(kVx).norm() == 0.0);
    CHECK(dt_.accel.segment<3>(kWx).norm() == 0.0);
    CHECK(dt_.accel[kQs] == dt_.gait.ddqs);
    CHECK(dt_.accel[kQe] == dt_.gait.ddqe);
    CHECK(dt_.constraint_residual == 0.0);

    // Free: the KKT solve honours the same gait constraint.
    CHECK(df.constraint_residual < 1e-10);
    CHECK(df.accel.segment<3>(kVx).norm() > 0.0);
}

TEST_CASE("integrator order on the frozen-geometry circulation subsystem") {
    SimConfig cfg = base_config();
    cfg.gait.amp_s = cfg.gait.amp_e = 0.0;
    cfg.wing.incidence = 4.0 * M_PI / 180.0;
    cfg.airspeed = 3.0;
    cfg.duration = 0.02;
    cfg.snapshot_stride = 1000000;

    auto endpoint = [&](double dt) {
        SimConfig c = cfg;
        c.dt = dt;
        return run(c).final_state.zeta;
    };
    const Eigen::VectorXd ref = endpoint(1e-5);
    std::vector<double> err;
    for (double dt : {4e-4, 2e-4, 1e-4, 5e-5})
        err.push_back((endpoint(dt) - ref).norm());

    for (size_t i = 0; i + 1 < err.size(); ++i) {
        const double ratio = err[i] / err[i + 1];
        CHECK(ratio > 12.0);
        CHECK(ratio < 20.0);
    }
}

TEST_CASE("identical configurations give bit-identical records") {
    SimConfig cfg = base_config();
    cfg.gait_mode = GaitMode::kLinkage;
    cfg.duration = 0.05;
    cfg.snapshot_stride = 10;

    const SimResult a = run(cfg);
    const SimResult b = run(cfg);
    REQUIRE(a.record.samples.size() == b.record.samples.size());
    for (size_t i = 0; i < a.record.samples.size(); ++i) {
        CHECK(a.record.samples[i].force == b.record.samples[i].force);
        CHECK(a.record.samples[i].moment == b.record.samples[i].moment);
    }
    REQUIRE(a.record.snapshots.size() == b.record.snapshots.size());
    for (size_t i = 0; i < a.record.snapshots.size(); ++i)
        CHECK(a.record.snapshots[i].zeta == b.record.snapshots[i].zeta);
    CHECK(a.final_state.zeta == b.final_state.zeta);
    CHECK(a.final_state.link.q == b.final_state.link.q);
}

TEST_CASE("zero duration yields an empty record without error") {
    SimConfig cfg = base_config();
    cfg.duration = 0.0;
    const SimResult r = run(cfg);
    CHECK(r.record.samples.empty());
    CHECK(r.record.snapshots.empty());
    CHECK(r.final_state.t == 0.0);
}

TEST_CASE("linkage-driven run keeps both constraint residuals tiny") {
    SimConfig cfg = base_config();
    cfg.gait_mode = GaitMode::kLinkage;
    cfg.span_stations = 8;
    cfg.duration = 0.25;

    const SimResult r = run(cfg);
    double max_loop = 0.0, max_acc = 0.0;
    for (const ForceSample& fs : r.record.samples) {
        max_loop = std::max(max_loop, fs.linkage_residual);
        max_acc = std::max(max_acc, fs.constraint_residual);
    }
    CHECK(max_loop < 1e-8);
    CHECK(max_acc < 1e-8);
    // Crank started on target, so the speed controller never acts.
    CHECK(r.final_state.link.dq[kQ1]
          == doctest::Approx(2.0 * M_PI * cfg.flap_frequency).epsilon(1e-12));
}

TEST_CASE("crank speed controller recovers from a cold start") {
    SimConfig cfg = base_config();
    cfg.gait_mode = GaitMode::kLinkage;

    FullState s = initial_state(cfg);
    s.link.dq.setZero();
    project_velocities(cfg.linkage, s.link.q, s.link.dq);

    const double target = 2.0 * M_PI * cfg.flap_frequency;
    for (int i = 0; i < 4000; ++i) {
        s.t = i * cfg.dt;
        s = rk4_step(cfg, s, cfg.dt).next;
    }
    CHECK(std::abs(s.link.dq[kQ1] - target) < 0.01 * target);
}

TEST_CASE("symmetric gait in head-on flow sheds no side force or roll") {
    for (AeroMode mode : {AeroMode::kQuasisteady, AeroMode::kWagner}) {
        SimConfig cfg = base_config();
        cfg.aero = mode;
        cfg.duration = 0.3;
        const SimResult r = run(cfg);
        for (const ForceSample& fs : r.record.samples) {
            CHECK(std::abs(fs.force.y()) < 1e-10);
            CHECK(std::abs(fs.moment.x()) < 1e-10);
        }
    }
}

TEST_CASE("tethered flapping settles into a periodic cycle") {
    SimConfig cfg = base_config();
    cfg.dt = 1.0 / (4.5 * 800);  // 800 steps per cycle
    cfg.duration = 7.0 / 4.5;
    cfg.snapshot_stride = 1000000;

    const SimResult r = run(cfg);
    REQUIRE(r.record.samples.size() == 5600);
    auto cycle_mean = [&](int c) {
        double sum = 0.0;
        for (int i = 800 * c; i < 800 * (c + 1); ++i)
            sum += r.record.samples[static_cast<size_t>(i)].force.z();
        return sum / 800.0;
    };
    double scale = 0.0;
    for (int i = 4800; i < 5600; ++i)
        scale += std::abs(r.record.samples[static_cast<size_t>(i)].force.z());
    scale /= 800.0;
    CHECK(std::abs(cycle_mean(5) - cycle_mean(6)) < 0.005 * scale);
}

TEST_CASE("with the gait frozen the lift converges to the steady solution") {
    SimConfig cfg = base_config();
    cfg.gait.amp_s = cfg.gait.amp_e = 0.0;
    cfg.wing.incidence = 4.0 * M_PI / 180.0;
    cfg.airspeed = 3.0;
    cfg.duration = 0.8;
    cfg.snapshot_stride = 1000000;

    const SimResult r = run(cfg);
    const double lift = r.record.samples.back().force.z();

    const GaitSample g = cfg.gait.sample(0.0);
    BodyState b;
    b.qs = g.qs;
    b.qe = g.qe;
    const SpanStations st =
        discretize_span(b, cfg.wing, cfg.planform, cfg.freestream(),
                        cfg.span_stations, cfg.u_floor);
    const double steady = steady_lift_z(st, cfg.wagner, cfg.rho, cfg.airspeed);
    CHECK(lift == doctest::Approx(steady).epsilon(0.02));
}

TEST_CASE("slow flapping reproduces the quasi-static lifting-line limit") {
    // Reduced frequency below 0.005 for every chord in the planform.
    SimConfig cfg = base_config();
    cfg.gait.frequency = 0.12;
    cfg.wing.incidence = 5.0 * M_PI / 180.0;
    cfg.airspeed = 3.0;
    const int per_cycle = 26000, lead = 2000;
    cfg.dt = (1.0 / cfg.gait.frequency) / per_cycle;
    cfg.duration = (per_cycle + lead) * cfg.dt;
    cfg.snapshot_stride = 1000000;

    const SimResult r = run(cfg);
    REQUIRE(static_cast<int>(r.record.samples.size()) == per_cycle + lead);

    double marched = 0.0, quasi = 0.0;
    for (int i = lead; i < per_cycle + lead; ++i) {
        const ForceSample& fs = r.record.samples[static_cast<size_t>(i)];
        marched += fs.force.z();
        const GaitSample g = cfg.gait.sample(fs.t);
        BodyState b;
        b.qs = g.qs;
        b.qe = g.qe;
        b.dqs = g.dqs;
        b.dqe = g.dqe;
        const SpanStations st =
            discretize_span(b, cfg.wing, cfg.planform, cfg.freestream(),
                            cfg.span_stations, cfg.u_floor);
        quasi += steady_lift_z(st, cfg.wagner, cfg.rho, cfg.airspeed);
    }
    marched /= per_cycle;
    quasi /= per_cycle;
    CHECK(std::abs(marched - quasi) < 0.03 * std::abs(quasi));
}

TEST_CASE("lift spectrum peaks at the flap frequency") {
    SimConfig cfg = base_config();
    cfg.duration = 2.0;
    cfg.snapshot_stride = 1000000;
    const SimResult r = run(cfg);

    const int n = static_cast<int>(r.record.samples.size());
    double mean = 0.0;
    for (const ForceSample& fs : r.record.samples) mean += fs.force.z();
    mean /= n;

    // Naive DFT up to 50 Hz; bins are 0.5 Hz apart for the 2 s window.
    double best_f = 0.0, best_mag = -1.0;
    for (int k = 1; k <= 100; ++k) {
        const double f = k / cfg.duration;
        double re = 0.0, im = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x =
                r.record.samples[static_cast<size_t>(i)].force.z() - mean;
            re += x * std::cos(2.0 * M_PI * f * i * cfg.dt);
            im += x * std::sin(2.0 * M_PI * f * i * cfg.dt);
        }
        const double mag = re * re + im * im;
        if (mag > best_mag) {
            best_mag = mag;
            best_f = f;
        }
    }
    CHECK(std::abs(best_f - cfg.gait.frequency) <= 0.5 + 1e-12);
}

TEST_CASE("a poisoned state names the block that went non-finite") {
    SimConfig cfg = base_config();
    FullState s = initial_state(cfg);
    s.zeta[0] = std::numeric_limits<double>::quiet_NaN();
    try {
        rk4_step(cfg, s, cfg.dt);
        FAIL("expected NonFiniteStateError");
    } catch (const NonFiniteStateError& e) {
        CHECK(std::string(e.what()).find("circulation states")
              != std::string::npos);
    }
}

TEST_CASE("config validation rejects nonsense") {
    SimConfig cfg = base_config();
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = base_config();
    cfg.span_stations = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = base_config();
    cfg.rho = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
