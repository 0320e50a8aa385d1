#include "flapsim/simulator.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "flapsim/errors.hpp"
#include "flapsim/rotation.hpp"

namespace flapsim {

namespace {

// Flat state layout driven by the classical RK4 tableau. The attitude block
// holds a local rotation vector phi with R = R0 exp(phi), R0 the rotation at
// the step start; phi integrates with the dexpinv-corrected rate.
constexpr int kP = 0, kPhi = 3, kV = 6, kW = 9;
constexpr int kIerr = 12, kLinkQ = 13, kLinkDq = 20, kZeta = 27;

Eigen::VectorXd pack(const FullState& s) {
    Eigen::VectorXd x(kZeta + s.zeta.size());
    x.segment<3>(kP) = s.body.p;
    x.segment<3>(kPhi).setZero();
    x.segment<3>(kV) = s.body.v;
    x.segment<3>(kW) = s.body.w;
    x[kIerr] = s.ierr;
    x.segment<7>(kLinkQ) = s.link.q;
    x.segment<7>(kLinkDq) = s.link.dq;
    x.tail(s.zeta.size()) = s.zeta;
    return x;
}

FullState unpack(const Eigen::VectorXd& x, const Eigen::Matrix3d& R0,
                 double t) {
    FullState s;
    s.t = t;
    s.body.p = x.segment<3>(kP);
    s.body.R = R0 * exp_so3(x.segment<3>(kPhi));
    s.body.v = x.segment<3>(kV);
    s.body.w = x.segment<3>(kW);
    s.ierr = x[kIerr];
    s.link.q = x.segment<7>(kLinkQ);
    s.link.dq = x.segment<7>(kLinkDq);
    s.zeta = x.tail(x.size() - kZeta);
    return s;
}

Eigen::VectorXd pack_rates(const SimConfig& cfg, const FullState& s,
                           const Derivative& d, const Eigen::Vector3d& phi) {
    Eigen::VectorXd xd = Eigen::VectorXd::Zero(kZeta + s.zeta.size());
    if (!cfg.tethered) {
        xd.segment<3>(kP) = s.body.v;
        xd.segment<3>(kPhi) = dexpinv(phi, s.body.w);
        xd.segment<3>(kV) = d.accel.segment<3>(kVx);
        xd.segment<3>(kW) = d.accel.segment<3>(kWx);
    }
    if (cfg.gait_mode == GaitMode::kLinkage) {
        xd[kIerr] = 2.0 * M_PI * cfg.flap_frequency - s.link.dq[kQ1];
        xd.segment<7>(kLinkQ) = s.link.dq;
        xd.segment<7>(kLinkDq) = d.link_ddq;
    }
    if (d.zeta_dot.size() > 0) xd.tail(s.zeta.size()) = d.zeta_dot;
    return xd;
}

double flap_phase(const SimConfig& cfg, const FullState& s) {
    const double cycles = cfg.gait_mode == GaitMode::kLinkage
                              ? s.link.q[kQ1] / (2.0 * M_PI)
                              : s.t * cfg.gait.frequency;
    return cycles - std::floor(cycles);
}

std::string step_context(const SimConfig& cfg, const FullState& s) {
    std::ostringstream os;
    os << " [t=" << s.t << " s, flap phase=" << flap_phase(cfg, s) << "]";
    return os.str();
}

template <class E>
[[noreturn]] void rethrow_in_context(const E& e, const SimConfig& cfg,
                                     const FullState& s) {
    throw E(e.what() + step_context(cfg, s));
}

Derivative eval(const SimConfig& cfg, const FullState& s) {
    try {
        return derivative(cfg, s);
    } catch (const AssemblyError& e) {
        rethrow_in_context(e, cfg, s);
    } catch (const SingularLinkageError& e) {
        rethrow_in_context(e, cfg, s);
    } catch (const SingularKKTError& e) {
        rethrow_in_context(e, cfg, s);
    } catch (const DegenerateFlowError& e) {
        rethrow_in_context(e, cfg, s);
    } catch (const IllConditionedError& e) {
        rethrow_in_context(e, cfg, s);
    }
}

void check_finite(const Eigen::VectorXd& x, double t) {
    struct Block {
        int off, len;
        const char* name;
    };
    const Block blocks[] = {
        {kP, 3, "body position"},        {kPhi, 3, "body orientation"},
        {kV, 3, "body velocity"},        {kW, 3, "body angular velocity"},
        {kIerr, 1, "crank integrator"},  {kLinkQ, 7, "linkage angles"},
        {kLinkDq, 7, "linkage rates"},
        {kZeta, static_cast<int>(x.size()) - kZeta, "circulation states"},
    };
    for (const Block& b : blocks) {
        if (b.len > 0 && !x.segment(b.off, b.len).allFinite()) {
            std::ostringstream os;
            os << "non-finite " << b.name << " after step at t=" << t << " s";
            throw NonFiniteStateError(os.str());
        }
    }
}

}  // namespace

MassModel default_mass_model() {
    MassModel m;
    m.proximal.mass = 5.0e-4;
    m.proximal.com_arc = 0.030;
    m.proximal.com_chord = -0.008;
    m.proximal.inertia_diag = Eigen::Vector3d(1.5e-7, 4.4e-8, 1.9e-7);
    m.distal.mass = 3.0e-4;
    m.distal.com_arc = 0.0375;
    m.distal.com_chord = -0.006;
    m.distal.inertia_diag = Eigen::Vector3d(1.4e-7, 1.1e-8, 1.5e-7);
    return m;
}

void SimConfig::validate() const {
    if (!(rho > 0.0)) throw ConfigError("air density must be positive");
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    if (!(duration >= 0.0)) throw ConfigError("duration must be non-negative");
    if (!(airspeed >= 0.0)) throw ConfigError("airspeed must be non-negative");
    if (!(u_floor > 0.0)) throw ConfigError("airspeed floor must be positive");
    if (!(flap_frequency >= 0.0))
        throw ConfigError("flap frequency must be non-negative");
    if (span_stations < 2)
        throw ConfigError("need at least two spanwise stations");
    if (elements_per_segment < 1)
        throw ConfigError("need at least one element per segment");
    if (snapshot_stride < 1)
        throw ConfigError("snapshot stride must be positive");
    planform.validate();
    mass.validate();
    wagner.validate();
    dickinson.validate();
    linkage.validate();
}

Derivative derivative(const SimConfig& cfg, const FullState& s) {
    Derivative d;

    if (cfg.gait_mode == GaitMode::kLinkage) {
        const double err = 2.0 * M_PI * cfg.flap_frequency - s.link.dq[kQ1];
        d.u_k = cfg.crank.kp * err + cfg.crank.ki * s.ierr;
        const JointAccelerations ja =
            solve_joint_accelerations(cfg.linkage, s.link.q, s.link.dq, d.u_k);
        d.link_ddq = ja.ddq;
        d.gait.qs = s.link.q[kQ5];
        d.gait.qe = s.link.q[kQ6] - s.link.q[kQ5];
        d.gait.dqs = s.link.dq[kQ5];
        d.gait.dqe = s.link.dq[kQ6] - s.link.dq[kQ5];
        d.gait.ddqs = ja.ddq[kQ5];
        d.gait.ddqe = ja.ddq[kQ6] - ja.ddq[kQ5];
        d.linkage_residual =
            constraint_residual(cfg.linkage, s.link.q).cwiseAbs().maxCoeff();
    } else {
        d.gait = cfg.gait.sample(s.t);
    }

    BodyState b = s.body;
    b.qs = d.gait.qs;
    b.qe = d.gait.qe;
    b.dqs = d.gait.dqs;
    b.dqe = d.gait.dqe;

    if (cfg.aero == AeroMode::kQuasisteady) {
        const std::vector<BladeElement> els =
            discretize_wing(b, cfg.wing, cfg.planform, cfg.freestream(),
                            cfg.elements_per_segment, cfg.u_floor);
        d.aero = quasisteady_forces(els, cfg.rho, b.p, cfg.dickinson);
        d.cl.resize(static_cast<int>(els.size()));
        for (int i = 0; i < d.cl.size(); ++i)
            d.cl[i] = dickinson_cl(els[static_cast<size_t>(i)].alpha,
                                   cfg.dickinson);
        d.zeta_dot.resize(0);
    } else {
        const SpanStations st =
            discretize_span(b, cfg.wing, cfg.planform, cfg.freestream(),
                            cfg.span_stations, cfg.u_floor);
        const double U = cfg.airspeed_scale();
        d.aero = unsteady_forces(st, cfg.wagner, s.zeta, cfg.rho, U, b.p,
                                 cfg.dickinson);
        d.zeta_dot = zeta_rates(st, cfg.wagner, s.zeta, U);
        const int m = cfg.span_stations;
        const Eigen::VectorXd a = s.zeta.segment(0, m);
        const Eigen::VectorXd w = total_downwash(st, cfg.wagner, a, U);
        d.gamma = circulation_at_stations(st, cfg.wagner, a, U);
        d.cl.resize(m);
        d.te.resize(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k) {
            // Referenced to U, so lift_k = 1/2 rho U^2 cl_k c ds exactly.
            d.cl[k] = sectional_cl(w[k], s.zeta[m + k], s.zeta[2 * m + k], U,
                                   cfg.wagner);
            d.te[static_cast<size_t>(k)] = st.el[static_cast<size_t>(k)].p_te;
        }
    }

    const Eigen::Vector2d y(d.gait.ddqs, d.gait.ddqe);
    if (cfg.tethered) {
        // The mount carries the body; the gait still moves the wing.
        d.accel.setZero();
        d.accel[kQs] = y[0];
        d.accel[kQe] = y[1];
    } else {
        const Matrix8d M = mass_matrix(cfg.mass, cfg.wing, b);
        const Vector8d h = bias_forces(cfg.mass, cfg.wing, b);
        const ConstrainedAccel ca = solve_constrained(M, h, d.aero.u, y);
        d.accel = ca.a;
        d.lambda = ca.lambda;
    }
    d.constraint_residual = std::max(std::abs(d.accel[kQs] - y[0]),
                                     std::abs(d.accel[kQe] - y[1]));
    return d;
}

StepResult rk4_step(const SimConfig& cfg, const FullState& s, double dt) {
    const Eigen::Matrix3d R0 = s.body.R;
    const Eigen::VectorXd x0 = pack(s);

    const Derivative d1 = eval(cfg, s);
    const Eigen::VectorXd k1 = pack_rates(cfg, s, d1, Eigen::Vector3d::Zero());

    const auto stage = [&](const Eigen::VectorXd& x, double t) {
        const FullState si = unpack(x, R0, t);
        const Derivative di = eval(cfg, si);
        return pack_rates(cfg, si, di, x.segment<3>(kPhi));
    };
    const Eigen::VectorXd k2 = stage(x0 + 0.5 * dt * k1, s.t + 0.5 * dt);
    const Eigen::VectorXd k3 = stage(x0 + 0.5 * dt * k2, s.t + 0.5 * dt);
    const Eigen::VectorXd k4 = stage(x0 + dt * k3, s.t + dt);

    const Eigen::VectorXd x1 =
        x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_finite(x1, s.t);

    StepResult r{unpack(x1, R0, s.t + dt), d1};
    if (cfg.gait_mode == GaitMode::kLinkage) {
        const double gap =
            constraint_residual(cfg.linkage, r.next.link.q).cwiseAbs().maxCoeff();
        if (gap > cfg.linkage.projection_tol) {
            project_positions(cfg.linkage, r.next.link.q);
            project_velocities(cfg.linkage, r.next.link.q, r.next.link.dq);
        }
    }
    return r;
}

FullState initial_state(const SimConfig& cfg) {
    FullState s;
    s.zeta = Eigen::VectorXd::Zero(
        cfg.aero == AeroMode::kWagner ? 3 * cfg.span_stations : 0);
    if (cfg.gait_mode == GaitMode::kLinkage) {
        s.link.q = assemble(cfg.linkage, 0.0, cfg.linkage.reference_q);
        s.link.dq.setZero();
        s.link.dq[kQ1] = 2.0 * M_PI * cfg.flap_frequency;
        project_velocities(cfg.linkage, s.link.q, s.link.dq);
    }
    return s;
}

SimResult run(const SimConfig& cfg) {
    cfg.validate();
    SimResult out;
    out.record.dt = cfg.dt;
    out.record.stations =
        cfg.aero == AeroMode::kWagner ? cfg.span_stations : 0;

    FullState s = initial_state(cfg);
    const long steps = std::lround(cfg.duration / cfg.dt);
    out.record.samples.reserve(static_cast<size_t>(steps));
    for (long i = 0; i < steps; ++i) {
        s.t = static_cast<double>(i) * cfg.dt;  // no accumulation drift
        const StepResult r = rk4_step(cfg, s, cfg.dt);

        ForceSample fs;
        fs.t = s.t;
        fs.force = r.start.aero.force;
        fs.moment = r.start.aero.moment;
        fs.linkage_residual = r.start.linkage_residual;
        fs.constraint_residual = r.start.constraint_residual;
        if (!fs.force.allFinite() || !fs.moment.allFinite()) {
            std::ostringstream os;
            os << "non-finite aerodynamic load at t=" << s.t << " s";
            throw NonFiniteStateError(os.str());
        }
        out.record.samples.push_back(fs);

        if (i % cfg.snapshot_stride == 0)
            out.record.snapshots.push_back(
                {s.t, s.zeta, r.start.gamma, r.start.cl, r.start.te});
        s = r.next;
    }
    out.final_state = s;
    return out;
}

}  // namespace flapsim
