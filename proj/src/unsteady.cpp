#include "flapsim/unsteady.hpp"

#include <algorithm>
#include <cmath>

#include "flapsim/errors.hpp"

namespace flapsim {

void WagnerConstants::validate() const {
    if (!(a0 > 0.0)) throw ConfigError("lift-curve slope must be positive");
    if (!(psi1 >= 0.0) || !(psi2 >= 0.0) || !(eps1 > 0.0) || !(eps2 > 0.0)) {
        throw ConfigError("indicial-lag constants must be nonnegative with "
                          "positive decay rates");
    }
    if (!(phi0() > 0.0)) throw ConfigError("indicial weights must sum below 1");
}

double wagner_phi(double t_norm, const WagnerConstants& wc) {
    return 1.0 - wc.psi1 * std::exp(-wc.eps1 * t_norm) -
           wc.psi2 * std::exp(-wc.eps2 * t_norm);
}

void lag_rates(double w, double z1, double z2, double u, double b,
               const WagnerConstants& wc, double& dz1, double& dz2) {
    if (!(u > 0.0)) {
        throw DegenerateFlowError("zero airspeed in lag dynamics; configure "
                                  "a positive airspeed floor");
    }
    const double r = u / b;
    dz1 = wc.psi1 * wc.eps1 * r * w - wc.eps1 * r * z1;
    dz2 = wc.psi2 * wc.eps2 * r * w - wc.eps2 * r * z2;
}

double sectional_cl(double w, double z1, double z2, double u,
                    const WagnerConstants& wc) {
    return wc.a0 / u * (w * wc.phi0() + z1 + z2);
}

namespace {

// sin(n theta) for n = 1..m at each station; the collocation matrix.
Eigen::MatrixXd sin_matrix(const SpanStations& st) {
    const int m = static_cast<int>(st.theta.size());
    Eigen::MatrixXd S(m, m);
    for (int k = 0; k < m; ++k) {
        for (int n = 1; n <= m; ++n) {
            S(k, n - 1) = std::sin(n * st.theta[static_cast<size_t>(k)]);
        }
    }
    return S;
}

}  // namespace

double circulation(const SpanStations& st, const WagnerConstants& wc,
                   const Eigen::VectorXd& a, double U, double y) {
    const double c = std::clamp(2.0 * y / st.span, -1.0, 1.0);
    const double theta = std::acos(c);
    double s = 0.0;
    for (int n = 1; n <= a.size(); ++n) s += a[n - 1] * std::sin(n * theta);
    return 0.5 * wc.a0 * st.root_chord * U * s;
}

Eigen::VectorXd circulation_at_stations(const SpanStations& st,
                                        const WagnerConstants& wc,
                                        const Eigen::VectorXd& a, double U) {
    return 0.5 * wc.a0 * st.root_chord * U * (sin_matrix(st) * a);
}

Eigen::VectorXd induced_downwash(const SpanStations& st,
                                 const WagnerConstants& wc,
                                 const Eigen::VectorXd& a, double U) {
    const int m = static_cast<int>(st.theta.size());
    Eigen::VectorXd w(m);
    const double scale = -wc.a0 * st.root_chord * U / (4.0 * st.span);
    for (int k = 0; k < m; ++k) {
        const double th = st.theta[static_cast<size_t>(k)];
        double s = 0.0;
        for (int n = 1; n <= m; ++n) s += n * a[n - 1] * std::sin(n * th);
        w[k] = scale * s / std::sin(th);
    }
    return w;
}

Eigen::VectorXd normal_velocities(const SpanStations& st) {
    const int m = static_cast<int>(st.el.size());
    Eigen::VectorXd v(m);
    for (int k = 0; k < m; ++k) v[k] = st.el[static_cast<size_t>(k)].v_plane.y();
    return v;
}

Eigen::VectorXd total_downwash(const SpanStations& st,
                               const WagnerConstants& wc,
                               const Eigen::VectorXd& a, double U) {
    return normal_velocities(st) + induced_downwash(st, wc, a, U);
}

Eigen::VectorXd fourier_rates(const SpanStations& st,
                              const WagnerConstants& wc,
                              const Eigen::VectorXd& a,
                              const Eigen::VectorXd& z1,
                              const Eigen::VectorXd& z2,
                              const Eigen::VectorXd& v_n, double U) {
    const int m = static_cast<int>(st.theta.size());
    const Eigen::MatrixXd S = sin_matrix(st);
    const Eigen::VectorXd w =
        v_n + induced_downwash(st, wc, a, U);

    Eigen::VectorXd rhs = wc.phi0() * w + z1 + z2;
    const Eigen::VectorXd Sa = S * a;
    for (int k = 0; k < m; ++k) {
        rhs[k] -= U * st.root_chord / st.el[static_cast<size_t>(k)].chord *
                  Sa[k];
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(st.root_chord * S);
    if (!(lu.rcond() > 1e-10)) {
        throw IllConditionedError("spanwise collocation system is too ill "
                                  "conditioned to invert");
    }
    return lu.solve(rhs);
}

Eigen::VectorXd zeta_rates(const SpanStations& st, const WagnerConstants& wc,
                           const Eigen::VectorXd& zeta, double U) {
    const int m = station_count(zeta);
    const Eigen::VectorXd a = zeta.segment(0, m);
    const Eigen::VectorXd z1 = zeta.segment(m, m);
    const Eigen::VectorXd z2 = zeta.segment(2 * m, m);

    const Eigen::VectorXd v_n = normal_velocities(st);
    const Eigen::VectorXd w = v_n + induced_downwash(st, wc, a, U);

    Eigen::VectorXd dz(3 * m);
    dz.segment(0, m) = fourier_rates(st, wc, a, z1, z2, v_n, U);
    for (int k = 0; k < m; ++k) {
        const BladeElement& el = st.el[static_cast<size_t>(k)];
        double d1, d2;
        lag_rates(w[k], z1[k], z2[k], el.u_eff, 0.5 * el.chord, wc, d1, d2);
        dz[m + k] = d1;
        dz[2 * m + k] = d2;
    }
    return dz;
}

AeroTotals unsteady_forces(const SpanStations& st, const WagnerConstants& wc,
                           const Eigen::VectorXd& zeta, double rho, double U,
                           const Eigen::Vector3d& about,
                           const DickinsonCoeffs& dc) {
    const int m = station_count(zeta);
    const Eigen::VectorXd a = zeta.segment(0, m);
    const Eigen::VectorXd z1 = zeta.segment(m, m);
    const Eigen::VectorXd z2 = zeta.segment(2 * m, m);
    const Eigen::VectorXd w = total_downwash(st, wc, a, U);

    AeroTotals t;
    for (int k = 0; k < m; ++k) {
        const BladeElement& el = st.el[static_cast<size_t>(k)];
        // 1/2 rho U^2 C_L with C_L = (a0/U)(w phi0 + z1 + z2); the U cancel
        // keeps the expression finite for any floored U.
        const double lift = 0.5 * rho * U * wc.a0 *
                            (w[k] * wc.phi0() + z1[k] + z2[k]) * el.chord *
                            el.ds;
        const double drag = 0.5 * rho * el.speed * el.speed *
                            dickinson_cd(el.alpha, dc) * el.chord * el.ds;
        const Eigen::Vector3d f = lift * el.lift_hat + drag * el.drag_hat;
        t.u += generalized_force(el, f);
        t.force += f;
        t.moment += (el.p - about).cross(f);
    }
    return t;
}

}  // namespace flapsim
