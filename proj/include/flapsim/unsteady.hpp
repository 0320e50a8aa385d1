#pragma once

#include <vector>

#include <Eigen/Dense>

#include "flapsim/planform.hpp"
#include "flapsim/quasisteady.hpp"

namespace flapsim {

// Jones' two-exponential fit of the Wagner indicial lift function plus the
// section lift-curve slope.
struct WagnerConstants {
    double psi1 = 0.165, psi2 = 0.335;
    double eps1 = 0.0455, eps2 = 0.3;
    double a0 = 2.0 * M_PI;  // 1/rad

    // Phi(0) = 1 - psi1 - psi2 (= 0.5 for Jones' values).
    double phi0() const { return 1.0 - psi1 - psi2; }
    void validate() const;  // throws ConfigError
};

// Phi(t_norm) = 1 - psi1 exp(-eps1 t) - psi2 exp(-eps2 t), t in half-chords
// of travel.
double wagner_phi(double t_norm, const WagnerConstants& wc = {});

// Lag-state unit: zdot_i = (psi_i eps_i u/b) w - (eps_i u/b) z_i, whose fixed
// point under constant w is z_i = psi_i w. Throws DegenerateFlowError when
// u <= 0.
void lag_rates(double w, double z1, double z2, double u, double b,
               const WagnerConstants& wc, double& dz1, double& dz2);

// C_L = (a0/u)(w phi0 + z1 + z2).
double sectional_cl(double w, double z1, double z2, double u,
                    const WagnerConstants& wc = {});

// Bound circulation at span position y from the Fourier coefficients:
// Gamma = 1/2 a0 c0 U sum a_n sin(n theta(y)), zero at the tips.
double circulation(const SpanStations& st, const WagnerConstants& wc,
                   const Eigen::VectorXd& a, double U, double y);

// Same series evaluated at every collocation station.
Eigen::VectorXd circulation_at_stations(const SpanStations& st,
                                        const WagnerConstants& wc,
                                        const Eigen::VectorXd& a, double U);

// Downwash induced by the trailing vorticity at each station:
// w_y = -(a0 c0 U)/(4S) sum n a_n sin(n theta)/sin(theta).
Eigen::VectorXd induced_downwash(const SpanStations& st,
                                 const WagnerConstants& wc,
                                 const Eigen::VectorXd& a, double U);

// Kinematic normal velocity per station (relative wind onto the top normal).
Eigen::VectorXd normal_velocities(const SpanStations& st);

// v_n + w_y.
Eigen::VectorXd total_downwash(const SpanStations& st,
                               const WagnerConstants& wc,
                               const Eigen::VectorXd& a, double U);

// Solves the collocation system equating the series form of the sectional
// lift with its downwash/lag form for the coefficient rates:
//   c0 (SIN adot)_k = phi0 w_k + z1_k + z2_k - U (c0/c_k) (SIN a)_k,
// SIN[k][n] = sin(n theta_k). Throws IllConditionedError when the system
// condition estimate exceeds 1e10.
Eigen::VectorXd fourier_rates(const SpanStations& st,
                              const WagnerConstants& wc,
                              const Eigen::VectorXd& a,
                              const Eigen::VectorXd& z1,
                              const Eigen::VectorXd& z2,
                              const Eigen::VectorXd& v_n, double U);

// Unsteady state layout: zeta = [a_n | z1 | z2], three blocks of m.
inline int station_count(const Eigen::VectorXd& zeta) {
    return static_cast<int>(zeta.size()) / 3;
}

// Full zeta' for the current geometry. Lag terms use each station's floored
// relative-wind magnitude; series terms use the global airspeed scale U.
Eigen::VectorXd zeta_rates(const SpanStations& st, const WagnerConstants& wc,
                           const Eigen::VectorXd& zeta, double U);

// Generalized aerodynamic force: per-station lift from the unsteady
// sectional C_L (referenced to U), drag from the quasi-steady coefficient at
// the station's instantaneous angle of attack. Affine in zeta at frozen
// geometry. moment about `about`, inertial frame.
AeroTotals unsteady_forces(const SpanStations& st, const WagnerConstants& wc,
                           const Eigen::VectorXd& zeta, double rho, double U,
                           const Eigen::Vector3d& about,
                           const DickinsonCoeffs& dc = {});

}  // namespace flapsim
