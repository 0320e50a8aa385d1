#include "flapsim/quasisteady.hpp"

#include <cmath>
#include <numbers>

#include "flapsim/errors.hpp"

namespace flapsim {

namespace {
constexpr double kDeg = 180.0 / std::numbers::pi;
}

void DickinsonCoeffs::validate() const {
    if (!(cl_freq > 0.0) || !(cd_freq > 0.0)) {
        throw ConfigError("coefficient angle scales must be positive");
    }
}

double dickinson_cl(double alpha, const DickinsonCoeffs& c) {
    const double a = alpha * kDeg;
    return c.cl0 + c.cl_amp * std::sin((c.cl_freq * a - c.cl_phase) /
                                       kDeg);
}

double dickinson_cd(double alpha, const DickinsonCoeffs& c) {
    const double a = alpha * kDeg;
    return c.cd0 - c.cd_amp * std::cos((c.cd_freq * a - c.cd_phase) /
                                       kDeg);
}

Eigen::Vector3d element_force(const BladeElement& el, double rho, double cl,
                              double cd) {
    const double q = 0.5 * rho * el.speed * el.speed * el.chord * el.ds;
    return q * (cl * el.lift_hat + cd * el.drag_hat);
}

Vector8d generalized_force(const BladeElement& el, const Eigen::Vector3d& f) {
    return el.J.transpose() * f;
}

AeroTotals quasisteady_forces(const std::vector<BladeElement>& els, double rho,
                              const Eigen::Vector3d& about,
                              const DickinsonCoeffs& c) {
    AeroTotals t;
    for (const BladeElement& el : els) {
        const Eigen::Vector3d f = element_force(
            el, rho, dickinson_cl(el.alpha, c), dickinson_cd(el.alpha, c));
        t.u += generalized_force(el, f);
        t.force += f;
        t.moment += (el.p - about).cross(f);
    }
    return t;
}

}  // namespace flapsim
