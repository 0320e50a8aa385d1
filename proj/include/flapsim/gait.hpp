#pragma once

#include <cmath>

#include "flapsim/linkage.hpp"

namespace flapsim {

// Sinusoidal shoulder/elbow trajectory used when no linkage drives the wing.
// qs(t) = mean_s + amp_s sin(2 pi f t)
// qe(t) = mean_e + amp_e sin(2 pi f t + phase_e)
// phase_e = -pi/2 folds the elbow during the upstroke half of the cycle.
struct PrescribedGait {
    double frequency = 4.5;   // Hz
    double amp_s = 0.4538;    // rad (26 deg)
    double mean_s = 0.0698;   // rad (4 deg)
    double amp_e = 0.3840;    // rad (22 deg)
    double mean_e = -0.3840;  // rad (-22 deg): extended at top, folded at -44
    double phase_e = -M_PI_2;

    GaitSample sample(double t) const {
        const double om = 2.0 * M_PI * frequency;
        GaitSample g;
        g.qs = mean_s + amp_s * std::sin(om * t);
        g.dqs = amp_s * om * std::cos(om * t);
        g.ddqs = -amp_s * om * om * std::sin(om * t);
        g.qe = mean_e + amp_e * std::sin(om * t + phase_e);
        g.dqe = amp_e * om * std::cos(om * t + phase_e);
        g.ddqe = -amp_e * om * om * std::sin(om * t + phase_e);
        return g;
    }
};

}  // namespace flapsim
