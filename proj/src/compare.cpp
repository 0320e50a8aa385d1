#include "flapsim/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flapsim/errors.hpp"

namespace flapsim {
namespace {

// Linear interpolation with an exact-sample fast path, so resampling onto a
// grid that reproduces the original stamps returns the original values bit
// for bit.
double interp(const std::vector<double>& tv, const std::vector<double>& xv,
              double t) {
    if (t <= tv.front()) return xv.front();
    if (t >= tv.back()) return xv.back();
    const auto it = std::upper_bound(tv.begin(), tv.end(), t);
    const size_t i = static_cast<size_t>(it - tv.begin());
    if (tv[i - 1] == t) return xv[i - 1];
    const double w = (t - tv[i - 1]) / (tv[i] - tv[i - 1]);
    return xv[i - 1] + w * (xv[i] - xv[i - 1]);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b,
               int ia, int ib, int n) {
    double ma = 0.0;
    double mb = 0.0;
    for (int i = 0; i < n; ++i) {
        ma += a[ia + i];
        mb += b[ib + i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (int i = 0; i < n; ++i) {
        const double da = a[ia + i] - ma;
        const double db = b[ib + i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return -std::numeric_limits<double>::infinity();
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

double alignment_lag(const std::vector<double>& a, const std::vector<double>& b,
                     double dt, int max_lag) {
    const int n = static_cast<int>(std::min(a.size(), b.size()));
    int best_lag = 0;
    double best_corr = -std::numeric_limits<double>::infinity();
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        const int ia = std::max(0, -lag);
        const int ib = std::max(0, lag);
        const int len = n - std::abs(lag);
        if (len < 2) continue;
        const double c = pearson(a, b, ia, ib, len);
        const bool better =
            c > best_corr ||
            (c == best_corr && (std::abs(lag) < std::abs(best_lag) ||
                                (std::abs(lag) == std::abs(best_lag) && lag < best_lag)));
        if (better) {
            best_corr = c;
            best_lag = lag;
        }
    }
    return best_lag * dt;
}

ComparisonReport compare(const ForceRecord& rec, const LoadCellTrace& trace,
                         double flap_frequency) {
    if (!(flap_frequency > 0.0))
        throw ConfigError("comparison needs a positive flap frequency");
    if (rec.samples.size() < 2)
        throw InsufficientOverlapError("force record holds fewer than two samples");
    if (trace.size() < 2)
        throw InsufficientOverlapError("load-cell trace holds fewer than two samples");

    const double period = 1.0 / flap_frequency;

    // Each series on its own clock, rebased to start at zero.
    const int ns = static_cast<int>(rec.samples.size());
    std::vector<double> st(ns);
    std::vector<double> s_lift(ns);
    std::vector<double> s_drag(ns);
    const double st0 = rec.samples.front().t;
    for (int i = 0; i < ns; ++i) {
        st[i] = rec.samples[i].t - st0;
        s_lift[i] = rec.samples[i].force.z();
        s_drag[i] = -rec.samples[i].force.x();
    }

    const int nm = trace.size();
    std::vector<double> mt(nm);
    std::vector<double> m_lift(nm);
    std::vector<double> m_drag(nm);
    const double mt0 = trace.t.front();
    for (int i = 0; i < nm; ++i) {
        mt[i] = trace.t[i] - mt0;
        m_lift[i] = trace.force(i, 0);
        m_drag[i] = trace.force(i, 2);
    }

    const double overlap = std::min(st.back(), mt.back());
    if (overlap < 2.0 * period)
        throw InsufficientOverlapError(
            "record and trace overlap for " + std::to_string(overlap) +
            " s, need at least two flap periods (" + std::to_string(2.0 * period) +
            " s)");

    std::vector<double> dts(nm - 1);
    for (int i = 0; i + 1 < nm; ++i) dts[i] = mt[i + 1] - mt[i];
    std::nth_element(dts.begin(), dts.begin() + (nm - 1) / 2, dts.end());
    double dt_c = std::max(rec.dt, dts[(nm - 1) / 2]);
    // Snap to the record step when the trace was sampled at the same rate,
    // keeping resampling exact for traces exported from a record.
    if (std::abs(dt_c - rec.dt) < 1e-9 * rec.dt) dt_c = rec.dt;

    const int K = static_cast<int>(std::floor(overlap / dt_c + 1e-9)) + 1;
    std::vector<double> a_lift(K);
    std::vector<double> a_drag(K);
    std::vector<double> b_lift(K);
    std::vector<double> b_drag(K);
    for (int k = 0; k < K; ++k) {
        const double t = k * dt_c;
        a_lift[k] = interp(st, s_lift, t);
        a_drag[k] = interp(st, s_drag, t);
        b_lift[k] = interp(mt, m_lift, t);
        b_drag[k] = interp(mt, m_drag, t);
    }

    const int max_lag =
        std::min(K - 2, static_cast<int>(std::lround(1.2 * period / dt_c)));
    const double offset = alignment_lag(a_lift, b_lift, dt_c, max_lag);
    const int lag = static_cast<int>(std::lround(offset / dt_c));

    const int ia = std::max(0, -lag);
    const int ib = std::max(0, lag);
    const int len = K - std::abs(lag);

    double ql = 0.0;
    double qd = 0.0;
    for (int i = 0; i < len; ++i) {
        const double dl = a_lift[ia + i] - b_lift[ib + i];
        const double dd = a_drag[ia + i] - b_drag[ib + i];
        ql += dl * dl;
        qd += dd * dd;
    }

    ComparisonReport rep;
    rep.rms_lift = std::sqrt(ql / len);
    rep.rms_drag = std::sqrt(qd / len);
    rep.detected_frequency = trace.detected_frequency;
    rep.alignment_offset = offset;
    rep.overlap = overlap;
    rep.grid_dt = dt_c;

    constexpr int kBins = 64;
    rep.cycle_phase.resize(kBins);
    rep.sim_lift_cycle.assign(kBins, 0.0);
    rep.meas_lift_cycle.assign(kBins, 0.0);
    rep.sim_drag_cycle.assign(kBins, 0.0);
    rep.meas_drag_cycle.assign(kBins, 0.0);
    std::vector<int> counts(kBins, 0);
    for (int b = 0; b < kBins; ++b) rep.cycle_phase[b] = (b + 0.5) / kBins;
    for (int i = 0; i < len; ++i) {
        const double t = (ia + i) * dt_c;
        double phase = std::fmod(t * flap_frequency, 1.0);
        if (phase < 0.0) phase += 1.0;
        int b = std::min(kBins - 1, static_cast<int>(phase * kBins));
        rep.sim_lift_cycle[b] += a_lift[ia + i];
        rep.meas_lift_cycle[b] += b_lift[ib + i];
        rep.sim_drag_cycle[b] += a_drag[ia + i];
        rep.meas_drag_cycle[b] += b_drag[ib + i];
        ++counts[b];
    }
    for (int b = 0; b < kBins; ++b) {
        if (counts[b] == 0) continue;
        rep.sim_lift_cycle[b] /= counts[b];
        rep.meas_lift_cycle[b] /= counts[b];
        rep.sim_drag_cycle[b] /= counts[b];
        rep.meas_drag_cycle[b] /= counts[b];
    }
    return rep;
}

}  // namespace flapsim
