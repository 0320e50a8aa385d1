#include "flapsim/wake.hpp"

#include <cmath>

#include "flapsim/errors.hpp"

namespace flapsim {

namespace {

// Cell-edge trailing-edge points: midpoints between neighbouring stations,
// linear extrapolation at the tips.
std::vector<Eigen::Vector3d> edge_points(const SnapshotRow& row) {
    const std::vector<Eigen::Vector3d>& p = row.te;
    const int m = static_cast<int>(p.size());
    std::vector<Eigen::Vector3d> e(static_cast<size_t>(m) + 1);
    e[0] = p[0] + 0.5 * (p[0] - p[1]);
    for (int k = 1; k < m; ++k)
        e[static_cast<size_t>(k)] =
            0.5 * (p[static_cast<size_t>(k - 1)] + p[static_cast<size_t>(k)]);
    e[static_cast<size_t>(m)] =
        p[static_cast<size_t>(m - 1)] +
        0.5 * (p[static_cast<size_t>(m - 1)] - p[static_cast<size_t>(m - 2)]);
    return e;
}

}  // namespace

WakeSheet shed_wake(const ForceRecord& rec, const SimConfig& cfg,
                    double t_now) {
    const std::vector<SnapshotRow>& snaps = rec.snapshots;
    if (rec.stations < 2 || snaps.size() < 2 ||
        snaps.front().te.size() < 2)
        throw EmptyHistoryError(
            "wake reconstruction needs at least two circulation snapshots");

    const int J = static_cast<int>(snaps.size());
    const int m = rec.stations;

    WakeSheet sheet;
    sheet.rows = J;
    sheet.edges = m + 1;

    Eigen::Vector3d conv = cfg.freestream();
    if (cfg.airspeed == 0.0) {
        // Hover: no stream to carry the sheet; convect with the mean
        // trailing-edge drift so the lattice still unrolls.
        Eigen::Vector3d first = Eigen::Vector3d::Zero(),
                        last = Eigen::Vector3d::Zero();
        for (int k = 0; k < m; ++k) {
            first += snaps.front().te[static_cast<size_t>(k)];
            last += snaps.back().te[static_cast<size_t>(k)];
        }
        conv = (last - first) /
               (m * (snaps.back().t - snaps.front().t));
        sheet.degenerate_convection = true;
    }

    // Convected lattice nodes, one line of m+1 edge points per snapshot.
    std::vector<std::vector<Eigen::Vector3d>> node(static_cast<size_t>(J));
    for (int j = 0; j < J; ++j) {
        node[static_cast<size_t>(j)] = edge_points(snaps[static_cast<size_t>(j)]);
        for (Eigen::Vector3d& x : node[static_cast<size_t>(j)])
            x += conv * (t_now - snaps[static_cast<size_t>(j)].t);
    }

    auto gamma_at = [&](int j, int k) {
        if (k < 0 || k >= m) return 0.0;
        return snaps[static_cast<size_t>(j)].gamma[k];
    };

    for (int j = 0; j + 1 < J; ++j) {
        // Streamwise columns of the interval, newer row toward older,
        // carrying the span difference at the shed time.
        for (int k = 0; k <= m; ++k) {
            const double g = gamma_at(j, k - 1) - gamma_at(j, k);
            if (g != 0.0)
                sheet.filaments.push_back({node[static_cast<size_t>(j + 1)]
                                               [static_cast<size_t>(k)],
                                           node[static_cast<size_t>(j)]
                                               [static_cast<size_t>(k)],
                                           g});
        }
        // Spanwise row on the newer line: the circulation dropped into the
        // wake during the interval, oriented left tip to right tip.
        for (int k = 0; k < m; ++k) {
            const double g = gamma_at(j, k) - gamma_at(j + 1, k);
            if (g != 0.0)
                sheet.filaments.push_back({node[static_cast<size_t>(j + 1)]
                                               [static_cast<size_t>(k)],
                                           node[static_cast<size_t>(j + 1)]
                                               [static_cast<size_t>(k + 1)],
                                           g});
        }
    }
    return sheet;
}

Eigen::Vector3d biot_savart_segment(const Eigen::Vector3d& p,
                                    const WakeFilament& f, double core) {
    const Eigen::Vector3d r1 = p - f.a;
    const Eigen::Vector3d r2 = p - f.b;
    const Eigen::Vector3d L = f.b - f.a;
    const double l2 = L.squaredNorm();
    const double n1 = r1.norm(), n2 = r2.norm();
    if (l2 == 0.0 || n1 == 0.0 || n2 == 0.0) return Eigen::Vector3d::Zero();

    const Eigen::Vector3d cr = r1.cross(r2);
    const double cn2 = cr.squaredNorm();
    if (cn2 == 0.0) return Eigen::Vector3d::Zero();  // collinear

    Eigen::Vector3d v = (f.gamma / (4.0 * M_PI)) *
                        (L.dot(r1 / n1 - r2 / n2) / cn2) * cr;
    const double d2 = cn2 / l2;  // squared perpendicular distance
    if (core > 0.0 && d2 < core * core) v *= d2 / (core * core);
    return v;
}

void PlaneSpec::validate() const {
    if (n1 < 3 || n2 < 3)
        throw ConfigError("sampling plane needs at least 3x3 nodes");
    if (!(d1 > 0.0) || !(d2 > 0.0))
        throw ConfigError("plane node spacing must be positive");
    if (std::abs(e1.norm() - 1.0) > 1e-12 || std::abs(e2.norm() - 1.0) > 1e-12)
        throw ConfigError("plane axes must be unit vectors");
    if (std::abs(e1.dot(e2)) > 1e-12)
        throw ConfigError("plane axes must be orthogonal");
}

WakeGrid sample_plane(const WakeSheet& sheet, const PlaneSpec& plane) {
    plane.validate();
    WakeGrid g;
    g.plane = plane;
    g.vel.assign(static_cast<size_t>(plane.n1) * plane.n2,
                 Eigen::Vector3d::Zero());
    g.curl.assign(g.vel.size(), 0.0);

    const double core = 0.25 * std::min(plane.d1, plane.d2);
    for (int i2 = 0; i2 < plane.n2; ++i2)
        for (int i1 = 0; i1 < plane.n1; ++i1) {
            const Eigen::Vector3d p =
                plane.origin + i1 * plane.d1 * plane.e1 +
                i2 * plane.d2 * plane.e2;
            Eigen::Vector3d v = Eigen::Vector3d::Zero();
            for (const WakeFilament& f : sheet.filaments)
                v += biot_savart_segment(p, f, core);
            g.vel[static_cast<size_t>(i2) * plane.n1 + i1] = v;
        }

    // In-plane curl about e1 x e2; one-sided stencils on the borders.
    auto u1 = [&](int i1, int i2) {
        return g.vel[static_cast<size_t>(i2) * plane.n1 + i1].dot(plane.e1);
    };
    auto u2 = [&](int i1, int i2) {
        return g.vel[static_cast<size_t>(i2) * plane.n1 + i1].dot(plane.e2);
    };
    for (int i2 = 0; i2 < plane.n2; ++i2)
        for (int i1 = 0; i1 < plane.n1; ++i1) {
            double du2_d1, du1_d2;
            if (i1 == 0)
                du2_d1 = (u2(1, i2) - u2(0, i2)) / plane.d1;
            else if (i1 == plane.n1 - 1)
                du2_d1 = (u2(i1, i2) - u2(i1 - 1, i2)) / plane.d1;
            else
                du2_d1 = (u2(i1 + 1, i2) - u2(i1 - 1, i2)) / (2.0 * plane.d1);
            if (i2 == 0)
                du1_d2 = (u1(i1, 1) - u1(i1, 0)) / plane.d2;
            else if (i2 == plane.n2 - 1)
                du1_d2 = (u1(i1, i2) - u1(i1, i2 - 1)) / plane.d2;
            else
                du1_d2 = (u1(i1, i2 + 1) - u1(i1, i2 - 1)) / (2.0 * plane.d2);
            g.curl[static_cast<size_t>(i2) * plane.n1 + i1] = du2_d1 - du1_d2;
        }
    return g;
}

PlaneSpec default_plane(const SimConfig& cfg, double offset) {
    const Planform& pf = cfg.planform;
    const WingLayout& w = cfg.wing;
    const double semi = w.shoulder.y() + w.proximal_length + w.distal_length;
    const double area =
        2.0 * (w.shoulder.y() * pf.proximal_root_chord +
               0.5 * (pf.proximal_root_chord + pf.proximal_tip_chord) *
                   w.proximal_length +
               0.5 * (pf.distal_root_chord + pf.distal_tip_chord) *
                   w.distal_length);
    const double mean_chord = area / (2.0 * semi);
    if (offset < 0.0) offset = mean_chord;

    PlaneSpec pl;
    const double width = 2.8 * semi, height = 0.3;
    pl.e1 = Eigen::Vector3d::UnitY();
    pl.e2 = Eigen::Vector3d::UnitZ();
    pl.n1 = 41;
    pl.n2 = 21;
    pl.d1 = width / (pl.n1 - 1);
    pl.d2 = height / (pl.n2 - 1);
    // Trailing edge of the root chord, then `offset` further downstream.
    const double x = -0.75 * pf.proximal_root_chord - offset;
    pl.origin = Eigen::Vector3d(x, -0.5 * width, -0.5 * height);
    return pl;
}

}  // namespace flapsim
