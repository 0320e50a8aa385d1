#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "flapsim/errors.hpp"
#include "flapsim/wake.hpp"

using namespace flapsim;

namespace {

// Textbook scalar form for a finite segment: v = gamma/(4 pi d)
// (cos t1 - cos t2) about the filament axis. Independent of the vector
// cross-product route used by the library.
Eigen::Vector3d angle_form(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                           const Eigen::Vector3d& b, double gamma) {
    const Eigen::Vector3d ab = b - a, ap = p - a, bp = p - b;
    const double cos1 = ab.dot(ap) / (ab.norm() * ap.norm());
    const double cos2 = ab.dot(bp) / (ab.norm() * bp.norm());
    const Eigen::Vector3d n = ab.cross(ap);
    const double d = n.norm() / ab.norm();
    return gamma / (4.0 * M_PI * d) * (cos1 - cos2) * n.normalized();
}

// Semi-infinite filament from foot f along unit u, circulation flowing
// toward infinity.
Eigen::Vector3d semi_infinite(const Eigen::Vector3d& p,
                              const Eigen::Vector3d& f,
                              const Eigen::Vector3d& u, double gamma) {
    const Eigen::Vector3d fp = p - f;
    const double cost = u.dot(fp) / fp.norm();
    const Eigen::Vector3d n = u.cross(fp);
    const double d = n.norm();
    return gamma / (4.0 * M_PI * d) * (1.0 + cost) * n.normalized();
}

ForceRecord elliptic_record(int m, int rows, double dt_snap, double gamma0,
                            double semi) {
    ForceRecord rec;
    rec.stations = m;
    for (int j = 0; j < rows; ++j) {
        SnapshotRow row;
        row.t = j * dt_snap;
        row.gamma.resize(m);
        row.te.resize(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k) {
            const double th = (k + 1) * M_PI / (m + 1);
            row.gamma[k] = gamma0 * std::sin(th);
            row.te[static_cast<size_t>(k)] =
                Eigen::Vector3d(0.0, semi * std::cos(th), 0.0);
        }
        rec.snapshots.push_back(row);
    }
    return rec;
}

SimConfig wake_config(double airspeed) {
    SimConfig cfg;
    cfg.gait_mode = GaitMode::kPrescribed;
    cfg.airspeed = airspeed;
    cfg.span_stations = 8;
    return cfg;
}

}  // namespace

TEST_CASE("segment kernel recovers the straight-filament limits") {
    const double gamma = 2.3, d = 0.37;
    const WakeFilament inf{{0, 0, -1e6}, {0, 0, 1e6}, gamma};
    const Eigen::Vector3d v = biot_savart_segment({d, 0, 0}, inf, 0.0);
    CHECK(v.y() == doctest::Approx(gamma / (2.0 * M_PI * d)).epsilon(1e-6));
    CHECK(std::abs(v.x()) < 1e-12);
    CHECK(std::abs(v.z()) < 1e-12);

    const WakeFilament half{{0, 0, 0}, {0, 0, 1e7}, gamma};
    const Eigen::Vector3d vh = biot_savart_segment({d, 0, 0}, half, 0.0);
    CHECK(vh.y() == doctest::Approx(gamma / (4.0 * M_PI * d)).epsilon(1e-6));
}

TEST_CASE("collinear and endpoint evaluations are exactly zero") {
    const WakeFilament f{{0, 0, -1}, {0, 0, 1}, 3.0};
    CHECK(biot_savart_segment({0, 0, 5.0}, f, 0.0).norm() == 0.0);
    CHECK(biot_savart_segment({0, 0, 0.3}, f, 0.0).norm() == 0.0);
    CHECK(biot_savart_segment(f.a, f, 0.0).norm() == 0.0);
}

TEST_CASE("the Rankine core scales the inner field quadratically") {
    const WakeFilament f{{0, 0, -1e5}, {0, 0, 1e5}, 1.4};
    const double core = 0.1, d = 0.05;
    const Eigen::Vector3d full = biot_savart_segment({d, 0, 0}, f, 0.0);
    const Eigen::Vector3d damped = biot_savart_segment({d, 0, 0}, f, core);
    CHECK((damped - 0.25 * full).norm() < 1e-12 * full.norm());
    // Outside the core the cutoff is inert.
    const Eigen::Vector3d out = biot_savart_segment({0.2, 0, 0}, f, core);
    CHECK(out == biot_savart_segment({0.2, 0, 0}, f, 0.0));
}

TEST_CASE("horseshoe field on the bisecting plane matches the closed form") {
    const double s = 0.5, gamma = 1.8, leg = 1e7;
    WakeSheet sheet;
    sheet.filaments.push_back({{-leg, s, 0}, {0, s, 0}, gamma});
    sheet.filaments.push_back({{0, s, 0}, {0, -s, 0}, gamma});
    sheet.filaments.push_back({{0, -s, 0}, {-leg, -s, 0}, gamma});

    PlaneSpec pl;
    pl.origin = Eigen::Vector3d(-2.0, 0.0, -0.4);
    pl.e1 = Eigen::Vector3d::UnitX();
    pl.e2 = Eigen::Vector3d::UnitZ();
    pl.n1 = 9;
    pl.n2 = 9;
    pl.d1 = 0.2;
    pl.d2 = 0.1;
    const WakeGrid g = sample_plane(sheet, pl);

    for (int i2 = 0; i2 < pl.n2; ++i2)
        for (int i1 = 0; i1 < pl.n1; ++i1) {
            const Eigen::Vector3d p =
                pl.origin + i1 * pl.d1 * pl.e1 + i2 * pl.d2 * pl.e2;
            // Legs via the true semi-infinite form: circulation flows in
            // from far downstream on the left, out on the right.
            const Eigen::Vector3d expect =
                semi_infinite(p, {0, s, 0}, {-1, 0, 0}, -gamma) +
                angle_form(p, {0, s, 0}, {0, -s, 0}, gamma) +
                semi_infinite(p, {0, -s, 0}, {-1, 0, 0}, gamma);
            const Eigen::Vector3d got =
                g.vel[static_cast<size_t>(i2) * pl.n1 + i1];
            CHECK((got - expect).norm() <= 1e-6 * expect.norm());
        }
}

TEST_CASE("induced velocity superposes and scales with strength") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rnd = [&] { return Eigen::Vector3d(u(rng), u(rng), u(rng)); };

    WakeSheet a, b, both;
    for (int i = 0; i < 3; ++i)
        a.filaments.push_back({rnd(), rnd(), u(rng)});
    for (int i = 0; i < 2; ++i)
        b.filaments.push_back({rnd(), rnd(), u(rng)});
    both = a;
    both.filaments.insert(both.filaments.end(), b.filaments.begin(),
                          b.filaments.end());

    PlaneSpec pl;
    pl.origin = Eigen::Vector3d(2.0, 2.0, 2.0);
    pl.e1 = Eigen::Vector3d::UnitX();
    pl.e2 = Eigen::Vector3d::UnitY();
    pl.n1 = pl.n2 = 3;
    pl.d1 = pl.d2 = 0.3;
    const WakeGrid ga = sample_plane(a, pl);
    const WakeGrid gb = sample_plane(b, pl);
    const WakeGrid gab = sample_plane(both, pl);
    for (size_t i = 0; i < gab.vel.size(); ++i)
        CHECK((gab.vel[i] - ga.vel[i] - gb.vel[i]).norm() < 1e-12);

    WakeSheet scaled = both;
    for (WakeFilament& f : scaled.filaments) f.gamma *= 7.3;
    const WakeGrid gs = sample_plane(scaled, pl);
    for (size_t i = 0; i < gs.vel.size(); ++i)
        CHECK((gs.vel[i] - 7.3 * gab.vel[i]).norm()
              < 1e-13 * gs.vel[i].norm() + 1e-300);
}

TEST_CASE("far field decays at least as fast as 1/R") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    WakeSheet sheet;
    for (int i = 0; i < 6; ++i)
        sheet.filaments.push_back({{u(rng), u(rng), u(rng)},
                                   {u(rng), u(rng), u(rng)},
                                   1.0 + 0.1 * i});
    const Eigen::Vector3d dir =
        Eigen::Vector3d(0.3, 0.8, 0.52).normalized();
    for (double R : {2.0, 5.0}) {
        Eigen::Vector3d vn = Eigen::Vector3d::Zero(),
                        vf = Eigen::Vector3d::Zero();
        for (const WakeFilament& f : sheet.filaments) {
            vn += biot_savart_segment(R * dir, f, 0.0);
            vf += biot_savart_segment(2.0 * R * dir, f, 0.0);
        }
        CHECK(vf.norm() <= 0.5 * vn.norm() * 1.05);
    }
}

TEST_CASE("steady elliptic history sheds pure trailing filaments") {
    const int m = 9;
    const double gamma0 = 0.8, semi = 0.15;
    const ForceRecord rec = elliptic_record(m, 2, 0.01, gamma0, semi);
    const SimConfig cfg = wake_config(2.0);
    const WakeSheet sheet = shed_wake(rec, cfg, 0.01);

    // Constant in time: no spanwise rows, m+1 trailing columns.
    REQUIRE(static_cast<int>(sheet.filaments.size()) == m + 1);
    for (int k = 0; k <= m; ++k) {
        const WakeFilament& f = sheet.filaments[static_cast<size_t>(k)];
        // Independent route: Gamma(y) = gamma0 sqrt(1 - (y/semi)^2)
        // differenced at the recorded station ordinates.
        auto gam = [&](int st) {
            if (st < 0 || st >= m) return 0.0;
            const double y =
                rec.snapshots[0].te[static_cast<size_t>(st)].y();
            return gamma0 * std::sqrt(1.0 - (y / semi) * (y / semi));
        };
        const double expect = gam(k - 1) - gam(k);
        CHECK(f.gamma == doctest::Approx(expect).epsilon(1e-10));
        // Columns run from the newer shed line toward the older one,
        // i.e. downstream with the freestream.
        CHECK(f.b.x() < f.a.x());
    }
}

TEST_CASE("spanwise-constant circulation leaves only tip filaments") {
    const int m = 7;
    ForceRecord rec;
    rec.stations = m;
    for (int j = 0; j < 3; ++j) {
        SnapshotRow row;
        row.t = 0.02 * j;
        row.gamma = Eigen::VectorXd::Constant(m, 1.7);
        for (int k = 0; k < m; ++k)
            row.te.push_back(Eigen::Vector3d(0.0, 0.1 * (m - 1 - 2 * k), 0.0));
        rec.snapshots.push_back(row);
    }
    const WakeSheet sheet = shed_wake(rec, wake_config(1.0), 0.04);
    REQUIRE(sheet.filaments.size() == 4);  // two tips per interval
    for (const WakeFilament& f : sheet.filaments)
        CHECK(std::abs(f.gamma) == doctest::Approx(1.7).epsilon(1e-15));
}

TEST_CASE("a lifting wake induces downwash inside, upwash outside") {
    const double semi = 0.15, U = 2.0;
    // 2 s of steady positive circulation: a long frozen elliptic wake.
    const ForceRecord rec = elliptic_record(9, 41, 0.05, 0.8, semi);
    const WakeSheet sheet = shed_wake(rec, wake_config(U), 2.0);
    CHECK_FALSE(sheet.degenerate_convection);

    Eigen::Vector3d mid = Eigen::Vector3d::Zero(),
                    out = Eigen::Vector3d::Zero();
    for (const WakeFilament& f : sheet.filaments) {
        mid += biot_savart_segment({-1.0, 0.0, 0.0}, f, 0.0);
        out += biot_savart_segment({-1.0, 2.0 * semi, 0.0}, f, 0.0);
    }
    CHECK(mid.z() < 0.0);
    CHECK(out.z() > 0.0);
}

TEST_CASE("wake of a symmetric run mirrors across the body plane") {
    SimConfig cfg = wake_config(1.65);
    cfg.duration = 0.12;
    cfg.snapshot_stride = 20;
    const SimResult r = run(cfg);
    const WakeSheet sheet = shed_wake(r.record, cfg, cfg.duration);

    PlaneSpec pl = default_plane(cfg);
    const WakeGrid g = sample_plane(sheet, pl);
    for (int i2 = 0; i2 < pl.n2; ++i2)
        for (int i1 = 0; i1 < pl.n1; ++i1) {
            const Eigen::Vector3d& v =
                g.vel[static_cast<size_t>(i2) * pl.n1 + i1];
            const Eigen::Vector3d& vm =
                g.vel[static_cast<size_t>(i2) * pl.n1 + (pl.n1 - 1 - i1)];
            CHECK(std::abs(v.x() - vm.x()) < 1e-10);
            CHECK(std::abs(v.y() + vm.y()) < 1e-10);
            CHECK(std::abs(v.z() - vm.z()) < 1e-10);
        }
}

TEST_CASE("hover convection falls back to the trailing-edge drift") {
    ForceRecord rec = elliptic_record(5, 3, 0.01, 0.4, 0.1);
    // Drift the lines so the fallback velocity is well defined.
    for (size_t j = 0; j < rec.snapshots.size(); ++j)
        for (Eigen::Vector3d& p : rec.snapshots[j].te)
            p.z() -= 0.02 * static_cast<double>(j);
    const WakeSheet sheet = shed_wake(rec, wake_config(0.0), 0.02);
    CHECK(sheet.degenerate_convection);
}

TEST_CASE("wake construction demands a circulation history") {
    const SimConfig cfg = wake_config(1.0);
    ForceRecord rec;
    CHECK_THROWS_AS(shed_wake(rec, cfg, 0.0), EmptyHistoryError);
    rec = elliptic_record(5, 1, 0.01, 0.4, 0.1);
    CHECK_THROWS_AS(shed_wake(rec, cfg, 0.0), EmptyHistoryError);
}

TEST_CASE("sampling plane validation rejects bad axes") {
    WakeSheet sheet;
    sheet.filaments.push_back({{0, 0, 0}, {1, 0, 0}, 1.0});
    PlaneSpec pl;
    pl.origin.setZero();
    pl.e1 = Eigen::Vector3d(1, 0, 0);
    pl.e2 = Eigen::Vector3d(1, 0, 0);  // not orthogonal
    pl.n1 = pl.n2 = 3;
    pl.d1 = pl.d2 = 0.1;
    CHECK_THROWS_AS(sample_plane(sheet, pl), ConfigError);
    pl.e2 = Eigen::Vector3d(0, 2, 0);  // not unit
    CHECK_THROWS_AS(sample_plane(sheet, pl), ConfigError);
    pl.e2 = Eigen::Vector3d(0, 1, 0);
    pl.n1 = 2;
    CHECK_THROWS_AS(sample_plane(sheet, pl), ConfigError);
}
