#include "flapsim/export.hpp"

#include <fstream>

#include "json.hpp"

#include "flapsim/errors.hpp"

namespace flapsim {

std::string format_number(double v) { return nlohmann::json(v).dump(); }

std::string record_csv(const ForceRecord& rec, double airspeed,
                       double flap_frequency) {
    std::string out;
    out += "# airspeed " + format_number(airspeed) + "\n";
    out += "# nominal_frequency " + format_number(flap_frequency) + "\n";
    out += "t_s,fx_N,fy_N,fz_N,tx_Nmm,ty_Nmm,tz_Nmm\n";
    for (const ForceSample& s : rec.samples) {
        out += format_number(s.t);
        out += ',';
        out += format_number(s.force.z());
        out += ',';
        out += format_number(s.force.y());
        out += ',';
        out += format_number(-s.force.x());
        out += ',';
        out += format_number(s.moment.z() * 1e3);
        out += ',';
        out += format_number(s.moment.y() * 1e3);
        out += ',';
        out += format_number(-s.moment.x() * 1e3);
        out += '\n';
    }
    return out;
}

std::string snapshots_csv(const ForceRecord& rec) {
    std::string out = "t_s,station,a_fourier,z1,z2,gamma_m2s,cl,te_x_m,te_y_m,te_z_m\n";
    for (const SnapshotRow& row : rec.snapshots) {
        const int m = static_cast<int>(row.gamma.size());
        for (int k = 0; k < m; ++k) {
            out += format_number(row.t);
            out += ',';
            out += std::to_string(k);
            out += ',';
            out += format_number(row.zeta[k]);
            out += ',';
            out += format_number(row.zeta[m + k]);
            out += ',';
            out += format_number(row.zeta[2 * m + k]);
            out += ',';
            out += format_number(row.gamma[k]);
            out += ',';
            out += format_number(row.cl[k]);
            out += ',';
            out += format_number(row.te[static_cast<size_t>(k)].x());
            out += ',';
            out += format_number(row.te[static_cast<size_t>(k)].y());
            out += ',';
            out += format_number(row.te[static_cast<size_t>(k)].z());
            out += '\n';
        }
    }
    return out;
}

std::string wake_grid_csv(const WakeGrid& grid, double t) {
    const PlaneSpec& p = grid.plane;
    std::string out;
    out += "# wake grid sampled at t " + format_number(t) + " s\n";
    out += "# origin " + format_number(p.origin.x()) + " " +
           format_number(p.origin.y()) + " " + format_number(p.origin.z()) + " m\n";
    out += "# e1 " + format_number(p.e1.x()) + " " + format_number(p.e1.y()) + " " +
           format_number(p.e1.z()) + "\n";
    out += "# e2 " + format_number(p.e2.x()) + " " + format_number(p.e2.y()) + " " +
           format_number(p.e2.z()) + "\n";
    out += "# n1 " + std::to_string(p.n1) + "\n";
    out += "# n2 " + std::to_string(p.n2) + "\n";
    out += "# d1 " + format_number(p.d1) + " m\n";
    out += "# d2 " + format_number(p.d2) + " m\n";
    out += "# units position m, velocity m/s, curl 1/s\n";
    out += "x_m,y_m,z_m,vx_mps,vy_mps,vz_mps,curl_ps\n";
    for (int i2 = 0; i2 < p.n2; ++i2) {
        for (int i1 = 0; i1 < p.n1; ++i1) {
            const size_t idx = static_cast<size_t>(i2) * p.n1 + i1;
            const Eigen::Vector3d pos = p.origin + i1 * p.d1 * p.e1 + i2 * p.d2 * p.e2;
            const Eigen::Vector3d& v = grid.vel[idx];
            out += format_number(pos.x());
            out += ',';
            out += format_number(pos.y());
            out += ',';
            out += format_number(pos.z());
            out += ',';
            out += format_number(v.x());
            out += ',';
            out += format_number(v.y());
            out += ',';
            out += format_number(v.z());
            out += ',';
            out += format_number(grid.curl[idx]);
            out += '\n';
        }
    }
    return out;
}

std::string report_text(const std::string& label, const ComparisonReport& rep) {
    std::string out;
    out += "[" + label + "]\n";
    out += "rms_lift_N: " + format_number(rep.rms_lift) + "\n";
    out += "rms_drag_N: " + format_number(rep.rms_drag) + "\n";
    out += "detected_frequency_hz: " + format_number(rep.detected_frequency) + "\n";
    out += "alignment_offset_s: " + format_number(rep.alignment_offset) + "\n";
    out += "overlap_s: " + format_number(rep.overlap) + "\n";
    out += "grid_dt_s: " + format_number(rep.grid_dt) + "\n";
    out += "cycle_curve:\n";
    out += "phase,sim_lift_N,meas_lift_N,sim_drag_N,meas_drag_N\n";
    for (size_t b = 0; b < rep.cycle_phase.size(); ++b) {
        out += format_number(rep.cycle_phase[b]);
        out += ',';
        out += format_number(rep.sim_lift_cycle[b]);
        out += ',';
        out += format_number(rep.meas_lift_cycle[b]);
        out += ',';
        out += format_number(rep.sim_drag_cycle[b]);
        out += ',';
        out += format_number(rep.meas_drag_cycle[b]);
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace flapsim
