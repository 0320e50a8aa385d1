#include "flapsim/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "flapsim/errors.hpp"

namespace flapsim {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kDegToRad = M_PI / 180.0;

double to_radians(double deg) { return deg * kDegToRad; }

// Degree value whose parse reproduces the stored radians bit for bit. The
// naive quotient is sometimes one ulp off after the round trip, so probe its
// neighbours and keep the first exact one.
double to_degrees(double rad) {
    const double deg = rad / kDegToRad;
    double up = deg;
    double down = deg;
    for (int i = 0; i < 3; ++i) {
        for (double cand : {up, down}) {
            if (to_radians(cand) == rad) return cand;
        }
        up = std::nextafter(up, std::numeric_limits<double>::infinity());
        down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    }
    return deg;
}

// One object level of the document plus its dotted path for diagnostics.
// Readers leave the target untouched when the key is absent, so defaults
// are whatever the config structs already hold.
struct Section {
    const json* j = nullptr;
    std::string path;

    std::string dotted(const std::string& key) const {
        return path.empty() ? key : path + "." + key;
    }

    const json* find(const char* key) const {
        if (j == nullptr) return nullptr;
        auto it = j->find(key);
        return it == j->end() ? nullptr : &*it;
    }

    void allow(std::initializer_list<const char*> keys) const {
        if (j == nullptr) return;
        for (auto it = j->begin(); it != j->end(); ++it) {
            bool known = false;
            for (const char* k : keys) known = known || it.key() == k;
            if (!known)
                throw ConfigError("unknown config key '" + dotted(it.key()) + "'");
        }
    }

    Section child(const char* key) const {
        const json* c = find(key);
        if (c != nullptr && !c->is_object())
            throw ConfigError("config key '" + dotted(key) + "' must be an object");
        return Section{c, dotted(key)};
    }

    void number(const char* key, double* out) const {
        const json* v = find(key);
        if (v == nullptr) return;
        if (!v->is_number())
            throw ConfigError("config key '" + dotted(key) + "' must be a number");
        *out = v->get<double>();
    }

    void angle(const char* key, double* out) const {
        const json* v = find(key);
        if (v == nullptr) return;
        if (!v->is_number())
            throw ConfigError("config key '" + dotted(key) + "' must be a number");
        *out = to_radians(v->get<double>());
    }

    void integer(const char* key, int* out) const {
        const json* v = find(key);
        if (v == nullptr) return;
        if (!v->is_number_integer())
            throw ConfigError("config key '" + dotted(key) + "' must be an integer");
        *out = v->get<int>();
    }

    void boolean(const char* key, bool* out) const {
        const json* v = find(key);
        if (v == nullptr) return;
        if (!v->is_boolean())
            throw ConfigError("config key '" + dotted(key) + "' must be a boolean");
        *out = v->get<bool>();
    }

    template <typename Vec>
    void vector(const char* key, Vec* out) const {
        const json* v = find(key);
        if (v == nullptr) return;
        const auto n = static_cast<size_t>(out->size());
        if (!v->is_array() || v->size() != n)
            throw ConfigError("config key '" + dotted(key) + "' must be an array of " +
                              std::to_string(n) + " numbers");
        for (size_t i = 0; i < n; ++i) {
            if (!(*v)[i].is_number())
                throw ConfigError("config key '" + dotted(key) +
                                  "' must be an array of " + std::to_string(n) +
                                  " numbers");
            (*out)[static_cast<Eigen::Index>(i)] = (*v)[i].get<double>();
        }
    }

    template <typename Enum>
    void choice(const char* key, Enum* out,
                std::initializer_list<std::pair<const char*, Enum>> options) const {
        const json* v = find(key);
        if (v == nullptr) return;
        if (v->is_string()) {
            const auto s = v->get<std::string>();
            for (const auto& [name, value] : options) {
                if (s == name) {
                    *out = value;
                    return;
                }
            }
        }
        std::string allowed;
        for (const auto& [name, value] : options) {
            (void)value;
            if (!allowed.empty()) allowed += ", ";
            allowed += name;
        }
        throw ConfigError("config key '" + dotted(key) + "' must be one of: " + allowed);
    }
};

void read_segment(const Section& s, SegmentMass* out) {
    s.allow({"mass", "com_arc", "com_chord", "inertia"});
    s.number("mass", &out->mass);
    s.number("com_arc", &out->com_arc);
    s.number("com_chord", &out->com_chord);
    s.vector("inertia", &out->inertia_diag);
}

ordered_json segment_json(const SegmentMass& s) {
    return ordered_json{{"mass", s.mass},
                        {"com_arc", s.com_arc},
                        {"com_chord", s.com_chord},
                        {"inertia", {s.inertia_diag.x(), s.inertia_diag.y(), s.inertia_diag.z()}}};
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");

    RunConfig cfg;
    const Section root{&doc, ""};
    root.allow({"sim", "wing", "planform", "mass", "gait", "linkage", "unsteady",
                "dickinson", "crank", "wake", "loadcell"});

    const Section sim = root.child("sim");
    sim.allow({"rho", "airspeed", "dt", "duration", "flap_frequency", "aero_mode",
               "gait_mode", "tethered", "elements_per_segment", "u_floor",
               "snapshot_stride"});
    sim.number("rho", &cfg.sim.rho);
    sim.number("airspeed", &cfg.sim.airspeed);
    sim.number("dt", &cfg.sim.dt);
    sim.number("duration", &cfg.sim.duration);
    sim.number("flap_frequency", &cfg.sim.flap_frequency);
    sim.choice("aero_mode", &cfg.sim.aero,
               {{"quasisteady", AeroMode::kQuasisteady}, {"wagner", AeroMode::kWagner}});
    sim.choice("gait_mode", &cfg.sim.gait_mode,
               {{"linkage", GaitMode::kLinkage}, {"prescribed", GaitMode::kPrescribed}});
    sim.boolean("tethered", &cfg.sim.tethered);
    sim.integer("elements_per_segment", &cfg.sim.elements_per_segment);
    sim.number("u_floor", &cfg.sim.u_floor);
    sim.integer("snapshot_stride", &cfg.sim.snapshot_stride);
    // One flapping rate for the whole run; the prescribed gait follows it.
    cfg.sim.gait.frequency = cfg.sim.flap_frequency;

    const Section wing = root.child("wing");
    wing.allow({"shoulder", "proximal_length", "distal_length", "incidence_deg"});
    wing.vector("shoulder", &cfg.sim.wing.shoulder);
    wing.number("proximal_length", &cfg.sim.wing.proximal_length);
    wing.number("distal_length", &cfg.sim.wing.distal_length);
    wing.angle("incidence_deg", &cfg.sim.wing.incidence);

    const Section pf = root.child("planform");
    pf.allow({"proximal_root_chord", "proximal_tip_chord", "distal_root_chord",
              "distal_tip_chord"});
    pf.number("proximal_root_chord", &cfg.sim.planform.proximal_root_chord);
    pf.number("proximal_tip_chord", &cfg.sim.planform.proximal_tip_chord);
    pf.number("distal_root_chord", &cfg.sim.planform.distal_root_chord);
    pf.number("distal_tip_chord", &cfg.sim.planform.distal_tip_chord);

    const Section mass = root.child("mass");
    mass.allow({"body_mass", "body_inertia", "gravity", "proximal", "distal"});
    mass.number("body_mass", &cfg.sim.mass.body_mass);
    mass.vector("body_inertia", &cfg.sim.mass.body_inertia_diag);
    mass.vector("gravity", &cfg.sim.mass.gravity);
    read_segment(mass.child("proximal"), &cfg.sim.mass.proximal);
    read_segment(mass.child("distal"), &cfg.sim.mass.distal);

    const Section gait = root.child("gait");
    gait.allow({"amp_shoulder_deg", "mean_shoulder_deg", "amp_elbow_deg",
                "mean_elbow_deg", "phase_elbow_deg"});
    gait.angle("amp_shoulder_deg", &cfg.sim.gait.amp_s);
    gait.angle("mean_shoulder_deg", &cfg.sim.gait.mean_s);
    gait.angle("amp_elbow_deg", &cfg.sim.gait.amp_e);
    gait.angle("mean_elbow_deg", &cfg.sim.gait.mean_e);
    gait.angle("phase_elbow_deg", &cfg.sim.gait.phase_e);

    const Section lk = root.child("linkage");
    lk.allow({"p1", "p5", "p8", "crank_arm", "crank_arm2", "crank_arm2_phase_deg",
              "coupler_a", "shoulder_arm", "shoulder_arm_phase_deg", "coupler_b",
              "rocker_arm", "rocker_arm_phase_deg", "shoulder_to_elbow",
              "elbow_lever", "elbow_lever_phase_deg", "rocker_arm2", "elbow_link"});
    lk.vector("p1", &cfg.sim.linkage.p1);
    lk.vector("p5", &cfg.sim.linkage.p5);
    lk.vector("p8", &cfg.sim.linkage.p8);
    lk.number("crank_arm", &cfg.sim.linkage.crank_arm);
    lk.number("crank_arm2", &cfg.sim.linkage.crank_arm2);
    lk.angle("crank_arm2_phase_deg", &cfg.sim.linkage.crank_arm2_phase);
    lk.number("coupler_a", &cfg.sim.linkage.coupler_a);
    lk.number("shoulder_arm", &cfg.sim.linkage.shoulder_arm);
    lk.angle("shoulder_arm_phase_deg", &cfg.sim.linkage.shoulder_arm_phase);
    lk.number("coupler_b", &cfg.sim.linkage.coupler_b);
    lk.number("rocker_arm", &cfg.sim.linkage.rocker_arm);
    lk.angle("rocker_arm_phase_deg", &cfg.sim.linkage.rocker_arm_phase);
    lk.number("shoulder_to_elbow", &cfg.sim.linkage.shoulder_to_elbow);
    lk.number("elbow_lever", &cfg.sim.linkage.elbow_lever);
    lk.angle("elbow_lever_phase_deg", &cfg.sim.linkage.elbow_lever_phase);
    lk.number("rocker_arm2", &cfg.sim.linkage.rocker_arm2);
    lk.number("elbow_link", &cfg.sim.linkage.elbow_link);

    const Section un = root.child("unsteady");
    un.allow({"psi1", "psi2", "eps1", "eps2", "a0", "span_stations"});
    un.number("psi1", &cfg.sim.wagner.psi1);
    un.number("psi2", &cfg.sim.wagner.psi2);
    un.number("eps1", &cfg.sim.wagner.eps1);
    un.number("eps2", &cfg.sim.wagner.eps2);
    un.number("a0", &cfg.sim.wagner.a0);
    un.integer("span_stations", &cfg.sim.span_stations);

    const Section dc = root.child("dickinson");
    dc.allow({"cl0", "cl_amp", "cl_freq", "cl_phase", "cd0", "cd_amp", "cd_freq",
              "cd_phase"});
    dc.number("cl0", &cfg.sim.dickinson.cl0);
    dc.number("cl_amp", &cfg.sim.dickinson.cl_amp);
    dc.number("cl_freq", &cfg.sim.dickinson.cl_freq);
    dc.number("cl_phase", &cfg.sim.dickinson.cl_phase);
    dc.number("cd0", &cfg.sim.dickinson.cd0);
    dc.number("cd_amp", &cfg.sim.dickinson.cd_amp);
    dc.number("cd_freq", &cfg.sim.dickinson.cd_freq);
    dc.number("cd_phase", &cfg.sim.dickinson.cd_phase);

    const Section crank = root.child("crank");
    crank.allow({"kp", "ki"});
    crank.number("kp", &cfg.sim.crank.kp);
    crank.number("ki", &cfg.sim.crank.ki);

    const Section wake = root.child("wake");
    wake.allow({"plane_offset"});
    wake.number("plane_offset", &cfg.wake_plane_offset);

    const Section lc = root.child("loadcell");
    lc.allow({"lowpass_hz"});
    lc.number("lowpass_hz", &cfg.loadcell_lowpass_hz);

    cfg.sim.validate();
    if (!std::isfinite(cfg.wake_plane_offset))
        throw ConfigError("config key 'wake.plane_offset' must be finite");
    if (!(cfg.loadcell_lowpass_hz >= 0.0))
        throw ConfigError("config key 'loadcell.lowpass_hz' must be non-negative");
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string echo_config(const RunConfig& cfg) {
    const SimConfig& s = cfg.sim;
    ordered_json doc;
    doc["sim"] = ordered_json{
        {"rho", s.rho},
        {"airspeed", s.airspeed},
        {"dt", s.dt},
        {"duration", s.duration},
        {"flap_frequency", s.flap_frequency},
        {"aero_mode", s.aero == AeroMode::kWagner ? "wagner" : "quasisteady"},
        {"gait_mode", s.gait_mode == GaitMode::kLinkage ? "linkage" : "prescribed"},
        {"tethered", s.tethered},
        {"elements_per_segment", s.elements_per_segment},
        {"u_floor", s.u_floor},
        {"snapshot_stride", s.snapshot_stride}};
    doc["wing"] = ordered_json{
        {"shoulder", {s.wing.shoulder.x(), s.wing.shoulder.y(), s.wing.shoulder.z()}},
        {"proximal_length", s.wing.proximal_length},
        {"distal_length", s.wing.distal_length},
        {"incidence_deg", to_degrees(s.wing.incidence)}};
    doc["planform"] = ordered_json{
        {"proximal_root_chord", s.planform.proximal_root_chord},
        {"proximal_tip_chord", s.planform.proximal_tip_chord},
        {"distal_root_chord", s.planform.distal_root_chord},
        {"distal_tip_chord", s.planform.distal_tip_chord}};
    doc["mass"] = ordered_json{
        {"body_mass", s.mass.body_mass},
        {"body_inertia",
         {s.mass.body_inertia_diag.x(), s.mass.body_inertia_diag.y(),
          s.mass.body_inertia_diag.z()}},
        {"gravity", {s.mass.gravity.x(), s.mass.gravity.y(), s.mass.gravity.z()}},
        {"proximal", segment_json(s.mass.proximal)},
        {"distal", segment_json(s.mass.distal)}};
    doc["gait"] = ordered_json{{"amp_shoulder_deg", to_degrees(s.gait.amp_s)},
                               {"mean_shoulder_deg", to_degrees(s.gait.mean_s)},
                               {"amp_elbow_deg", to_degrees(s.gait.amp_e)},
                               {"mean_elbow_deg", to_degrees(s.gait.mean_e)},
                               {"phase_elbow_deg", to_degrees(s.gait.phase_e)}};
    doc["linkage"] = ordered_json{
        {"p1", {s.linkage.p1.x(), s.linkage.p1.y()}},
        {"p5", {s.linkage.p5.x(), s.linkage.p5.y()}},
        {"p8", {s.linkage.p8.x(), s.linkage.p8.y()}},
        {"crank_arm", s.linkage.crank_arm},
        {"crank_arm2", s.linkage.crank_arm2},
        {"crank_arm2_phase_deg", to_degrees(s.linkage.crank_arm2_phase)},
        {"coupler_a", s.linkage.coupler_a},
        {"shoulder_arm", s.linkage.shoulder_arm},
        {"shoulder_arm_phase_deg", to_degrees(s.linkage.shoulder_arm_phase)},
        {"coupler_b", s.linkage.coupler_b},
        {"rocker_arm", s.linkage.rocker_arm},
        {"rocker_arm_phase_deg", to_degrees(s.linkage.rocker_arm_phase)},
        {"shoulder_to_elbow", s.linkage.shoulder_to_elbow},
        {"elbow_lever", s.linkage.elbow_lever},
        {"elbow_lever_phase_deg", to_degrees(s.linkage.elbow_lever_phase)},
        {"rocker_arm2", s.linkage.rocker_arm2},
        {"elbow_link", s.linkage.elbow_link}};
    doc["unsteady"] = ordered_json{{"psi1", s.wagner.psi1},
                                   {"psi2", s.wagner.psi2},
                                   {"eps1", s.wagner.eps1},
                                   {"eps2", s.wagner.eps2},
                                   {"a0", s.wagner.a0},
                                   {"span_stations", s.span_stations}};
    doc["dickinson"] = ordered_json{{"cl0", s.dickinson.cl0},
                                    {"cl_amp", s.dickinson.cl_amp},
                                    {"cl_freq", s.dickinson.cl_freq},
                                    {"cl_phase", s.dickinson.cl_phase},
                                    {"cd0", s.dickinson.cd0},
                                    {"cd_amp", s.dickinson.cd_amp},
                                    {"cd_freq", s.dickinson.cd_freq},
                                    {"cd_phase", s.dickinson.cd_phase}};
    doc["crank"] = ordered_json{{"kp", s.crank.kp}, {"ki", s.crank.ki}};
    doc["wake"] = ordered_json{{"plane_offset", cfg.wake_plane_offset}};
    doc["loadcell"] = ordered_json{{"lowpass_hz", cfg.loadcell_lowpass_hz}};
    return doc.dump(2) + "\n";
}

}  // namespace flapsim
