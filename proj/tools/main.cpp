#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flapsim/compare.hpp"
#include "flapsim/config.hpp"
#include "flapsim/errors.hpp"
#include "flapsim/export.hpp"
#include "flapsim/loadcell.hpp"
#include "flapsim/simulator.hpp"
#include "flapsim/wake.hpp"

namespace fs = std::filesystem;
using namespace flapsim;

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + dir.string() + ": " +
                          ec.message());
}

AeroMode parse_mode(const std::string& mode) {
    if (mode == "quasisteady") return AeroMode::kQuasisteady;
    if (mode == "wagner") return AeroMode::kWagner;
    throw ConfigError("unknown aero mode '" + mode +
                      "', expected quasisteady or wagner");
}

const char* mode_name(AeroMode m) {
    return m == AeroMode::kWagner ? "wagner" : "quasisteady";
}

double mean_lift(const ForceRecord& rec) {
    if (rec.samples.empty()) return 0.0;
    double s = 0.0;
    for (const ForceSample& f : rec.samples) s += f.force.z();
    return s / static_cast<double>(rec.samples.size());
}

double mean_drag(const ForceRecord& rec) {
    if (rec.samples.empty()) return 0.0;
    double s = 0.0;
    for (const ForceSample& f : rec.samples) s += -f.force.x();
    return s / static_cast<double>(rec.samples.size());
}

void write_run_outputs(const fs::path& dir, const RunConfig& cfg,
                       const SimResult& res) {
    write_file((dir / "effective_config.json").string(), echo_config(cfg));
    write_file((dir / "forces.csv").string(),
               record_csv(res.record, cfg.sim.airspeed, cfg.sim.flap_frequency));
    if (cfg.sim.aero == AeroMode::kWagner)
        write_file((dir / "snapshots.csv").string(), snapshots_csv(res.record));
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::string& mode) {
    RunConfig cfg = parse_config(config_path);
    if (!mode.empty()) cfg.sim.aero = parse_mode(mode);
    ensure_dir(out_dir);
    const SimResult res = run(cfg.sim);
    write_run_outputs(out_dir, cfg, res);
    std::printf("simulate[%s]: %zu samples over %s s, mean lift %.6g N, mean drag %.6g N\n",
                mode_name(cfg.sim.aero), res.record.samples.size(),
                format_number(cfg.sim.duration).c_str(), mean_lift(res.record),
                mean_drag(res.record));
    std::printf("wrote %s\n", (fs::path(out_dir) / "forces.csv").string().c_str());
    return 0;
}

int cmd_compare(const std::string& config_path, const std::string& loadcell_path,
                const std::string& out_dir) {
    RunConfig cfg = parse_config(config_path);
    ensure_dir(out_dir);
    const LoadCellTrace trace =
        ingest_loadcell(loadcell_path, cfg.loadcell_lowpass_hz);
    if (trace.dropped_rows > 0)
        std::printf("load-cell: dropped %d non-finite rows\n", trace.dropped_rows);
    if (trace.flapping)
        std::printf("load-cell: flapping at %.4g Hz\n", trace.detected_frequency);
    else
        std::printf("load-cell: trace is not flapping\n");

    write_file((fs::path(out_dir) / "effective_config.json").string(),
               echo_config(cfg));
    std::string report;
    for (AeroMode m : {AeroMode::kQuasisteady, AeroMode::kWagner}) {
        RunConfig rc = cfg;
        rc.sim.aero = m;
        const SimResult res = run(rc.sim);
        const ComparisonReport rep =
            compare(res.record, trace, rc.sim.flap_frequency);
        const std::string name = mode_name(m);
        write_file((fs::path(out_dir) / ("forces_" + name + ".csv")).string(),
                   record_csv(res.record, rc.sim.airspeed, rc.sim.flap_frequency));
        if (m == AeroMode::kWagner)
            write_file((fs::path(out_dir) / "snapshots.csv").string(),
                       snapshots_csv(res.record));
        report += report_text(name, rep);
        report += "\n";
        std::printf("%s: rms lift %.6g N, rms drag %.6g N, offset %.4g s\n",
                    name.c_str(), rep.rms_lift, rep.rms_drag,
                    rep.alignment_offset);
    }
    write_file((fs::path(out_dir) / "report.txt").string(), report);
    std::printf("wrote %s\n", (fs::path(out_dir) / "report.txt").string().c_str());
    return 0;
}

int cmd_wake(const std::string& config_path, const std::string& out_dir,
             const double* plane_offset) {
    RunConfig cfg = parse_config(config_path);
    if (plane_offset != nullptr) cfg.wake_plane_offset = *plane_offset;
    cfg.sim.aero = AeroMode::kWagner;  // the wake needs circulation history
    ensure_dir(out_dir);
    const SimResult res = run(cfg.sim);
    const WakeSheet sheet = shed_wake(res.record, cfg.sim, cfg.sim.duration);
    if (sheet.degenerate_convection)
        std::printf("warning: no freestream; wake convected by the mean "
                    "trailing-edge drift\n");
    const PlaneSpec plane = default_plane(cfg.sim, cfg.wake_plane_offset);
    const WakeGrid grid = sample_plane(sheet, plane);
    write_file((fs::path(out_dir) / "effective_config.json").string(),
               echo_config(cfg));
    write_file((fs::path(out_dir) / "wake_grid.csv").string(),
               wake_grid_csv(grid, cfg.sim.duration));
    std::printf("wake: %zu filaments over %d rows, grid %dx%d\n",
                sheet.filaments.size(), sheet.rows, plane.n1, plane.n2);
    std::printf("wrote %s\n",
                (fs::path(out_dir) / "wake_grid.csv").string().c_str());
    return 0;
}

struct SweepSpec {
    std::string pointer;  // json pointer to the varied key
    std::string key;      // dotted form, for reporting
    std::vector<double> values;
};

SweepSpec parse_vary(const std::string& vary) {
    const size_t eq = vary.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= vary.size())
        throw ConfigError("--vary expects key=lo:step:hi or key=v1,v2,...");
    SweepSpec spec;
    spec.key = vary.substr(0, eq);
    spec.pointer = "/" + spec.key;
    for (char& c : spec.pointer)
        if (c == '.') c = '/';

    const std::string rhs = vary.substr(eq + 1);
    const auto parse_num = [&](const std::string& s) {
        try {
            size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("--vary: bad number '" + s + "'");
        }
    };

    if (rhs.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        size_t pos = 0;
        while (true) {
            const size_t c = rhs.find(':', pos);
            parts.push_back(rhs.substr(pos, c - pos));
            if (c == std::string::npos) break;
            pos = c + 1;
        }
        if (parts.size() != 3)
            throw ConfigError("--vary range must be lo:step:hi");
        const double lo = parse_num(parts[0]);
        const double step = parse_num(parts[1]);
        const double hi = parse_num(parts[2]);
        if (!(step > 0.0) || hi < lo)
            throw ConfigError("--vary range must have step > 0 and hi >= lo");
        for (double v = lo; v <= hi + 1e-9 * step; v += step)
            spec.values.push_back(v);
    } else {
        size_t pos = 0;
        while (true) {
            const size_t c = rhs.find(',', pos);
            spec.values.push_back(parse_num(rhs.substr(pos, c - pos)));
            if (c == std::string::npos) break;
            pos = c + 1;
        }
    }
    if (spec.values.empty()) throw ConfigError("--vary produced no values");
    return spec;
}

int cmd_sweep(const std::string& config_path, const std::string& vary,
              const std::string& out_dir) {
    const SweepSpec spec = parse_vary(vary);
    parse_config(config_path);  // surface base-config errors before spawning

    std::ifstream in(config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json base = nlohmann::json::parse(buf.str());

    const int n = static_cast<int>(spec.values.size());
    std::vector<RunConfig> cfgs(n);
    std::vector<fs::path> dirs(n);
    for (int i = 0; i < n; ++i) {
        nlohmann::json doc = base;
        const double v = spec.values[i];
        // Integral values go in as integers so integer-typed keys accept them.
        if (v == std::floor(v) && std::abs(v) < 1e9)
            doc[nlohmann::json::json_pointer(spec.pointer)] =
                static_cast<int64_t>(v);
        else
            doc[nlohmann::json::json_pointer(spec.pointer)] = v;
        try {
            cfgs[i] = parse_config_text(doc.dump());
        } catch (const ConfigError& e) {
            throw ConfigError(spec.key + "=" + format_number(v) + ": " + e.what());
        }
        char name[32];
        std::snprintf(name, sizeof(name), "run_%03d", i);
        dirs[i] = fs::path(out_dir) / name;
        ensure_dir(dirs[i]);
    }

    // One simulation per value, batched to the hardware thread count. Each
    // run writes only inside its own directory.
    std::vector<SimResult> results(n);
    std::vector<std::exception_ptr> errors(n);
    const int batch = std::max(1u, std::thread::hardware_concurrency());
    for (int start = 0; start < n; start += batch) {
        std::vector<std::thread> pool;
        const int end = std::min(n, start + batch);
        for (int i = start; i < end; ++i) {
            pool.emplace_back([i, &cfgs, &dirs, &results, &errors] {
                try {
                    results[i] = run(cfgs[i].sim);
                    write_run_outputs(dirs[i], cfgs[i], results[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }
    for (int i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);

    std::string summary = "index," + spec.key + ",mean_lift_N,mean_drag_N,peak_lift_N\n";
    for (int i = 0; i < n; ++i) {
        double peak = 0.0;
        for (const ForceSample& f : results[i].record.samples)
            peak = std::max(peak, f.force.z());
        summary += std::to_string(i) + "," + format_number(spec.values[i]) + "," +
                   format_number(mean_lift(results[i].record)) + "," +
                   format_number(mean_drag(results[i].record)) + "," +
                   format_number(peak) + "\n";
    }
    write_file((fs::path(out_dir) / "sweep_summary.csv").string(), summary);
    std::printf("sweep: %d runs over %s, wrote %s\n", n, spec.key.c_str(),
                (fs::path(out_dir) / "sweep_summary.csv").string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flapping-wing flight simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string mode;
    std::string loadcell_path;
    std::string vary;
    double plane_offset = 0.0;

    CLI::App* sim = app.add_subcommand("simulate", "run one simulation");
    sim->add_option("--config", config_path, "run configuration file")->required();
    sim->add_option("--out", out_dir, "output directory")->required();
    sim->add_option("--mode", mode, "aero mode: quasisteady or wagner");

    CLI::App* cmp = app.add_subcommand(
        "compare", "simulate both aero modes and hold them against a load-cell trace");
    cmp->add_option("--config", config_path, "run configuration file")->required();
    cmp->add_option("--loadcell", loadcell_path, "load-cell CSV")->required();
    cmp->add_option("--out", out_dir, "output directory")->required();

    CLI::App* wake = app.add_subcommand("wake", "reconstruct the wake on a plane");
    wake->add_option("--config", config_path, "run configuration file")->required();
    wake->add_option("--out", out_dir, "output directory")->required();
    CLI::Option* po =
        wake->add_option("--plane-offset", plane_offset,
                         "plane distance downstream of the trailing edge, m");

    CLI::App* sweep = app.add_subcommand("sweep", "vary one config key across runs");
    sweep->add_option("--config", config_path, "run configuration file")->required();
    sweep->add_option("--vary", vary, "key=lo:step:hi or key=v1,v2,...")->required();
    sweep->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, mode);
        if (cmp->parsed()) return cmd_compare(config_path, loadcell_path, out_dir);
        if (wake->parsed())
            return cmd_wake(config_path, out_dir, po->count() > 0 ? &plane_offset : nullptr);
        if (sweep->parsed()) return cmd_sweep(config_path, vary, out_dir);
    } catch (const ConfigFailure& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
