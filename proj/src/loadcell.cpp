#include "flapsim/loadcell.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "flapsim/errors.hpp"

namespace flapsim {
namespace {

constexpr const char* kHeader = "t_s,fx_N,fy_N,fz_N,tx_Nmm,ty_Nmm,tz_Nmm";

std::string strip(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& field, int row, int col) {
    const std::string f = strip(field);
    const char* begin = f.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw FormatError("load-cell row " + std::to_string(row) + ", column " +
                          std::to_string(col + 1) + ": bad numeric field '" + field +
                          "'");
    return v;
}

// Single-pole RC pass run forward then backward: zero phase lag, two poles.
void lowpass_channel(const std::vector<double>& t, Eigen::Ref<Eigen::VectorXd> x,
                     double cutoff_hz) {
    const int n = static_cast<int>(t.size());
    if (n < 2) return;
    const double rc = 1.0 / (2.0 * M_PI * cutoff_hz);
    for (int i = 1; i < n; ++i) {
        const double dt = t[i] - t[i - 1];
        const double a = dt / (rc + dt);
        x[i] = x[i - 1] + a * (x[i] - x[i - 1]);
    }
    for (int i = n - 2; i >= 0; --i) {
        const double dt = t[i + 1] - t[i];
        const double a = dt / (rc + dt);
        x[i] = x[i + 1] + a * (x[i] - x[i + 1]);
    }
}

}  // namespace

double detect_frequency(const std::vector<double>& t, const Eigen::VectorXd& x,
                        bool* flapping) {
    if (flapping != nullptr) *flapping = false;
    const int n = static_cast<int>(t.size());
    if (n < 8 || x.size() != n) return 0.0;

    const double mean = x.mean();
    const double sd = std::sqrt((x.array() - mean).square().mean());
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) return 0.0;

    // Decimate long traces; detection targets flapping-rate oscillations, not
    // the full sensor bandwidth.
    const int stride = std::max(1, n / 4096);
    std::vector<double> td;
    std::vector<double> xd;
    for (int i = 0; i < n; i += stride) {
        td.push_back(t[i] - t[0]);
        xd.push_back(x[i] - mean);
    }
    const int m = static_cast<int>(td.size());
    const double span = td.back();
    if (!(span > 0.0)) return 0.0;

    std::vector<double> dts(m - 1);
    for (int i = 0; i + 1 < m; ++i) dts[i] = td[i + 1] - td[i];
    std::nth_element(dts.begin(), dts.begin() + (m - 1) / 2, dts.end());
    const double med_dt = dts[(m - 1) / 2];

    for (int i = 0; i < m; ++i)
        xd[i] *= 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (m - 1)));

    const auto power = [&](double f) {
        std::complex<double> acc(0.0, 0.0);
        for (int i = 0; i < m; ++i)
            acc += xd[i] * std::exp(std::complex<double>(0.0, -2.0 * M_PI * f * td[i]));
        return std::norm(acc);
    };

    const double f_lo = 0.5 / span;
    const double f_hi = std::max(f_lo * 2.0, std::min(0.45 / med_dt, 100.0));
    const double step = std::max(0.25 / span, (f_hi - f_lo) / 2000.0);

    double best_f = f_lo;
    double best_p = 0.0;
    double sum_p = 0.0;
    int count = 0;
    for (double f = f_lo; f <= f_hi; f += step) {
        const double p = power(f);
        sum_p += p;
        ++count;
        if (p > best_p) {
            best_p = p;
            best_f = f;
        }
    }
    if (count == 0 || !(best_p > 5.0 * sum_p / count)) return 0.0;

    // Golden-section refinement around the coarse peak.
    double lo = std::max(f_lo, best_f - 1.5 * step);
    double hi = best_f + 1.5 * step;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double pc = power(c);
    double pd = power(d);
    for (int it = 0; it < 60; ++it) {
        if (pc > pd) {
            hi = d;
            d = c;
            pd = pc;
            c = hi - gr * (hi - lo);
            pc = power(c);
        } else {
            lo = c;
            c = d;
            pc = pd;
            d = lo + gr * (hi - lo);
            pd = power(d);
        }
    }
    if (flapping != nullptr) *flapping = true;
    return 0.5 * (lo + hi);
}

LoadCellTrace ingest_loadcell_text(const std::string& text, double lowpass_hz) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    LoadCellTrace trace;
    std::vector<std::array<double, 7>> rows;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string s = strip(line);
        if (s.empty()) continue;

        if (s[0] == '#') {
            if (header_seen) continue;  // trailing comments are ignored
            std::istringstream meta(s.substr(1));
            std::string key;
            double value = 0.0;
            if (meta >> key >> value) {
                if (key == "airspeed") trace.airspeed = value;
                if (key == "nominal_frequency") trace.nominal_frequency = value;
            }
            continue;
        }

        if (!header_seen) {
            if (s != kHeader)
                throw FormatError("load-cell header mismatch: expected '" +
                                  std::string(kHeader) + "', got '" + s + "'");
            header_seen = true;
            continue;
        }

        std::array<double, 7> row;
        size_t pos = 0;
        for (int col = 0; col < 7; ++col) {
            const size_t comma = s.find(',', pos);
            const bool last = col == 6;
            if (last != (comma == std::string::npos))
                throw FormatError("load-cell row " + std::to_string(lineno) +
                                  ": expected 7 comma-separated fields");
            const std::string field =
                last ? s.substr(pos) : s.substr(pos, comma - pos);
            row[col] = parse_number(field, lineno, col);
            pos = comma + 1;
        }
        bool finite = true;
        for (double v : row) finite = finite && std::isfinite(v);
        if (!finite) {
            ++trace.dropped_rows;
            continue;
        }
        rows.push_back(row);
    }

    if (!header_seen) throw FormatError("load-cell file has no header line");
    if (rows.empty()) throw FormatError("load-cell file has no data rows");

    const int n = static_cast<int>(rows.size());
    trace.t.resize(n);
    trace.force.resize(n, 3);
    trace.torque.resize(n, 3);
    for (int i = 0; i < n; ++i) {
        trace.t[i] = rows[i][0];
        trace.force.row(i) << rows[i][1], rows[i][2], rows[i][3];
        trace.torque.row(i) << rows[i][4], rows[i][5], rows[i][6];
    }

    for (int i = 1; i < n; ++i) {
        if (!(trace.t[i] > trace.t[i - 1]))
            throw FormatError("load-cell time not strictly increasing at sample " +
                              std::to_string(i) + " (t=" + std::to_string(trace.t[i]) +
                              ")");
    }

    if (n >= 3) {
        std::vector<double> dts(n - 1);
        for (int i = 0; i + 1 < n; ++i) dts[i] = trace.t[i + 1] - trace.t[i];
        std::vector<double> sorted = dts;
        std::nth_element(sorted.begin(), sorted.begin() + (n - 1) / 2, sorted.end());
        const double med = sorted[(n - 1) / 2];
        for (int i = 0; i + 1 < n; ++i) {
            if (dts[i] > 5.0 * med)
                throw GapError("load-cell gap of " + std::to_string(dts[i]) +
                               " s at t=" + std::to_string(trace.t[i]) +
                               " exceeds 5x the median interval " +
                               std::to_string(med) + " s");
        }
    }

    if (lowpass_hz > 0.0) {
        for (int c = 0; c < 3; ++c) {
            lowpass_channel(trace.t, trace.force.col(c), lowpass_hz);
            lowpass_channel(trace.t, trace.torque.col(c), lowpass_hz);
        }
    }

    trace.detected_frequency =
        detect_frequency(trace.t, trace.force.col(0), &trace.flapping);
    return trace;
}

LoadCellTrace ingest_loadcell(const std::string& path, double lowpass_hz) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open load-cell file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return ingest_loadcell_text(buf.str(), lowpass_hz);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    } catch (const GapError& e) {
        throw GapError(path + ": " + e.what());
    }
}

}  // namespace flapsim
