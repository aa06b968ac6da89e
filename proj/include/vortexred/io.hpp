#pragma once

// File formats: trajectory and reduced-coordinate CSV, configuration and
// equilibria JSON, portrait CSV. Reals are printed with 17 significant digits.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "vortexred/analysis.hpp"
#include "vortexred/integrator.hpp"
#include "vortexred/portrait.hpp"
#include "vortexred/quotient.hpp"
#include "vortexred/vortex_dynamics.hpp"

namespace vortexred::io {

using nlohmann::json;

inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_real(const std::string& s) {
    if (s == "+inf" || s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("malformed number '" + s + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

/// Write `content` to a sibling temporary file and rename it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write to " + tmp + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot move output into " + path.string() + ": " + ec.message());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Trajectory CSV: t,x1,y1,...,xN,yN,H,Jrot,Jtx,Jty

inline std::string trajectory_header(std::size_t n_vortex) {
    std::string h = "t";
    for (std::size_t n = 1; n <= n_vortex; ++n) {
        h += ",x" + std::to_string(n) + ",y" + std::to_string(n);
    }
    return h + ",H,Jrot,Jtx,Jty";
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << trajectory_header(traj.strengths().size()) << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << format_real(traj.times()[k]);
        for (const Complex& z : traj.states()[k].positions()) {
            out << ',' << format_real(z.real()) << ',' << format_real(z.imag());
        }
        const auto& d = traj.diagnostics()[k];
        out << ',' << format_real(d.energy) << ',' << format_real(d.momentum.rot) << ','
            << format_real(d.momentum.tx) << ',' << format_real(d.momentum.ty) << '\n';
    }
}

/// Positions are read back; the diagnostic columns are recomputed from them.
inline Trajectory read_trajectory_csv(std::istream& in, const Strengths& strengths) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty trajectory CSV");
    if (line != trajectory_header(strengths.size())) {
        throw std::invalid_argument("unexpected trajectory CSV header: " + line);
    }
    Trajectory traj(strengths);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 1 + 2 * strengths.size() + 4) {
            throw std::invalid_argument("row " + std::to_string(row) + ": wrong column count");
        }
        std::vector<double> state(2 * strengths.size());
        for (std::size_t i = 0; i < state.size(); ++i) state[i] = parse_real(fields[1 + i]);
        traj.append(parse_real(fields[0]), PlanarConfig::from_state(state, strengths));
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Reduced-coordinate CSV: t,w1,w2,w3,p1,p2,p3,q1,q2,q3,h,theta,Hred

struct CoordinateSelection {
    bool w = true;
    bool p = true;
    bool q = true;
    bool cyl = true;

    static CoordinateSelection parse(const std::string& text) {
        if (text == "all") return {};
        CoordinateSelection s{false, false, false, false};
        std::istringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item == "w") s.w = true;
            else if (item == "p") s.p = true;
            else if (item == "q") s.q = true;
            else if (item == "cyl") s.cyl = true;
            else if (item == "all") s = {};
            else throw std::invalid_argument("unknown coordinate set '" + item + "'");
        }
        return s;
    }
};

inline std::string reduced_header(const CoordinateSelection& sel) {
    std::string h = "t";
    if (sel.w) h += ",w1,w2,w3";
    if (sel.p) h += ",p1,p2,p3";
    if (sel.q) h += ",q1,q2,q3";
    if (sel.cyl) h += ",h,theta";
    return h + ",Hred";
}

inline void write_reduced_csv(std::ostream& out, const std::vector<double>& times,
                              const std::vector<ReducedCoordinates>& rows, const CoordinateSelection& sel = {}) {
    if (times.size() != rows.size()) throw std::invalid_argument("times and rows differ in length");
    out << reduced_header(sel) << '\n';
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        out << format_real(times[k]);
        if (sel.w) out << ',' << format_real(r.w.x()) << ',' << format_real(r.w.y()) << ',' << format_real(r.w.z());
        if (sel.p) out << ',' << format_real(r.p.p1) << ',' << format_real(r.p.p2) << ',' << format_real(r.p.p3);
        if (sel.q) out << ',' << format_real(r.q.q1) << ',' << format_real(r.q.q2) << ',' << format_real(r.q.q3);
        if (sel.cyl) out << ',' << format_real(r.cyl.h) << ',' << format_real(r.cyl.theta);
        out << ',' << format_real(r.energy) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Configuration JSON: {"gamma", "alpha", "strengths"?, "positions": [[x, y], ...]}

struct LoadedConfig {
    SystemParams params;
    PlanarConfig config;
};

inline LoadedConfig config_from_json(const json& j) {
    const double gamma = j.value("gamma", 3.0);
    const double alpha = j.value("alpha", 1.0);
    SystemParams params(gamma, alpha);
    if (!j.contains("positions") || !j["positions"].is_array()) {
        throw std::invalid_argument("configuration JSON needs a 'positions' array");
    }
    std::vector<Complex> z;
    for (const auto& p : j["positions"]) {
        if (!p.is_array() || p.size() != 2) throw std::invalid_argument("each position must be [x, y]");
        z.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    Strengths strengths = Strengths::distinguished(gamma);
    if (j.contains("strengths")) {
        strengths = Strengths(j["strengths"].get<std::vector<double>>());
    } else if (z.size() != 4) {
        throw std::invalid_argument("'strengths' may only be omitted for the 4-vortex instance");
    }
    return {params, PlanarConfig(std::move(z), std::move(strengths))};
}

inline json config_to_json(const SystemParams& params, const PlanarConfig& config) {
    json positions = json::array();
    for (const Complex& z : config.positions()) positions.push_back({z.real(), z.imag()});
    return {{"gamma", params.gamma()},
            {"alpha", params.alpha()},
            {"strengths", std::vector<double>(config.strengths().values().begin(), config.strengths().values().end())},
            {"positions", positions}};
}

// ---------------------------------------------------------------------------
// Equilibria JSON and portrait CSV

inline json equilibria_to_json(const std::vector<EquilibriumReport>& reports) {
    json out = json::array();
    for (const auto& r : reports) {
        out.push_back({{"w", {r.point.w1(), r.point.w2(), r.point.w3()}},
                       {"kind", to_string(r.kind)},
                       {"energy", r.energy},
                       {"hessian_eigs", {r.hessian_eigs[0], r.hessian_eigs[1]}}});
    }
    return out;
}

inline void write_portrait_csv(std::ostream& out, const std::vector<OrbitRecord>& orbits) {
    out << "orbit_id,t,h,theta,H,family\n";
    for (const auto& o : orbits) {
        for (const auto& s : o.samples) {
            out << o.id << ',' << format_real(s.t) << ',' << format_real(s.h) << ',' << format_real(s.theta) << ','
                << format_real(s.energy) << ',' << to_string(o.family) << '\n';
        }
    }
}

}  // namespace vortexred::io
