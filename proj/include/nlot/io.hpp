#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlot/analysis.hpp"
#include "nlot/geodesic.hpp"
#include "nlot/kernel.hpp"
#include "nlot/state_space.hpp"

namespace nlot {

inline const char* library_version() { return "1.0.0"; }

// configuration shape or value errors; the CLI maps these to exit code 2
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

// Canonical digest: FNV-1a over the sorted-key JSON dump. nlohmann objects
// keep keys sorted, so dump() is canonical for semantically equal configs.
inline std::string config_digest(const json& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.dump())));
    return buf;
}

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Config -> domain objects, mirroring the published schema. Structural
// violations throw ConfigError with the offending path in the message.
// ---------------------------------------------------------------------------
namespace detail {
inline const json& need(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string(where) + ": missing required key '" + key + "'");
    return *it;
}
inline double need_number(const json& j, const char* key, const char* where) {
    const json& v = need(j, key, where);
    if (!v.is_number()) throw ConfigError(std::string(where) + "." + key + ": expected a number");
    return v.get<double>();
}
inline std::string need_string(const json& j, const char* key, const char* where) {
    const json& v = need(j, key, where);
    if (!v.is_string()) throw ConfigError(std::string(where) + "." + key + ": expected a string");
    return v.get<std::string>();
}
}  // namespace detail

inline StateSpace space_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("space: expected an object");
    std::string type = detail::need_string(j, "type", "space");
    if (type == "lattice") {
        const json& ext = detail::need(j, "extents", "space");
        if (!ext.is_array() || ext.empty() || ext.size() > 2)
            throw ConfigError("space.extents: expected an array of 1 or 2 integers");
        std::vector<int> extents;
        for (const auto& e : ext) {
            if (!e.is_number_integer() || e.get<int>() < 1)
                throw ConfigError("space.extents: entries must be positive integers");
            extents.push_back(e.get<int>());
        }
        double h = j.contains("h") ? detail::need_number(j, "h", "space") : 1.0;
        return make_lattice(extents, h);
    }
    if (type == "general") {
        const json& pos = detail::need(j, "positions", "space");
        const json& m = detail::need(j, "m", "space");
        if (!pos.is_array() || !m.is_array() || pos.size() != m.size() || pos.empty())
            throw ConfigError("space: positions and m must be equal-length nonempty arrays");
        std::vector<std::vector<double>> p;
        std::vector<double> w;
        for (const auto& row : pos) {
            if (!row.is_array() || row.empty())
                throw ConfigError("space.positions: expected an array of coordinate arrays");
            p.push_back(row.get<std::vector<double>>());
        }
        for (const auto& v : m) {
            if (!v.is_number()) throw ConfigError("space.m: expected numbers");
            w.push_back(v.get<double>());
        }
        return make_general(p, w);
    }
    throw ConfigError("space.type: expected 'lattice' or 'general'");
}

inline JumpKernel kernel_from_json(const StateSpace& sp, const json& j) {
    if (!j.is_object()) throw ConfigError("kernel: expected an object");
    std::string type = detail::need_string(j, "type", "kernel");
    if (type == "fractional") {
        return build_fractional(sp, detail::need_number(j, "alpha", "kernel"),
                                detail::need_number(j, "R", "kernel"),
                                detail::need_number(j, "c", "kernel"));
    }
    if (type == "translation_invariant") {
        const json& disp = detail::need(j, "disp", "kernel");
        const json& nu = detail::need(j, "nu", "kernel");
        if (!disp.is_array() || !nu.is_array() || disp.size() != nu.size() || disp.empty())
            throw ConfigError("kernel: disp and nu must be equal-length nonempty arrays");
        std::vector<std::vector<int>> d;
        for (const auto& row : disp) {
            if (!row.is_array()) throw ConfigError("kernel.disp: expected arrays of integers");
            d.push_back(row.get<std::vector<int>>());
        }
        return make_translation_invariant(sp, d, nu.get<std::vector<double>>());
    }
    if (type == "dense") {
        const json& J = detail::need(j, "J", "kernel");
        if (!J.is_array()) throw ConfigError("kernel.J: expected a flat row-major array");
        return make_dense_kernel(sp, J.get<std::vector<double>>());
    }
    throw ConfigError("kernel.type: expected 'fractional', 'translation_invariant', or 'dense'");
}

inline Mean mean_from_json(const json& j) {
    if (!j.is_string()) throw ConfigError("mean: expected a string");
    try {
        return Mean::from_string(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline SolverConfig solver_from_json(const json& j) {
    SolverConfig cfg;
    if (j.is_null()) return cfg;
    if (!j.is_object()) throw ConfigError("solver: expected an object");
    auto get_int = [&](const char* key, int& slot, int lo) {
        if (!j.contains(key)) return;
        if (!j[key].is_number_integer() || j[key].get<int>() < lo)
            throw ConfigError(std::string("solver.") + key + ": expected an integer >= " +
                              std::to_string(lo));
        slot = j[key].get<int>();
    };
    auto get_pos = [&](const char* key, double& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_number() || !(j[key].get<double>() > 0))
            throw ConfigError(std::string("solver.") + key + ": expected a positive number");
        slot = j[key].get<double>();
    };
    get_int("K", cfg.K, 1);
    get_int("max_iter", cfg.max_iter, 1);
    get_int("check_every", cfg.check_every, 1);
    get_int("stall_window", cfg.stall_window, 1);
    get_pos("tol_res", cfg.tol_res);
    get_pos("tol_gap", cfg.tol_gap);
    get_pos("step_scale", cfg.step_scale);
    get_pos("step_ratio", cfg.step_ratio);
    get_pos("horizon", cfg.horizon);
    if (j.contains("delta_ladder")) {
        const json& dl = j["delta_ladder"];
        if (!dl.is_array()) throw ConfigError("solver.delta_ladder: expected an array");
        auto v = dl.get<std::vector<double>>();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!(v[i] > 0 && v[i] < 1)) throw ConfigError("solver.delta_ladder: levels must lie in (0,1)");
            if (i && !(v[i] < v[i - 1]))
                throw ConfigError("solver.delta_ladder: levels must be strictly decreasing");
        }
        cfg.delta_ladder = v;
    }
    if (!(cfg.step_scale < 1)) throw ConfigError("solver.step_scale: must be below 1");
    return cfg;
}

// endpoint constructors: uniform | delta:<i> | bump:<center>:<concentration> | file:<path>
inline Density density_from_spec(const StateSpace& sp, const std::string& spec) {
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            auto pos = s.find(':', start);
            parts.push_back(s.substr(start, pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        return parts;
    };
    auto parts = split(spec);
    try {
        if (parts[0] == "uniform" && parts.size() == 1) return uniform_density(sp);
        if (parts[0] == "delta" && parts.size() == 2) return delta_density(sp, std::stoi(parts[1]));
        if (parts[0] == "bump" && parts.size() == 3)
            return bump_density(sp, std::stod(parts[1]), std::stod(parts[2]));
        if (parts[0] == "file" && parts.size() >= 2) {
            std::ifstream in(spec.substr(5));
            if (!in) throw ConfigError("density file not found: " + spec.substr(5));
            std::vector<double> vals;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                vals.push_back(std::stod(line));
            }
            return make_density(sp, vals);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("density '") + spec + "': " + e.what());
    } catch (const std::out_of_range& e) {
        throw ConfigError(std::string("density '") + spec + "': " + e.what());
    }
    throw ConfigError("density '" + spec +
                      "': expected uniform | delta:<i> | bump:<center>:<conc> | file:<path>");
}

// ---------------------------------------------------------------------------
// Output documents. Every file starts with a meta header carrying the library
// version and the config digest.
// ---------------------------------------------------------------------------
inline json meta_block(const json& config) {
    return json{{"tool", "nlot"}, {"version", library_version()}, {"config_digest", config_digest(config)}};
}

inline std::string csv_header(const json& config) {
    return "# nlot " + std::string(library_version()) + " config " + config_digest(config) + "\n";
}

inline json report_to_json(const CheckReport& r) {
    json m = json::object();
    for (const auto& [k, v] : r.measured) m[k] = v;
    return json{{"name", r.name},         {"pass", r.pass},   {"slack", r.slack},
                {"tolerance", r.tolerance}, {"runtime_ms", r.runtime_ms}, {"measured", m},
                {"note", r.note}};
}

// one JSON object per line: meta first, then each report
inline std::string reports_to_jsonl(const std::vector<CheckReport>& reports, const json& config) {
    std::string out = meta_block(config).dump() + "\n";
    for (const auto& r : reports) out += report_to_json(r).dump() + "\n";
    return out;
}

inline std::string summary_csv(const std::vector<CheckReport>& reports, const json& config) {
    std::string out = csv_header(config) + "name,pass,slack,tolerance,runtime_ms\n";
    for (const auto& r : reports)
        out += r.name + "," + (r.pass ? "1" : "0") + "," + fmt_double(r.slack) + "," +
               fmt_double(r.tolerance) + "," + fmt_double(r.runtime_ms) + "\n";
    return out;
}

// long format: one row per (slice, state) for densities, (slice, edge) for momenta
inline std::string path_to_csv(const Path& p, const json& config) {
    std::string out = csv_header(config) + "kind,step,index,value\n";
    for (std::size_t k = 0; k < p.rho.size(); ++k)
        for (std::size_t i = 0; i < p.rho[k].size(); ++i)
            out += "rho," + std::to_string(k) + "," + std::to_string(i) + "," +
                   fmt_double(p.rho[k][i]) + "\n";
    for (std::size_t k = 0; k < p.nu.size(); ++k)
        for (std::size_t e = 0; e < p.nu[k].size(); ++e)
            out += "nu," + std::to_string(k + 1) + "," + std::to_string(e) + "," +
                   fmt_double(p.nu[k][e]) + "\n";
    return out;
}

inline std::string density_to_csv(const Density& rho, const json& config) {
    std::string out = csv_header(config) + "index,value\n";
    for (std::size_t i = 0; i < rho.size(); ++i)
        out += std::to_string(i) + "," + fmt_double(rho[i]) + "\n";
    return out;
}

inline std::string symbol_to_csv(const std::vector<double>& eta, const json& config) {
    std::string out = csv_header(config) + "frequency,eta\n";
    for (std::size_t f = 0; f < eta.size(); ++f)
        out += std::to_string(f) + "," + fmt_double(eta[f]) + "\n";
    return out;
}

inline json geodesic_result_json(const GeodesicResult& res, const json& config) {
    json out;
    out["meta"] = meta_block(config);
    out["W"] = std::isinf(res.W) ? json("infinite") : json(res.W);
    out["converged"] = res.converged;
    out["iterations"] = res.iterations;
    out["per_interval_action"] = res.per_interval_action;
    out["constant_speed_deviation"] = constant_speed_deviation(res.per_interval_action);
    out["ce_residual"] = res.ce_res;
    out["primal_residual"] = res.primal_residual;
    out["dual_residual"] = res.dual_residual;
    if (!res.delta_levels.empty()) {
        out["delta_levels"] = res.delta_levels;
        out["delta_W"] = res.delta_W;
        out["ladder_monotone"] = res.ladder_monotone;
    }
    if (!res.message.empty()) out["message"] = res.message;
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace nlot
