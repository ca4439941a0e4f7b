#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vfe/core.hpp"
#include "vfe/diagnostics.hpp"

namespace vfe {

inline constexpr int kSnapshotSchema = 1;

// Shortest form is not needed; 17 significant digits round-trip a double.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& what) {
    const char* b = s.c_str();
    char* end = nullptr;
    const double x = std::strtod(b, &end);
    if (end == b) throw ValidationError(what + ": cannot parse number '" + s + "'");
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0') throw ValidationError(what + ": trailing characters in '" + s + "'");
    return x;
}

inline std::string boundary_name(Boundary b) {
    return b == Boundary::Periodic ? "periodic" : "half-line";
}

inline Boundary parse_boundary(const std::string& s) {
    if (s == "half-line") return Boundary::HalfLine;
    if (s == "periodic") return Boundary::Periodic;
    throw ValidationError("grid.boundary must be 'half-line' or 'periodic' (got '" + s + "')");
}

inline GridSpec make_grid(Boundary b, std::size_t n, double length) {
    return b == Boundary::Periodic ? GridSpec::periodic(n, length) : GridSpec::half_line(n, length);
}

struct Snapshot {
    GridSpec grid = GridSpec::half_line(16, 1.0);
    SimParams params;
    double t = 0.0;
    Field3 v;
    Field3 x;  // optional
};

inline void write_snapshot(std::ostream& os, const Snapshot& snap) {
    require_aligned(snap.v.size(), snap.grid, "write_snapshot");
    const bool has_x = !snap.x.empty();
    if (has_x) require_aligned(snap.x.size(), snap.grid, "write_snapshot");
    os << "# vfe snapshot\n";
    os << "schema_version " << kSnapshotSchema << "\n";
    os << "grid.n " << snap.grid.n() << "\n";
    os << "grid.length " << fmt17(snap.grid.length()) << "\n";
    os << "grid.boundary " << boundary_name(snap.grid.boundary()) << "\n";
    os << "params.alpha " << fmt17(snap.params.alpha) << "\n";
    os << "params.delta " << fmt17(snap.params.delta) << "\n";
    os << "params.stencil_order " << snap.params.stencil_order << "\n";
    os << "t " << fmt17(snap.t) << "\n";
    os << "has_x " << (has_x ? 1 : 0) << "\n";
    os << (has_x ? "columns s vx vy vz xx xy xz\n" : "columns s vx vy vz\n");
    for (std::size_t i = 0; i < snap.v.size(); ++i) {
        os << fmt17(snap.grid.s(i));
        for (int c = 0; c < 3; ++c) os << ' ' << fmt17(snap.v[i][c]);
        if (has_x)
            for (int c = 0; c < 3; ++c) os << ' ' << fmt17(snap.x[i][c]);
        os << '\n';
    }
}

inline void write_snapshot(const std::string& path, const Snapshot& snap) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_snapshot(os, snap);
    if (!os) throw IoError("write failed for '" + path + "'");
}

inline Snapshot read_snapshot(std::istream& is, const std::string& name = "snapshot") {
    std::string line;
    auto next = [&](const std::string& key) {
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::string k, val;
            ls >> k;
            std::getline(ls >> std::ws, val);
            if (k != key) throw IoError(name + ": expected '" + key + "', found '" + k + "'");
            return val;
        }
        throw IoError(name + ": truncated header, missing '" + key + "'");
    };
    const int schema = static_cast<int>(parse_double(next("schema_version"), name));
    if (schema != kSnapshotSchema)
        throw IoError(name + ": unsupported schema_version " + std::to_string(schema));
    Snapshot snap;
    const auto n = static_cast<std::size_t>(parse_double(next("grid.n"), name));
    const double length = parse_double(next("grid.length"), name);
    snap.grid = make_grid(parse_boundary(next("grid.boundary")), n, length);
    snap.params.alpha = parse_double(next("params.alpha"), name);
    snap.params.delta = parse_double(next("params.delta"), name);
    snap.params.stencil_order = static_cast<int>(parse_double(next("params.stencil_order"), name));
    snap.t = parse_double(next("t"), name);
    const bool has_x = parse_double(next("has_x"), name) != 0.0;
    next("columns");
    const int ncol = has_x ? 7 : 4;
    snap.v.resize(n);
    if (has_x) snap.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(is, line)) throw IoError(name + ": expected " + std::to_string(n) + " rows");
        std::istringstream ls(line);
        std::vector<double> vals;
        std::string tok;
        while (ls >> tok) vals.push_back(parse_double(tok, name));
        if (static_cast<int>(vals.size()) != ncol)
            throw IoError(name + ": row " + std::to_string(i) + " has " + std::to_string(vals.size()) +
                          " columns");
        snap.v[i] = {vals[1], vals[2], vals[3]};
        if (has_x) snap.x[i] = {vals[4], vals[5], vals[6]};
    }
    if (!all_finite(snap.v)) throw IoError(name + ": non-finite values");
    return snap;
}

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open snapshot '" + path + "'");
    return read_snapshot(is, path);
}

// ---------------------------------------------------------------------------
// Diagnostics CSV: fixed leading columns, then boundary residuals ("bnd:")
// and identity residuals ("id:") in key order.

inline std::vector<std::string> csv_columns(const DiagnosticsRecord& r) {
    std::vector<std::string> cols{"t",        "unit_norm_drift", "norm_vs",    "norm_vss",
                                  "norm_vsss", "energy_E2",      "modified_E3"};
    for (const auto& [k, v] : r.boundary_residuals) cols.push_back("bnd:" + k);
    for (const auto& [k, v] : r.identity_residuals) cols.push_back("id:" + k);
    return cols;
}

inline void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records) {
    if (records.empty()) throw ValidationError("write_diagnostics_csv: no records");
    const auto cols = csv_columns(records.front());
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : records) {
        if (csv_columns(r) != cols) throw ValidationError("write_diagnostics_csv: inconsistent columns");
        os << fmt17(r.t) << ',' << fmt17(r.unit_norm_drift) << ',' << fmt17(r.norm_vs) << ','
           << fmt17(r.norm_vss) << ',' << fmt17(r.norm_vsss) << ',' << fmt17(r.energy_E2) << ','
           << fmt17(r.modified_E3);
        for (const auto& [k, v] : r.boundary_residuals) os << ',' << fmt17(v);
        for (const auto& [k, v] : r.identity_residuals) os << ',' << fmt17(v);
        os << '\n';
    }
}

inline void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                                  const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_diagnostics_csv(os, records);
    if (!os) throw IoError("write failed for '" + path + "'");
}

inline std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("diagnostics csv: empty");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    std::vector<DiagnosticsRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string c;
        std::vector<double> vals;
        while (std::getline(ss, c, ',')) vals.push_back(parse_double(c, "diagnostics csv"));
        if (vals.size() != cols.size()) throw IoError("diagnostics csv: ragged row");
        DiagnosticsRecord r;
        r.t = vals[0];
        r.unit_norm_drift = vals[1];
        r.norm_vs = vals[2];
        r.norm_vss = vals[3];
        r.norm_vsss = vals[4];
        r.energy_E2 = vals[5];
        r.modified_E3 = vals[6];
        for (std::size_t i = 7; i < cols.size(); ++i) {
            if (cols[i].rfind("bnd:", 0) == 0)
                r.boundary_residuals[cols[i].substr(4)] = vals[i];
            else if (cols[i].rfind("id:", 0) == 0)
                r.identity_residuals[cols[i].substr(3)] = vals[i];
            else
                throw IoError("diagnostics csv: unknown column '" + cols[i] + "'");
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace vfe
