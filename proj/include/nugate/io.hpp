#pragma once

// File formats used by the command-line harness: input loaders, tables and
// the JSON report envelope. Depends on nlohmann/json, so it is not pulled in
// by nugate.hpp.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "nugate/errors.hpp"
#include "nugate/ising.hpp"
#include "nugate/sigma.hpp"
#include "nugate/state_vector.hpp"

namespace nugate::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// 17 significant digits; NaN and infinities as nan / inf / -inf.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// A cell is text, an integer, a real, or empty.
using Cell = std::variant<std::monostate, std::string, long long, double>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw ArgumentError("Table " + name + ": row width mismatch");
        rows.push_back(std::move(row));
    }
};

inline std::string cell_text(const Cell& c) {
    if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
    if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
    if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
    return "";
}

inline json cell_json(const Cell& c) {
    if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
    if (std::holds_alternative<long long>(c)) return std::get<long long>(c);
    if (std::holds_alternative<double>(c)) {
        const double x = std::get<double>(c);
        if (std::isfinite(x)) return x;
        return format_double(x);  // JSON has no NaN / inf
    }
    return nullptr;
}

inline std::string to_csv(const Table& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
        os << '\n';
    }
    return os.str();
}

inline json to_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        rows.push_back(std::move(r));
    }
    return {{"columns", t.columns}, {"rows", std::move(rows)}};
}

struct Report {
    std::string command;
    std::uint64_t seed = 0;
    json parameters = json::object();
    std::vector<Table> tables;
    json summary = json::object();
};

inline json to_json(const Report& r) {
    json tables = json::object();
    for (const auto& t : r.tables) tables[t.name] = to_json(t);
    return {{"schema_version", kSchemaVersion}, {"command", r.command}, {"seed", r.seed},
            {"parameters", r.parameters},       {"tables", std::move(tables)}, {"summary", r.summary}};
}

enum class Format { csv, json };

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ArgumentError("cannot write " + p.string());
    f << text;
}

/// csv: one file per table, <command>_<table>.csv, plus <command>_summary.json.
/// json: a single <command>.json. Returns the paths written.
inline std::vector<std::filesystem::path> write_report(const Report& r, const std::filesystem::path& dir, Format fmt) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> out;
    if (fmt == Format::json) {
        out.push_back(dir / (r.command + ".json"));
        write_text(out.back(), to_json(r).dump(2) + "\n");
        return out;
    }
    for (const auto& t : r.tables) {
        out.push_back(dir / (r.command + "_" + t.name + ".csv"));
        write_text(out.back(), to_csv(t));
    }
    json s = to_json(r);
    s.erase("tables");
    out.push_back(dir / (r.command + "_summary.json"));
    write_text(out.back(), s.dump(2) + "\n");
    return out;
}

// ---------------------------------------------------------------------------
// Inputs

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw ArgumentError("cannot read " + p.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline json read_json(const std::filesystem::path& p) {
    try {
        return json::parse(read_text(p));
    } catch (const json::parse_error& e) {
        throw ArgumentError(p.string() + ": " + e.what());
    }
}

/// One real per line; blank lines and lines starting with '#' are skipped.
inline DiagonalSigma parse_sigma_text(const std::string& text) {
    std::istringstream is(text);
    std::vector<double> v;
    std::string line;
    while (std::getline(is, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(line.substr(first), &used);
        } catch (const std::exception&) {
            throw ArgumentError("Sigma file: not a number: " + line);
        }
        if (line.find_first_not_of(" \t\r", first + used) != std::string::npos)
            throw ArgumentError("Sigma file: trailing characters: " + line);
        v.push_back(x);
    }
    return DiagonalSigma::normalized(std::move(v));
}

inline DiagonalSigma load_sigma(const std::filesystem::path& p) { return parse_sigma_text(read_text(p)); }

/// Array of rows, each an array of [re, im] pairs.
inline Matrix parse_matrix(const json& j) {
    if (!j.is_array() || j.empty()) throw ArgumentError("matrix: expected a non-empty array of rows");
    const std::size_t cols = j.at(0).is_array() ? j.at(0).size() : 0;
    if (cols == 0) throw ArgumentError("matrix: empty row");
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw ArgumentError("matrix: ragged rows");
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& e = j[r][c];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw ArgumentError("matrix: entries must be [re, im] pairs");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

inline Matrix load_matrix(const std::filesystem::path& p) { return parse_matrix(read_json(p)); }

struct Grid {
    std::vector<double> eta, epsilon;
};

inline std::vector<double> positive_list(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].empty())
        throw ArgumentError(std::string("grid: '") + key + "' must be a non-empty array");
    std::vector<double> v;
    for (const auto& x : j[key]) {
        if (!x.is_number() || !(x.get<double>() > 0.0))
            throw ArgumentError(std::string("grid: '") + key + "' entries must be positive numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

inline Grid parse_grid(const json& j) {
    Grid g{positive_list(j, "eta"), positive_list(j, "epsilon")};
    for (const double e : g.eta)
        if (!(e < 1.0)) throw ArgumentError("grid: eta entries must lie in (0, 1)");
    return g;
}

struct ChainSpec {
    IsingChain chain;
    double tau = 0.0;
};

/// {sites, couplings | seed, tau}
inline ChainSpec parse_chain(const json& j) {
    if (!j.contains("sites") || !j["sites"].is_number_integer()) throw ArgumentError("chain: 'sites' required");
    const auto sites = j["sites"].get<long long>();
    if (sites < 2) throw ArgumentError("chain: sites must be >= 2");
    ChainSpec c;
    if (j.contains("couplings")) {
        const auto cp = j["couplings"].get<std::vector<int>>();
        if (cp.size() != static_cast<std::size_t>(sites - 1)) throw ArgumentError("chain: need sites - 1 couplings");
        c.chain = IsingChain(cp);
    } else if (j.contains("seed")) {
        Rng rng(j["seed"].get<std::uint64_t>());
        c.chain = random_chain(static_cast<std::size_t>(sites), rng);
    } else {
        throw ArgumentError("chain: 'couplings' or 'seed' required");
    }
    c.tau = j.value("tau", 0.0);
    if (!(c.tau >= 0.0)) throw ArgumentError("chain: tau must be non-negative");
    return c;
}

struct PlanSpec {
    ChainSpec chain;
    std::optional<std::uint64_t> k;  // nullopt = auto
    std::string mode = "exact";
};

/// {chain: {...}, tau, k: n | "auto", mode: "exact" | "sampled"}; a top-level
/// tau overrides the chain's.
inline PlanSpec parse_plan(const json& j) {
    if (!j.contains("chain")) throw ArgumentError("plan: 'chain' required");
    PlanSpec p{parse_chain(j["chain"]), std::nullopt, j.value("mode", std::string("exact"))};
    if (j.contains("tau")) p.chain.tau = j["tau"].get<double>();
    if (j.contains("k")) {
        if (j["k"].is_string()) {
            if (j["k"].get<std::string>() != "auto") throw ArgumentError("plan: k must be a count or \"auto\"");
        } else {
            const auto k = j["k"].get<long long>();
            if (k < 1) throw ArgumentError("plan: k must be >= 1");
            p.k = static_cast<std::uint64_t>(k);
        }
    }
    if (p.mode != "exact" && p.mode != "sampled") throw ArgumentError("plan: mode must be exact or sampled");
    return p;
}

}  // namespace nugate::io
