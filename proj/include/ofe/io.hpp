#pragma once

// File plumbing: CSV tables with full-precision numeric cells, JSON files,
// and the FNV-1a content hash used to fingerprint resolved configurations.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ofe/errors.hpp"

namespace ofe {

// 17 significant digits: doubles survive a write/parse round trip bit-exactly
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_number(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || !end || *end != '\0')
        throw IoError("not a number: '" + s + "'");
    return v;
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string config_hash(const nlohmann::json& j) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

// Comma-separated table. Comment lines start with '#' and precede the header
// row; cells are stored verbatim as text.
struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace detail

inline void write_table_csv(const std::string& path, const Table& t) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    for (const auto& c : t.comments) f << "# " << c << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        f << (i ? "," : "") << t.columns[i];
    f << '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size())
            throw IoError("row width mismatch writing " + path);
        for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
        f << '\n';
    }
    f.flush();
    if (!f) throw IoError("write failed: " + path);
}

inline Table read_table_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    Table t;
    std::string line;
    bool have_header = false;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = line.find_first_not_of(" \t", 1);
            t.comments.push_back(start == std::string::npos ? "" : line.substr(start));
            continue;
        }
        auto cells = detail::split_csv_line(line);
        if (!have_header) {
            t.columns = std::move(cells);
            have_header = true;
        } else {
            if (cells.size() != t.columns.size())
                throw IoError("row width mismatch reading " + path);
            t.rows.push_back(std::move(cells));
        }
    }
    if (!have_header) throw IoError("no header row in " + path);
    return t;
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << j.dump(2) << '\n';
    f.flush();
    if (!f) throw IoError("write failed: " + path);
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
}

} // namespace ofe
