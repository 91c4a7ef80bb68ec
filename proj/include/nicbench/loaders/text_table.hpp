#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nicbench/errors.hpp"

namespace nicbench::tab {

// Numeric table with a named header, comma- or whitespace-delimited.
// Rows that fail to parse or contain non-finite values are counted in
// bad_rows rather than dropped silently.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::size_t bad_rows = 0;

    int column(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    if (delim == ' ') {
        std::istringstream is(line);
        std::string tok;
        while (is >> tok) out.push_back(tok);
        return out;
    }
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [ptr, ec] = std::from_chars(b, e, out);
    if (ec != std::errc()) return false;
    while (ptr < e && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
    return ptr == e;
}

// Reads a delimited numeric file with a header line. The delimiter is
// detected from the header (comma if present, else whitespace).
inline Table read_table(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ingest_error("cannot open file: " + path);

    Table t;
    std::string line;
    if (!std::getline(is, line)) throw ingest_error("empty file: " + path);
    const char delim = line.find(',') != std::string::npos ? ',' : ' ';
    for (auto& name : split_fields(line, delim)) {
        while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.pop_back();
        t.columns.push_back(name);
    }

    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split_fields(line, delim);
        if (fields.size() != t.columns.size()) {
            ++t.bad_rows;
            continue;
        }
        std::vector<double> row(fields.size());
        bool ok = true;
        for (std::size_t i = 0; i < fields.size() && ok; ++i) {
            if (!parse_double(fields[i], row[i]) || !std::isfinite(row[i])) ok = false;
        }
        if (!ok) {
            ++t.bad_rows;
            continue;
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Headerless whitespace matrix (UCI-HAR inertial signal files). Every row
// must have `width` finite values; short or garbled rows throw.
inline std::vector<std::vector<double>> read_matrix(const std::string& path, std::size_t width) {
    std::ifstream is(path);
    if (!is) throw ingest_error("cannot open file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::vector<double> row;
        row.reserve(width);
        double v;
        while (ls >> v) row.push_back(v);
        if (row.size() != width)
            throw ingest_error(path + ": line " + std::to_string(line_no) + " has " +
                               std::to_string(row.size()) + " values, expected " +
                               std::to_string(width));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace nicbench::tab
