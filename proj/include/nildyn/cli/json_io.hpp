#pragma once

#include "nildyn/averages/ud.hpp"
#include "nildyn/cloud.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nildyn::cli {

using json = nlohmann::ordered_json;

/// 17 significant digits: every double round-trips.
inline std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// JSON writer that renders floating-point numbers with format17.
inline void write_json(std::ostream& os, const json& j, int indent = 2, int level = 0) {
    auto pad = [&](int l) {
        if (indent >= 0) os << '\n' << std::string(static_cast<std::size_t>(l * indent), ' ');
    };
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{';
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first) os << ',';
            first = false;
            pad(level + 1);
            os << json(k).dump() << (indent >= 0 ? ": " : ":");
            write_json(os, v, indent, level + 1);
        }
        pad(level);
        os << '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << '[';
        bool first = true;
        for (const auto& v : j) {
            if (!first) os << ',';
            first = false;
            pad(level + 1);
            write_json(os, v, indent, level + 1);
        }
        pad(level);
        os << ']';
        return;
    }
    case json::value_t::number_float: {
        double v = j.get<double>();
        if (std::isfinite(v))
            os << format17(v);
        else
            os << "null";
        return;
    }
    default: os << j.dump();
    }
}

inline std::string dump17(const json& j, int indent = 2) {
    std::ostringstream os;
    write_json(os, j, indent);
    return os.str();
}

inline json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

inline json point_json(const Point& p) {
    json a = json::array();
    for (double v : p) a.push_back(v);
    return a;
}

inline std::ofstream open_output(const std::string& path) {
    auto dir = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!dir.empty()) std::filesystem::create_directories(dir, ec);
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
    return f;
}

/// One tuple per row; columns p<k>_<i> for coordinate i of component k.
inline void write_cloud_csv(std::ostream& os, const PointCloud& c) {
    for (std::size_t k = 0; k < c.arity(); ++k)
        for (std::size_t i = 0; i < c.dim(); ++i) os << (k || i ? "," : "") << 'p' << k << '_' << i;
    os << '\n';
    for (std::size_t r = 0; r < c.size(); ++r) {
        auto t = c.tuple(r);
        for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << format17(t[i]);
        os << '\n';
    }
}

inline void write_series_csv(std::ostream& os, const TimeSeries& s) {
    os << (s.is_complex() ? "t,value,imag\n" : "t,value\n");
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << format17(s.grid()[i]) << ',' << format17(s.values()[i].real());
        if (s.is_complex()) os << ',' << format17(s.values()[i].imag());
        os << '\n';
    }
}

/// Parses "t,value[,imag]" rows; a non-numeric first line is a header.
inline TimeSeries read_series_csv(std::istream& is) {
    std::vector<double> grid;
    std::vector<Complex> values;
    bool complex_valued = false;
    std::string line;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        try {
            if (cells.size() < 2 || cells.size() > 3) throw std::invalid_argument("bad column count");
            double t = std::stod(cells[0]);
            double re = std::stod(cells[1]);
            double im = cells.size() == 3 ? std::stod(cells[2]) : 0.0;
            complex_valued = complex_valued || cells.size() == 3;
            grid.push_back(t);
            values.emplace_back(re, im);
        } catch (const std::exception&) {
            if (row == 1 && grid.empty()) continue;
            throw std::invalid_argument("series CSV row " + std::to_string(row) + " is malformed");
        }
    }
    return TimeSeries(std::move(grid), std::move(values), complex_valued);
}

/// Flattens nested objects to dotted keys; arrays of scalars stay arrays.
inline void flatten(const json& j, const std::string& prefix, json& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
        return;
    }
    out[prefix] = j;
}

inline std::string csv_cell(const json& v) {
    if (v.is_number_float()) return format17(v.get<double>());
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    if (v.is_array() || v.is_object()) return csv_cell(json(dump17(v, -1)));
    return v.dump();
}

/// Rows of flattened objects as a CSV table over the union of their keys.
inline void write_rows_csv(std::ostream& os, const std::vector<json>& rows) {
    std::vector<std::string> keys;
    std::vector<json> flat;
    for (const auto& r : rows) {
        json f = json::object();
        flatten(r, "", f);
        for (const auto& [k, v] : f.items())
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
        flat.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << csv_cell(json(keys[i]));
    os << '\n';
    for (const auto& f : flat) {
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (i) os << ',';
            if (f.contains(keys[i])) os << csv_cell(f[keys[i]]);
        }
        os << '\n';
    }
}

} // namespace nildyn::cli
