#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypangle/geometry.hpp"
#include "hypangle/table.hpp"

namespace tool {

inline hypangle::Point parse_point(const std::string& s) {
    std::istringstream in(s);
    double x = 0.0, y = 0.0;
    char comma = 0;
    if (!(in >> x >> comma >> y) || comma != ',' || !in.eof())
        throw std::invalid_argument("expected a coordinate pair x,y: " + s);
    return {x, y};
}

struct Grid {
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t steps = 1;

    std::vector<double> points() const {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(steps) + 1);
        for (std::int64_t k = 0; k <= steps; ++k)
            out.push_back(lo + (hi - lo) * static_cast<double>(k) /
                                   static_cast<double>(steps));
        return out;
    }
};

// "start:stop:steps" with steps subintervals (steps+1 grid points).
inline Grid parse_grid(const std::string& s) {
    Grid g;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.steps) || c1 != ':' || c2 != ':' ||
        !in.eof() || g.steps < 1 || !(g.hi > g.lo))
        throw std::invalid_argument("expected a grid start:stop:steps: " + s);
    return g;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) out.push_back(item);
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

inline double parse_real(const std::string& s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
}

inline std::vector<double> parse_real_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) out.push_back(parse_real(item));
    return out;
}

inline std::vector<std::int64_t> parse_int_list(const std::string& s) {
    std::vector<std::int64_t> out;
    for (const auto& item : split_list(s)) {
        std::size_t pos = 0;
        out.push_back(std::stoll(item, &pos));
        if (pos != item.size()) throw std::invalid_argument("bad integer: " + item);
    }
    return out;
}

// Value as it appears in the emitted table: formatted, then parsed back.
// Summary statistics are computed from these so that a consumer parsing the
// table reproduces the summary exactly.
inline double reparse(double v) {
    return std::strtod(hypangle::format_number(v).c_str(), nullptr);
}

inline void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << body;
}

struct OutputOpts {
    std::string format = "csv";
    std::string output;
    std::string summary;
};

inline void emit_table(const hypangle::Table& table, const OutputOpts& opts) {
    const std::string body = opts.format == "json" ? table.json() : table.csv();
    if (opts.output.empty())
        std::cout << body;
    else
        write_text(opts.output, body);
}

inline void emit_summary(const hypangle::JsonObject& summary, const OutputOpts& opts) {
    if (opts.summary.empty())
        std::cerr << summary.str() << '\n';
    else
        write_text(opts.summary, summary.str() + "\n");
}

}  // namespace tool
