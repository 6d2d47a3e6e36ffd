#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hypangle {

// 12 significant digits; positional notation while it stays readable,
// scientific otherwise; trailing zeros trimmed.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    const double av = std::abs(v);
    char buf[512];
    if (av < 1e15) {
        int decimals = 11 - static_cast<int>(std::floor(std::log10(av)));
        if (decimals < 0) decimals = 0;
        std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
        std::string s(buf);
        if (s.find('.') != std::string::npos) {
            while (!s.empty() && s.back() == '0') s.pop_back();
            if (!s.empty() && s.back() == '.') s.pop_back();
        }
        return s;
    }
    std::snprintf(buf, sizeof(buf), "%.11e", v);
    std::string s(buf);
    const auto epos = s.find('e');
    std::string mant = s.substr(0, epos);
    std::string exp = s.substr(epos);
    if (mant.find('.') != std::string::npos) {
        while (!mant.empty() && mant.back() == '0') mant.pop_back();
        if (!mant.empty() && mant.back() == '.') mant.pop_back();
    }
    return mant + exp;
}

inline std::string json_quote(const std::string& s) {
    std::string out = "\"";
    for (const char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
    return out;
}

struct Cell {
    std::string text;
    bool is_string = false;
};

inline Cell num_cell(double v) { return {format_number(v), false}; }
inline Cell int_cell(std::int64_t v) { return {std::to_string(v), false}; }
inline Cell str_cell(std::string s) { return {std::move(s), true}; }

// Column-ordered table rendered as CSV (LF line ends, minimal quoting) or
// as a JSON array of flat objects.
class Table {
  public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<Cell> cells) {
        if (cells.size() != columns_.size())
            throw std::invalid_argument("row width does not match header");
        rows_.push_back(std::move(cells));
    }

    std::size_t row_count() const { return rows_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }

    std::string csv() const {
        std::string out;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) out += ',';
            out += csv_field(columns_[i]);
        }
        out += '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += csv_field(row[i].text);
            }
            out += '\n';
        }
        return out;
    }

    std::string json() const {
        std::string out = "[";
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            out += r ? ",\n " : "\n ";
            out += '{';
            for (std::size_t i = 0; i < columns_.size(); ++i) {
                if (i) out += ',';
                out += json_quote(columns_[i]);
                out += ':';
                out += json_value(rows_[r][i]);
            }
            out += '}';
        }
        out += rows_.empty() ? "]" : "\n]";
        out += '\n';
        return out;
    }

  private:
    static std::string csv_field(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (const char ch : s) {
            if (ch == '"') out += '"';
            out += ch;
        }
        out += '"';
        return out;
    }

    static std::string json_value(const Cell& cell) {
        if (cell.is_string || cell.text == "nan" || cell.text == "inf" ||
            cell.text == "-inf")
            return json_quote(cell.text);
        return cell.text;
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

// Flat JSON object with insertion-ordered keys, for run summaries.
class JsonObject {
  public:
    JsonObject& put_num(const std::string& key, double v) {
        const std::string s = format_number(v);
        if (s == "nan" || s == "inf" || s == "-inf") return add(key, json_quote(s));
        return add(key, s);
    }
    JsonObject& put_int(const std::string& key, std::int64_t v) {
        return add(key, std::to_string(v));
    }
    JsonObject& put_str(const std::string& key, const std::string& v) {
        return add(key, json_quote(v));
    }
    JsonObject& put_bool(const std::string& key, bool v) {
        return add(key, v ? "true" : "false");
    }

    std::string str() const {
        std::string out = "{";
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (i) out += ',';
            out += json_quote(items_[i].first);
            out += ':';
            out += items_[i].second;
        }
        out += "}";
        return out;
    }

  private:
    JsonObject& add(const std::string& key, std::string value) {
        items_.emplace_back(key, std::move(value));
        return *this;
    }

    std::vector<std::pair<std::string, std::string>> items_;
};

}  // namespace hypangle
