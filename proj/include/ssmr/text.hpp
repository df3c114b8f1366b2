#ifndef SSMR_TEXT_HPP
#define SSMR_TEXT_HPP

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ssmr::detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::string_view unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

/// Splits one row. A space delimiter splits on runs of whitespace; quoted
/// cells may contain the delimiter but not escaped quotes.
inline void split_row(std::string_view line, char delimiter, std::vector<std::string_view>& cells) {
    cells.clear();
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (delimiter == ' ') {
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            if (i == line.size()) break;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
            cells.push_back(line.substr(i, j - i));
            i = j;
        }
        return;
    }
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i < line.size() && line[i] == '"') {
            quoted = !quoted;
        } else if (i == line.size() || (line[i] == delimiter && !quoted)) {
            cells.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline double require_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    if (!parse_double(value, v) || !std::isfinite(v)) {
        throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
    }
    return v;
}

inline std::set<int> parse_int_set(const std::string& key, const std::string& value) {
    std::set<int> out;
    std::vector<std::string_view> parts;
    split_row(value, ',', parts);
    for (auto p : parts) {
        p = trim(p);
        if (p.empty()) continue;
        double v = 0.0;
        if (!parse_double(p, v) || v != std::floor(v)) {
            throw ConfigError("'" + key + "' expects a list of integers, got '" + value + "'");
        }
        out.insert(static_cast<int>(v));
    }
    return out;
}

inline char parse_delimiter(const std::string& value) {
    if (value == "comma" || value == ",") return ',';
    if (value == "tab" || value == "\\t") return '\t';
    if (value == "space" || value == "whitespace") return ' ';
    if (value == "semicolon" || value == ";") return ';';
    if (value.size() == 1) return value[0];
    throw ConfigError("unsupported delimiter '" + value + "'");
}

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_exact(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Rounds to 12 significant digits; used for every number in emitted reports.
inline double round_sig12(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    double out = 0.0;
    parse_double(buf, out);
    return out;
}

inline std::string format_sig12(double v) { return format_exact(round_sig12(v)); }

/// `key = value` lines; `#` starts a comment. Keys keep file order and may repeat.
inline std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        out.emplace_back(std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1))));
    }
    return out;
}

}

#endif
