#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rksort/rational.hpp"

namespace rksort {

// One value per line, "p/q" or a finite decimal. '#' lines and blank lines
// are skipped. texts keeps each value's original (trimmed) spelling so output
// can reproduce the input bytes instead of a normalized form.
struct ParsedInput {
    std::vector<std::string> texts;
    std::vector<ExactReal> values;
};

namespace detail {
inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}
}  // namespace detail

inline ParsedInput read_values(std::istream& in) {
    ParsedInput out;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view token = detail::trim(line);
        if (token.empty() || token.front() == '#') continue;
        try {
            out.values.push_back(ExactReal::parse(token));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        out.texts.emplace_back(token);
    }
    return out;
}

inline ParsedInput read_values_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_values(in);
}

inline void write_lines(std::ostream& out, const std::vector<std::string>& lines) {
    for (const auto& l : lines) out << l << '\n';
}

inline void write_lines_file(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_lines(out, lines);
}

}  // namespace rksort
