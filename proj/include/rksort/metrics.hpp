#pragma once

// Operation counters for the conversion pipeline, plus the CSV schema used
// by the CLI bench/metrics output. Counters count model operations (probes,
// descent steps, ladder writes); wall-clock nanoseconds are tracked per
// phase so big-integer cost stays visible next to the unit-cost counts.

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rksort {

struct MetricsRecord {
    std::uint64_t n = 0;
    std::uint64_t probes = 0;
    std::uint64_t match_steps = 0;
    std::uint64_t levels_pushed = 0;
    std::uint64_t max_top = 0;
    std::uint64_t merge_rekeys = 0;
    std::uint64_t ladder_writes = 0;
    std::uint64_t max_key_bits = 0;
    std::uint64_t branch_count = 0;
    std::uint64_t insert_ns = 0;
    std::uint64_t merge_ns = 0;
    std::uint64_t finalize_ns = 0;
    std::uint64_t sort_ns = 0;

    bool operator==(const MetricsRecord&) const = default;

    void note_top(std::uint64_t top) {
        if (top > max_top) max_top = top;
    }
};

inline constexpr const char* kMetricsCsvHeader =
    "n,probes,match_steps,levels_pushed,max_top,merge_rekeys,ladder_writes,"
    "max_key_bits,branch_count,insert_ns,merge_ns,finalize_ns,sort_ns";

inline constexpr int kMetricsFieldCount = 13;

inline std::string to_csv(const MetricsRecord& m) {
    std::ostringstream out;
    out << m.n << ',' << m.probes << ',' << m.match_steps << ','
        << m.levels_pushed << ',' << m.max_top << ',' << m.merge_rekeys << ','
        << m.ladder_writes << ',' << m.max_key_bits << ',' << m.branch_count
        << ',' << m.insert_ns << ',' << m.merge_ns << ',' << m.finalize_ns
        << ',' << m.sort_ns;
    return out.str();
}

inline MetricsRecord metrics_from_csv(const std::string& row) {
    std::vector<std::uint64_t> fields;
    std::size_t pos = 0;
    while (pos <= row.size()) {
        std::size_t comma = row.find(',', pos);
        std::string cell = row.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (cell.empty() ||
            cell.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad metrics cell '" + cell + "'");
        fields.push_back(std::stoull(cell));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (fields.size() != kMetricsFieldCount)
        throw std::invalid_argument("expected " +
                                    std::to_string(kMetricsFieldCount) +
                                    " metrics fields, got " +
                                    std::to_string(fields.size()));
    MetricsRecord m;
    m.n = fields[0];
    m.probes = fields[1];
    m.match_steps = fields[2];
    m.levels_pushed = fields[3];
    m.max_top = fields[4];
    m.merge_rekeys = fields[5];
    m.ladder_writes = fields[6];
    m.max_key_bits = fields[7];
    m.branch_count = fields[8];
    m.insert_ns = fields[9];
    m.merge_ns = fields[10];
    m.finalize_ns = fields[11];
    m.sort_ns = fields[12];
    return m;
}

}  // namespace rksort
