#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <vector>

#include "rksort/converter.hpp"
#include "rksort/radix_sort.hpp"

namespace rksort {

// End-to-end result: permutation[i] is the input row that belongs at output
// position i. values/keys list the distinct values in output order.
struct SortOutcome {
    std::vector<std::size_t> permutation;
    std::vector<ExactReal> values;
    std::vector<BigInt> keys;
    MetricsRecord metrics;
    std::uint64_t radix_passes = 0;
};

inline SortOutcome sort_values(const std::vector<ExactReal>& input, ConverterConfig cfg) {
    SortOutcome out;
    if (input.empty()) return out;

    ConvertResult conv = convert(input, cfg);

    auto t0 = std::chrono::steady_clock::now();
    std::vector<KeyRecord> records;
    records.reserve(conv.values.size());
    for (std::size_t vid = 0; vid < conv.values.size(); ++vid)
        records.push_back({SortKey(conv.keys[vid]), conv.indices[vid].front(),
                           conv.indices[vid].size()});
    records = radix_sort(std::move(records), &out.radix_passes);

    out.permutation.reserve(input.size());
    out.values.reserve(records.size());
    out.keys.reserve(records.size());
    for (const KeyRecord& rec : records) {
        // indices are recorded ascending, so duplicates come out in input
        // order and the whole sort is stable.
        std::uint32_t vid = conv.value_of_input[rec.input_index];
        for (std::uint64_t idx : conv.indices[vid]) out.permutation.push_back(idx);
        // conv.values holds the rescaled copies; report the original.
        out.values.push_back(input[conv.indices[vid].front()]);
        out.keys.push_back(conv.keys[vid]);
    }
    auto t1 = std::chrono::steady_clock::now();

    out.metrics = conv.metrics;
    out.metrics.sort_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
    return out;
}

inline SortOutcome sort_values(const std::vector<ExactReal>& input,
                               std::uint64_t bit_cap = 1048576, bool audit = false) {
    if (input.empty()) return SortOutcome{};
    return sort_values(input, make_config(input.size(), bit_cap, audit));
}

// Stable comparison sort of row indices; the reference everything is checked
// against.
inline std::vector<std::size_t> oracle_permutation(const std::vector<ExactReal>& input) {
    std::vector<std::size_t> perm(input.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return input[a] < input[b]; });
    return perm;
}

}  // namespace rksort
