#pragma once

#include <gmpxx.h>

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rksort/rational.hpp"

namespace rksort {

// Sortable key wrapper. Every ordering operator bumps a global counter so
// tests can prove the radix backend never falls back to comparisons. The
// counter is process-wide; reset it before the section you want to measure.
class SortKey {
public:
    SortKey() : value_(0) {}
    explicit SortKey(BigInt value) : value_(std::move(value)) {}

    const BigInt& value() const { return value_; }

    static std::uint64_t comparisons() { return comparisons_.load(std::memory_order_relaxed); }
    static void reset_comparisons() { comparisons_.store(0, std::memory_order_relaxed); }

    friend bool operator==(const SortKey& a, const SortKey& b) { return count(), a.value_ == b.value_; }
    friend bool operator!=(const SortKey& a, const SortKey& b) { return count(), a.value_ != b.value_; }
    friend bool operator<(const SortKey& a, const SortKey& b) { return count(), a.value_ < b.value_; }
    friend bool operator>(const SortKey& a, const SortKey& b) { return count(), a.value_ > b.value_; }
    friend bool operator<=(const SortKey& a, const SortKey& b) { return count(), a.value_ <= b.value_; }
    friend bool operator>=(const SortKey& a, const SortKey& b) { return count(), a.value_ >= b.value_; }

private:
    static void count() { comparisons_.fetch_add(1, std::memory_order_relaxed); }

    BigInt value_;
    inline static std::atomic<std::uint64_t> comparisons_{0};
};

struct KeyRecord {
    SortKey key;
    std::uint64_t input_index = 0;
    std::uint64_t multiplicity = 1;
};

// LSD radix sort over 16-bit digits. Stable, so records with equal keys keep
// their relative order (the pipeline feeds records in input order, making the
// tie-break by input_index automatic). Pass count is ceil(max_key_bits / 16):
// it scales with the widest key, never with n log n, and no SortKey ordering
// operator is ever invoked. Keys must be nonnegative.
inline std::vector<KeyRecord> radix_sort(std::vector<KeyRecord> records,
                                         std::uint64_t* passes_out = nullptr) {
    const std::size_t n = records.size();
    if (n == 0) {
        if (passes_out) *passes_out = 0;
        return records;
    }

    // Export each key as little-endian 16-bit words. mpz_export writes zero
    // words for a zero key, which reads back as all-zero digits below.
    std::vector<std::vector<std::uint16_t>> digits(n);
    std::size_t max_bits = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const mpz_srcptr z = records[i].key.value().get_mpz_t();
        if (mpz_sgn(z) < 0)
            throw std::invalid_argument("radix_sort: negative key");
        if (mpz_sgn(z) == 0) continue;
        std::size_t bits = mpz_sizeinbase(z, 2);
        if (bits > max_bits) max_bits = bits;
        digits[i].resize((bits + 15) / 16);
        std::size_t words = 0;
        mpz_export(digits[i].data(), &words, -1, sizeof(std::uint16_t), 0, 0, z);
        digits[i].resize(words);
    }
    const std::size_t passes = (max_bits + 15) / 16;
    if (passes_out) *passes_out = passes;

    std::vector<std::uint32_t> order(n), next(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);

    std::vector<std::uint32_t> counts(1u << 16);
    for (std::size_t pass = 0; pass < passes; ++pass) {
        std::fill(counts.begin(), counts.end(), 0u);
        auto digit = [&](std::uint32_t rec) -> std::uint16_t {
            const auto& d = digits[rec];
            return pass < d.size() ? d[pass] : 0;
        };
        for (std::size_t i = 0; i < n; ++i) ++counts[digit(order[i])];
        std::uint32_t running = 0;
        for (auto& c : counts) {
            std::uint32_t here = c;
            c = running;
            running += here;
        }
        for (std::size_t i = 0; i < n; ++i) next[counts[digit(order[i])]++] = order[i];
        order.swap(next);
    }

    std::vector<KeyRecord> sorted;
    sorted.reserve(n);
    for (std::uint32_t idx : order) sorted.push_back(std::move(records[idx]));
    return sorted;
}

// Maps the i-th distinct key to i. Requires sorted input; the check compares
// raw BigInts so it does not disturb the SortKey comparison counter.
inline std::vector<std::uint64_t> rank_compress(const std::vector<KeyRecord>& records) {
    std::vector<std::uint64_t> ranks;
    ranks.reserve(records.size());
    std::uint64_t rank = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i > 0) {
            int c = cmp(records[i - 1].key.value(), records[i].key.value());
            if (c > 0)
                throw std::invalid_argument("rank_compress: records not sorted by key");
            if (c < 0) ++rank;
        }
        ranks.push_back(rank);
    }
    return ranks;
}

}  // namespace rksort
