#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "rksort/radix_sort.hpp"

using rksort::BigInt;
using rksort::KeyRecord;
using rksort::radix_sort;
using rksort::SortKey;

namespace {

std::vector<KeyRecord> make_records(const std::vector<BigInt>& keys) {
    std::vector<KeyRecord> recs;
    recs.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
        recs.push_back({SortKey(keys[i]), i, 1});
    return recs;
}

std::vector<BigInt> keys_of(const std::vector<KeyRecord>& recs) {
    std::vector<BigInt> out;
    out.reserve(recs.size());
    for (const auto& r : recs) out.push_back(r.key.value());
    return out;
}

BigInt random_key(std::mt19937_64& rng, int max_bits) {
    int words = std::uniform_int_distribution<int>(1, std::max(1, max_bits / 32))(rng);
    BigInt v = 0;
    for (int w = 0; w < words; ++w) {
        v <<= 32;
        v += static_cast<unsigned long>(static_cast<std::uint32_t>(rng()));
    }
    return v;
}

// Comparison oracle on raw BigInts, deliberately bypassing SortKey so the
// oracle itself never touches the instrumentation counter.
std::vector<BigInt> oracle_sorted(std::vector<BigInt> keys) {
    std::stable_sort(keys.begin(), keys.end(),
                     [](const BigInt& a, const BigInt& b) { return cmp(a, b) < 0; });
    return keys;
}

}  // namespace

TEST_CASE("three small keys come back in order") {
    auto recs = radix_sort(make_records({BigInt(2), BigInt(4), BigInt(6)}));
    CHECK(keys_of(recs) == std::vector<BigInt>{BigInt(2), BigInt(4), BigInt(6)});
    CHECK(recs[0].input_index == 0);
    CHECK(recs[2].input_index == 2);
}

TEST_CASE("sorted input is left unchanged") {
    std::mt19937_64 rng(11);
    std::vector<BigInt> keys;
    for (int i = 0; i < 1000; ++i) keys.push_back(random_key(rng, 128));
    keys = oracle_sorted(keys);
    auto recs = radix_sort(make_records(keys));
    CHECK(keys_of(recs) == keys);
}

TEST_CASE("reversed input is exactly reversed") {
    std::mt19937_64 rng(12);
    std::vector<BigInt> keys;
    for (int i = 0; i < 500; ++i) keys.push_back(random_key(rng, 96));
    keys = oracle_sorted(keys);
    // Drop duplicates so reversal is the unique sorted permutation.
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::vector<BigInt> reversed(keys.rbegin(), keys.rend());
    auto recs = radix_sort(make_records(reversed));
    CHECK(keys_of(recs) == keys);
    for (std::size_t i = 0; i < recs.size(); ++i)
        CHECK(recs[i].input_index == recs.size() - 1 - i);
}

TEST_CASE("matches the comparison oracle on mixed-width keys") {
    std::mt19937_64 rng(13);
    std::vector<BigInt> keys;
    for (int i = 0; i < 4000; ++i) keys.push_back(random_key(rng, 512));
    keys.push_back(BigInt(0));
    keys.push_back(BigInt(0));
    keys.push_back(BigInt(1) << 511);
    auto recs = radix_sort(make_records(keys));
    CHECK(keys_of(recs) == oracle_sorted(keys));
}

TEST_CASE("equal keys keep input order") {
    std::vector<BigInt> keys;
    for (int i = 0; i < 64; ++i) keys.push_back(BigInt(i % 4));
    auto recs = radix_sort(make_records(keys));
    for (std::size_t i = 1; i < recs.size(); ++i)
        if (recs[i].key.value() == recs[i - 1].key.value())
            CHECK(recs[i].input_index > recs[i - 1].input_index);
}

TEST_CASE("pass count tracks the widest key") {
    std::uint64_t passes = 0;

    radix_sort(make_records({BigInt(0), BigInt(0)}), &passes);
    CHECK(passes == 1);  // zero keys still take one pass over 1 bit

    radix_sort(make_records({BigInt(1), BigInt(65535)}), &passes);
    CHECK(passes == 1);  // 16 bits fit one digit

    radix_sort(make_records({BigInt(65536)}), &passes);
    CHECK(passes == 2);  // 17 bits spill into a second digit

    radix_sort(make_records({BigInt(1) << 299}), &passes);
    CHECK(passes == (300 + 15) / 16);

    radix_sort({}, &passes);
    CHECK(passes == 0);
}

TEST_CASE("radix path performs zero key comparisons") {
    std::mt19937_64 rng(14);
    std::vector<BigInt> keys;
    for (int i = 0; i < 2000; ++i) keys.push_back(random_key(rng, 256));
    auto recs = make_records(keys);

    SortKey::reset_comparisons();
    auto sorted = radix_sort(std::move(recs));
    CHECK(SortKey::comparisons() == 0);

    // Sanity-check the counter itself: a comparison sort over SortKey must
    // register, or the zero above proves nothing.
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const KeyRecord& a, const KeyRecord& b) { return a.key < b.key; });
    CHECK(SortKey::comparisons() > 0);
    SortKey::reset_comparisons();
}

TEST_CASE("negative keys are rejected") {
    CHECK_THROWS_AS(radix_sort(make_records({BigInt(-3)})), std::invalid_argument);
}

TEST_CASE("rank compression maps distinct keys to dense ranks") {
    auto recs = make_records({BigInt(2), BigInt(4), BigInt(6)});
    CHECK(rksort::rank_compress(recs) == std::vector<std::uint64_t>{0, 1, 2});

    auto single = make_records({BigInt(77)});
    CHECK(rksort::rank_compress(single) == std::vector<std::uint64_t>{0});

    auto dup = make_records({BigInt(5), BigInt(5), BigInt(9)});
    CHECK(rksort::rank_compress(dup) == std::vector<std::uint64_t>{0, 0, 1});
}

TEST_CASE("rank compression agrees with comparison positions on random keys") {
    std::mt19937_64 rng(15);
    std::vector<BigInt> keys;
    for (int i = 0; i < 1000; ++i) keys.push_back(random_key(rng, 200));
    auto sorted = radix_sort(make_records(keys));
    auto ranks = rksort::rank_compress(sorted);

    std::vector<BigInt> distinct = oracle_sorted(keys_of(sorted));
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        auto it = std::lower_bound(distinct.begin(), distinct.end(), sorted[i].key.value(),
                                   [](const BigInt& a, const BigInt& b) { return cmp(a, b) < 0; });
        CHECK(ranks[i] == static_cast<std::uint64_t>(it - distinct.begin()));
    }
}

TEST_CASE("rank compression rejects unsorted input") {
    auto recs = make_records({BigInt(4), BigInt(2)});
    CHECK_THROWS_AS(rksort::rank_compress(recs), std::invalid_argument);
}
