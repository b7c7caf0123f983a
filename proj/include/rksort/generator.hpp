#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rksort/rational.hpp"

namespace rksort {

enum class Distribution { uniform, clustered, geometric_gaps, duplicates_heavy };

inline Distribution parse_distribution(std::string_view name) {
    if (name == "uniform") return Distribution::uniform;
    if (name == "clustered") return Distribution::clustered;
    if (name == "geometric-gaps") return Distribution::geometric_gaps;
    if (name == "duplicates-heavy") return Distribution::duplicates_heavy;
    throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
}

struct GenParams {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::uint64_t max_k = 64;  // geometric-gaps only: tightest pair sits 2^-max_k apart
};

namespace detail {

// "0." + 18 random digits. Collisions are possible but astronomically rare,
// which is what we want from the uniform case.
inline std::string uniform_decimal(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint64_t> d(0, 999'999'999'999'999'999ull);
    std::string frac = std::to_string(d(rng));
    frac.insert(0, 18 - frac.size(), '0');
    return "0." + frac;
}

inline std::vector<std::string> gen_uniform(std::mt19937_64& rng, std::uint64_t n) {
    std::vector<std::string> lines;
    lines.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) lines.push_back(uniform_decimal(rng));
    return lines;
}

// sqrt(n) cluster centers on a 2^20 grid, samples within 2^-20 of a center.
// Keeps many values agreeing on coarse floors, which is the stress case for
// the level machinery.
inline std::vector<std::string> gen_clustered(std::mt19937_64& rng, std::uint64_t n) {
    std::uint64_t centers = 1;
    while (centers * centers < n) ++centers;
    std::vector<std::uint64_t> grid(centers);
    for (auto& c : grid) c = rng() % (1ull << 20);
    std::vector<std::string> lines;
    lines.reserve(n);
    BigInt den = BigInt(1) << 50;
    for (std::uint64_t i = 0; i < n; ++i) {
        std::uint64_t c = grid[rng() % centers];
        std::uint64_t offset = rng() % (1ull << 30);
        BigInt num = BigInt(static_cast<unsigned long>(c)) << 30;
        num += static_cast<unsigned long>(offset);
        lines.push_back(ExactReal(num, den).to_string());
    }
    return lines;
}

// m = n/2 pairs on an evenly spaced, seed-jittered grid in (0,1). Pair j sits
// 2^-k_j apart with k_j sweeping linearly up to exactly max_k, so the minimum
// adjacent gap of the whole file is 2^-max_k. k is floored at the collision
// threshold (gaps must stay well under the grid spacing), so a max_k below
// that floor is raised to it.
inline std::vector<std::string> gen_geometric(std::mt19937_64& rng, std::uint64_t n,
                                              std::uint64_t max_k) {
    std::vector<std::string> lines;
    lines.reserve(n);
    std::uint64_t m = n / 2;
    if (n % 2 == 1)
        lines.push_back(ExactReal(BigInt(1), BigInt(8 * std::max<std::uint64_t>(m, 1))).to_string());
    if (m == 0) {
        if (lines.empty()) lines.push_back("1/2");
        return lines;
    }
    std::uint64_t k_min = 1;
    while ((1ull << k_min) < 8 * m) ++k_min;
    ++k_min;
    if (max_k < k_min) max_k = k_min;
    BigInt den = BigInt(4 * m) << 21;
    for (std::uint64_t j = 0; j < m; ++j) {
        std::uint64_t jitter = rng() % (1ull << 20);
        BigInt num = BigInt(static_cast<unsigned long>(4 * j + 1)) << 21;
        num += static_cast<unsigned long>(jitter);
        ExactReal base(num, den);
        std::uint64_t k = m == 1 ? max_k : k_min + ((max_k - k_min) * j) / (m - 1);
        ExactReal gap(BigInt(1), BigInt(1) << k);
        lines.push_back(base.to_string());
        lines.push_back((base + gap).to_string());
    }
    return lines;
}

// Samples drawn from a pool half the size of the output, so repeats are
// guaranteed by pigeonhole for n >= 2 and sit around 50% of the file.
inline std::vector<std::string> gen_duplicates(std::mt19937_64& rng, std::uint64_t n) {
    std::uint64_t pool_size = std::max<std::uint64_t>(1, n / 2);
    std::vector<std::string> pool;
    pool.reserve(pool_size);
    for (std::uint64_t i = 0; i < pool_size; ++i) pool.push_back(uniform_decimal(rng));
    std::vector<std::string> lines;
    lines.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) lines.push_back(pool[rng() % pool_size]);
    return lines;
}

}  // namespace detail

// Deterministic under (distribution, params): same arguments, same file.
inline std::vector<std::string> generate(Distribution dist, const GenParams& params) {
    if (params.n == 0) throw std::invalid_argument("generator needs n >= 1");
    std::mt19937_64 rng(params.seed);
    switch (dist) {
        case Distribution::uniform: return detail::gen_uniform(rng, params.n);
        case Distribution::clustered: return detail::gen_clustered(rng, params.n);
        case Distribution::geometric_gaps: return detail::gen_geometric(rng, params.n, params.max_k);
        case Distribution::duplicates_heavy: return detail::gen_duplicates(rng, params.n);
    }
    throw std::invalid_argument("unknown distribution");
}

}  // namespace rksort
