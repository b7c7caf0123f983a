#pragma once

// Level stack S and the per-level sparse tables. Each level is a
// power-of-two scale factor; the table at level S[i] maps integer keys
// floor(r * S[i]) to tree nodes. Tables are sparse hash maps because the
// factors grow far beyond anything a direct-addressed array could hold.
//
// Tree shape: a node at stack index i hangs off the node at index
// i & (i - 1) (lowest set bit cleared), so the path from the root to any
// index follows the binary decomposition of the index. Keys along that
// path are right-shifts of the leaf key, which is what makes the power-
// of-two descent in Match work.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rksort/metrics.hpp"
#include "rksort/rational.hpp"
#include "rksort/scale.hpp"

namespace rksort {

// Hash over limb content so arbitrary-precision keys can live in an
// unordered_map without detouring through decimal strings.
struct BigIntHash {
    std::size_t operator()(const BigInt& v) const noexcept {
        const mpz_srcptr z = v.get_mpz_t();
        std::size_t h = 1469598103934665603ull ^
                        static_cast<std::size_t>(mpz_sgn(z) + 1);
        for (std::size_t i = 0, limbs = mpz_size(z); i < limbs; ++i) {
            h ^= static_cast<std::size_t>(mpz_getlimbn(z, i));
            h *= 1099511628211ull;
        }
        return h;
    }
};

inline constexpr std::uint32_t kNoValue = 0xffffffffu;

struct Node {
    std::size_t level = 0;  // index into the stack
    BigInt key;
    Node* parent = nullptr;  // ladder parent (level index with lowest set bit cleared)
    // Some value whose key chain passes through this cell. Cells never move
    // and values never change, so the representative always matches here.
    std::uint32_t rep_value = kNoValue;
    bool has_bucket = false;
    std::vector<std::uint32_t> bucket;  // distinct value ids, insertion order
};

struct LevelTable {
    ScaleFactor factor;
    std::unordered_map<BigInt, Node*, BigIntHash> entries;
};

struct LevelStack {
    std::vector<ScaleFactor> levels;           // S[0..top], strictly increasing
    std::vector<std::size_t> tier_watermarks;  // managed by the merge schedule
};

struct MergeReport {
    std::size_t entries_rekeyed = 0;  // occupied positions swept (sum of n_i)
    std::size_t reals_rekeyed = 0;    // bucket entries given a key at the new level
    std::size_t new_leaves = 0;
    std::vector<Node*> leaves;  // the rebuilt leaves, for capacity checks
};

inline std::size_t chain_parent(std::size_t i) { return i & (i - 1); }

// Prefixes of i's binary decomposition, coarse to fine, ending at i itself.
// chain_indices(6) = {4, 6}; chain_indices(0) = {}.
inline std::vector<std::size_t> chain_indices(std::size_t i) {
    std::vector<std::size_t> out;
    std::size_t prefix = 0;
    for (int b = std::bit_width(i) - 1; b >= 0; --b) {
        std::size_t bit = std::size_t{1} << b;
        if (i & bit) {
            prefix |= bit;
            out.push_back(prefix);
        }
    }
    return out;
}

class LevelStructure {
  public:
    explicit LevelStructure(MetricsRecord& metrics) : metrics_(&metrics) {
        stack_.levels.push_back(ScaleFactor{0});  // S[0] = 2^0, the root level
        tables_.push_back(LevelTable{ScaleFactor{0}, {}});
    }

    LevelStructure(const LevelStructure&) = delete;
    LevelStructure& operator=(const LevelStructure&) = delete;

    std::size_t top() const { return stack_.levels.size() - 1; }
    const ScaleFactor& factor(std::size_t i) const { return stack_.levels.at(i); }
    const LevelStack& stack() const { return stack_; }
    LevelStack& stack() { return stack_; }
    const LevelTable& table(std::size_t i) const { return tables_.at(i); }
    MetricsRecord& metrics() { return *metrics_; }

    void push_level(ScaleFactor f) {
        if (!(stack_.levels.back() < f))
            throw std::invalid_argument(
                "push_level: factor 2^" + std::to_string(f.log2) +
                " does not exceed the current top 2^" +
                std::to_string(stack_.levels.back().log2));
        stack_.levels.push_back(f);
        tables_.push_back(LevelTable{f, {}});
        ++metrics_->levels_pushed;
        metrics_->note_top(top());
    }

    std::size_t level_index(ScaleFactor f) const {
        const auto& ls = stack_.levels;
        auto it = std::lower_bound(ls.begin(), ls.end(), f);
        if (it == ls.end() || !(*it == f))
            throw std::out_of_range("level 2^" + std::to_string(f.log2) +
                                    " is not on the stack");
        return static_cast<std::size_t>(it - ls.begin());
    }

    // Occupancy check used by the Match descent; counts toward the probe
    // budget. Returns the resident node or nullptr for vacant.
    Node* table_probe(std::size_t idx, const BigInt& key) {
        check_key_range(idx, key);
        ++metrics_->probes;
        return find_node(idx, key);
    }

    // Maintenance lookup; not a Match probe, so it does not count.
    Node* find_node(std::size_t idx, const BigInt& key) {
        auto& entries = tables_.at(idx).entries;
        auto it = entries.find(key);
        return it == entries.end() ? nullptr : it->second;
    }

    Node* root() { return find_node(0, BigInt(0)); }

    // Caller guarantees the cell is vacant.
    Node* create_node(std::size_t idx, BigInt key) {
        check_key_range(idx, key);
        arena_.emplace_back();
        Node* n = &arena_.back();
        n->level = idx;
        n->key = key;
        auto [it, inserted] = tables_.at(idx).entries.emplace(std::move(key), n);
        if (!inserted)
            throw std::logic_error("create_node: cell already occupied");
        return n;
    }

    // Install any missing ancestor cells for a node about to occupy
    // (idx, key) and return the direct ladder parent. Ancestor keys are
    // right-shifts of the leaf key. Each created cell is a ladder write.
    Node* ensure_ladder(std::size_t idx, const BigInt& key, std::uint32_t rep) {
        if (idx == 0) return nullptr;
        std::size_t pidx = chain_parent(idx);
        BigInt pkey = key >> static_cast<unsigned long>(factor(idx).log2 -
                                                        factor(pidx).log2);
        Node* p = find_node(pidx, pkey);
        if (p == nullptr) {
            Node* grand = ensure_ladder(pidx, pkey, rep);
            if (pidx == 0) {
                p = create_node(0, BigInt(0));
            } else {
                p = create_node(pidx, pkey);
            }
            p->parent = grand;
            p->rep_value = rep;
            ++metrics_->ladder_writes;
        }
        return p;
    }

    // Merge levels l..top into one level at the old top factor. Every value
    // bucketed in that range is re-keyed at the top factor; values whose new
    // keys collide share the rebuilt leaf. Tables above the watermark are
    // discarded; missing ladder cells for the rebuilt leaves are created in
    // the surviving tables.
    MergeReport merge_top_levels(std::size_t l,
                                 const std::vector<ExactReal>& values) {
        if (l == 0)
            throw std::invalid_argument("cannot merge away the root level");
        if (l > top())
            throw std::out_of_range("merge watermark " + std::to_string(l) +
                                    " exceeds top " + std::to_string(top()));
        ScaleFactor merged = stack_.levels.back();
        MergeReport report;

        std::vector<std::pair<BigInt, std::uint32_t>> rekeyed;
        for (std::size_t i = l; i <= top(); ++i) {
            for (auto& [key, node] : tables_[i].entries) {
                ++report.entries_rekeyed;
                if (!node->has_bucket) continue;
                for (std::uint32_t vid : node->bucket)
                    rekeyed.emplace_back(floor_scale(values[vid], merged), vid);
            }
        }
        report.reals_rekeyed = rekeyed.size();
        metrics_->merge_rekeys += rekeyed.size();

        tables_.resize(l);
        stack_.levels.resize(l);
        stack_.levels.push_back(merged);
        tables_.push_back(LevelTable{merged, {}});

        // Group by new key; sort for run-to-run determinism.
        std::sort(rekeyed.begin(), rekeyed.end(),
                  [](const auto& a, const auto& b) {
                      int c = cmp(a.first, b.first);
                      if (c != 0) return c < 0;
                      return a.second < b.second;
                  });
        for (std::size_t i = 0; i < rekeyed.size();) {
            std::size_t j = i;
            Node* parent = ensure_ladder(l, rekeyed[i].first, rekeyed[i].second);
            Node* leaf = create_node(l, rekeyed[i].first);
            leaf->parent = parent;
            leaf->rep_value = rekeyed[i].second;
            leaf->has_bucket = true;
            while (j < rekeyed.size() && rekeyed[j].first == rekeyed[i].first) {
                if (leaf->bucket.empty() || leaf->bucket.back() != rekeyed[j].second)
                    leaf->bucket.push_back(rekeyed[j].second);
                ++j;
            }
            ++report.new_leaves;
            report.leaves.push_back(leaf);
            i = j;
        }
        return report;
    }

  private:
    void check_key_range(std::size_t idx, const BigInt& key) const {
        const ScaleFactor& f = factor(idx);
        bool ok = sgn(key) >= 0 &&
                  (sgn(key) == 0 ||
                   mpz_sizeinbase(key.get_mpz_t(), 2) <= f.log2);
        if (!ok)
            throw std::domain_error("key outside [0, 2^" +
                                    std::to_string(f.log2) + ")");
    }

    LevelStack stack_;
    std::vector<LevelTable> tables_;
    std::deque<Node> arena_;  // stable addresses for parent pointers
    MetricsRecord* metrics_;
};

}  // namespace rksort
