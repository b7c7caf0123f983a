#pragma once

// Conversion of exact reals in (0,1) to order-preserving integer keys.
//
// Values are held in leaf buckets of a tree spread over the level stack.
// Each insertion runs a power-of-two descent (Match) over the stack to find
// the deepest occupied cell whose key agrees with the new value, then either
// joins that bucket, splits it (Branch) when it reaches capacity, or starts
// a fresh leaf one level deeper. A tiered schedule merges the topmost levels
// back into one after every e^j insertions so the stack stays shallow.
// After the final merge every remaining bucket is comparison-sorted and all
// values are keyed at one common level chosen fine enough to separate every
// adjacent pair.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rksort/level_structure.hpp"
#include "rksort/metrics.hpp"
#include "rksort/rational.hpp"
#include "rksort/scale.hpp"

namespace rksort {

enum class LevelRule { normalized, non_normalized };

// Raised when a required level would exceed the configured key bit budget.
struct CapacityError : std::runtime_error {
    CapacityError(const ExactReal& a, const ExactReal& b,
                  std::uint64_t needed_log2, std::uint64_t cap)
        : std::runtime_error("separating " + a.to_string() + " and " +
                             b.to_string() + " (gap " + (a < b ? b - a : a - b).to_string() +
                             ") needs level 2^" + std::to_string(needed_log2) +
                             "; bit cap is " + std::to_string(cap)) {}
};

struct ConverterConfig {
    std::uint64_t n = 0;
    int t = 2;                      // integerized sqrt(log2 n), floored at 2
    std::uint64_t e = 4;            // 2^t, the merge batch base
    int leaf_capacity = 2;          // 2t - 2 distinct values trigger a branch
    std::uint64_t bit_cap = 1048576;
    LevelRule level_rule = LevelRule::normalized;
    bool audit = false;             // per-operation invariant checks
};

inline std::uint64_t ceil_log2_u64(std::uint64_t n) {
    if (n <= 1) return 0;
    return static_cast<std::uint64_t>(std::bit_width(n - 1));
}

inline ConverterConfig make_config(std::uint64_t n,
                                   std::uint64_t bit_cap = 1048576,
                                   bool audit = false) {
    if (n == 0) throw std::invalid_argument("empty input");
    std::uint64_t logn = ceil_log2_u64(n);
    int t = 2;
    while (static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(t) < logn)
        ++t;
    ConverterConfig cfg;
    cfg.n = n;
    cfg.t = t;
    cfg.e = std::uint64_t{1} << t;
    cfg.leaf_capacity = 2 * t - 2;
    cfg.bit_cap = bit_cap;
    cfg.audit = audit;
    return cfg;
}

// Order-preserving affine squeeze into (0,1). The padding delta keeps the
// extremes strictly inside the interval and bounds how much the gaps shrink.
struct Preprocessed {
    std::vector<ExactReal> scaled;
    ExactReal lo{0, 1};
    ExactReal delta{1, 1};
    ExactReal span{2, 1};  // (hi - lo) + 2 * delta
};

inline Preprocessed preprocess(const std::vector<ExactReal>& input) {
    if (input.empty()) throw std::invalid_argument("empty input");
    ExactReal lo = input.front(), hi = input.front();
    for (const ExactReal& x : input) {
        if (x < lo) lo = x;
        if (hi < x) hi = x;
    }
    ExactReal range = hi - lo;
    ExactReal delta = range / ExactReal(static_cast<long>(input.size()), 1);
    if (delta < ExactReal(1, 1)) delta = ExactReal(1, 1);
    Preprocessed out;
    out.lo = lo;
    out.delta = delta;
    out.span = range + delta + delta;
    out.scaled.reserve(input.size());
    for (const ExactReal& x : input)
        out.scaled.push_back((x - lo + delta) / out.span);
    return out;
}

struct MatchResult {
    Node* node = nullptr;      // deepest occupied matching cell (null only
                               // before anything is inserted)
    std::size_t levelindex = 0;
    std::uint64_t probes = 0;  // probes spent by this call
    BigInt top_key;            // floor(r * S[top])
};

// Power-of-two descent over the stack. One exact floor at the top factor;
// keys at coarser levels are right-shifts of it.
inline MatchResult find_match(LevelStructure& ls, const ExactReal& r) {
    MatchResult res;
    std::size_t top = ls.top();
    std::uint64_t top_log2 = ls.factor(top).log2;
    res.top_key = floor_scale(r, ls.factor(top));
    std::uint64_t before = ls.metrics().probes;
    std::size_t levelindex = 0;
    if (top >= 1) {
        for (int i = std::bit_width(top) - 1; i >= 0; --i) {
            ++ls.metrics().match_steps;
            std::size_t cand = levelindex + (std::size_t{1} << i);
            if (cand > top) continue;
            BigInt key = res.top_key >>
                         static_cast<unsigned long>(top_log2 - ls.factor(cand).log2);
            if (ls.table_probe(cand, key) != nullptr) levelindex = cand;
        }
    }
    res.levelindex = levelindex;
    BigInt key_here = res.top_key >>
                      static_cast<unsigned long>(top_log2 - ls.factor(levelindex).log2);
    res.node = ls.find_node(levelindex, key_here);
    res.probes = ls.metrics().probes - before;
    return res;
}

inline std::uint64_t probe_budget(std::size_t top) {
    return top == 0 ? 0 : static_cast<std::uint64_t>(std::bit_width(top));
}

struct FinalKey {
    std::uint32_t value_id;
    BigInt key;
};

class Converter {
  public:
    explicit Converter(ConverterConfig cfg) : cfg_(cfg), ls_(metrics_) {
        if (cfg_.level_rule == LevelRule::non_normalized)
            throw std::invalid_argument(
                "the non-normalized level rule grows levels of bit-length "
                "1/gap and is not supported");
        if (cfg_.t < 2 || cfg_.e < 2 || cfg_.leaf_capacity < 2)
            throw std::invalid_argument("bad converter configuration");
        tiers_ = static_cast<std::size_t>(
            (ceil_log2_u64(cfg_.n) + cfg_.t - 1) / cfg_.t);
        if (tiers_ == 0) tiers_ = 1;
        boundaries_.assign(tiers_ + 1, 0);
        metrics_.n = cfg_.n;
    }

    const ConverterConfig& config() const { return cfg_; }
    LevelStructure& structure() { return ls_; }
    MetricsRecord& metrics() { return metrics_; }
    const std::vector<ExactReal>& values() const { return values_; }
    const std::vector<std::vector<std::uint64_t>>& value_indices() const {
        return indices_;
    }

    void insert_real(const ExactReal& r, std::uint64_t input_index) {
        MatchResult m = find_match(ls_, r);
        if (cfg_.audit && m.probes > probe_budget(ls_.top()))
            throw std::logic_error("probe budget exceeded: " +
                                   std::to_string(m.probes) + " probes at top " +
                                   std::to_string(ls_.top()));
        if (m.node == nullptr) {
            // nothing inserted yet: the root cell becomes the first bucket
            std::uint32_t vid = register_value(r, input_index);
            Node* root = ls_.create_node(0, BigInt(0));
            root->rep_value = vid;
            root->has_bucket = true;
            root->bucket = {vid};
            if (cfg_.audit) audit_node(root);
            return;
        }
        if (m.node->has_bucket) {
            for (std::uint32_t vid : m.node->bucket) {
                if (values_[vid] == r) {  // duplicate: another index, no growth
                    indices_[vid].push_back(input_index);
                    return;
                }
            }
            std::uint32_t vid = register_value(r, input_index);
            m.node->bucket.push_back(vid);
            if (static_cast<int>(m.node->bucket.size()) >= cfg_.leaf_capacity) {
                branch_leaf(m.node);
                drain_branch_queue();
            }
            if (cfg_.audit) audit_node(m.node);
            return;
        }
        // Internal landing: r differs from every resident value, so it gets
        // a fresh leaf one level past the match.
        place_fresh(r, input_index, m);
    }

    // Split a full leaf around its median. Members that separate from the
    // median at some ladder level of the target index peel off into their
    // own leaves there; the rest ride the median's spine downward while at
    // least t reals remain, per the required mass of internal nodes.
    void branch_leaf(Node* leaf) {
        if (!leaf->has_bucket ||
            static_cast<int>(leaf->bucket.size()) < cfg_.leaf_capacity)
            throw std::logic_error("branch requires a bucket at capacity");
        ++metrics_.branch_count;
        bool canonical_shape =
            static_cast<int>(leaf->bucket.size()) == cfg_.leaf_capacity;

        std::vector<std::uint32_t> b = leaf->bucket;
        std::sort(b.begin(), b.end(), [&](std::uint32_t x, std::uint32_t y) {
            return values_[x] < values_[y];
        });
        std::size_t mi = (b.size() - 1) / 2;  // lower median, rank t-1 when full
        std::uint32_t m1 = b[mi], m2 = b[mi + 1];

        std::size_t l = leaf->level;
        std::size_t msep = match_boundary(m1, m2, l);
        if (msep == ls_.top()) push_separating_level(values_[m1], values_[m2]);
        std::size_t t_idx = msep + 1;

        leaf->bucket.clear();
        leaf->has_bucket = false;

        std::vector<std::uint32_t> p = b;  // still matching the median
        Node* home = nullptr;              // spine cell where p currently sits
        for (std::size_t c : chain_indices(t_idx)) {
            if (c <= l) continue;  // prefix of the old leaf's ladder; no peeling
            ScaleFactor fc = ls_.factor(c);
            BigInt m1key = floor_scale(values_[m1], fc);
            Node* spine = ls_.find_node(c, m1key);
            if (spine == nullptr) {
                Node* par = ls_.ensure_ladder(c, m1key, m1);
                spine = ls_.create_node(c, m1key);
                spine->parent = par;
                spine->rep_value = m1;
            }
            home = spine;

            std::vector<std::uint32_t> still;
            std::vector<std::pair<BigInt, std::uint32_t>> peeled;
            for (std::uint32_t vid : p) {
                BigInt k = floor_scale(values_[vid], fc);
                if (k == m1key)
                    still.push_back(vid);
                else
                    peeled.emplace_back(std::move(k), vid);
            }
            // members are value-sorted, so equal keys sit in runs
            for (std::size_t i = 0; i < peeled.size();) {
                std::size_t j = i;
                std::vector<std::uint32_t> group;
                while (j < peeled.size() && peeled[j].first == peeled[i].first)
                    group.push_back(peeled[j++].second);
                settle_group(c, peeled[i].first, std::move(group), canonical_shape);
                i = j;
            }
            p = std::move(still);
            if (c == t_idx) break;
            if (mass_of(p) < static_cast<std::uint64_t>(cfg_.t))
                break;  // stop deepening; a thinner spine would starve it
        }
        settle_group_at(home, p, canonical_shape);
        if (cfg_.audit && canonical_shape && home != nullptr &&
            static_cast<int>(home->bucket.size()) >= cfg_.t)
            throw std::logic_error("branch left a leaf with >= t values");
    }

    // Fire every merge tier whose batch boundary divides the running count.
    void run_merge_schedule(std::uint64_t inserted_count) {
        for (std::size_t j = 1; j <= tiers_; ++j) {
            if (!divisible_by_e_pow(inserted_count, j)) break;
            merge_events_.emplace_back(inserted_count, j);
            merge_above(boundaries_[j] + 1);
            for (std::size_t i = 1; i <= j; ++i) boundaries_[i] = ls_.top();
        }
    }

    // (insertion count, tier) pairs in firing order, for schedule checks.
    const std::vector<std::pair<std::uint64_t, std::size_t>>& merge_events() const {
        return merge_events_;
    }

    // The full merge after the last insertion: everything above the root
    // collapses into the top level.
    void final_merge() {
        merge_above(1);
        for (std::size_t i = 1; i <= tiers_; ++i) boundaries_[i] = ls_.top();
    }

    // Comparison-sort each remaining bucket, pick the final level fine
    // enough to separate every adjacent in-bucket pair, and key every
    // distinct value there.
    std::vector<FinalKey> finalize_keys() {
        ScaleFactor lstar = ls_.factor(ls_.top());
        ExactReal worst_a(0, 1), worst_b(1, 1);
        bool have_pair = false;
        for (std::size_t i = 0; i <= ls_.top(); ++i) {
            for (const auto& [key, node] : ls_.table(i).entries) {
                if (!node->has_bucket || node->bucket.size() < 2) continue;
                std::sort(node->bucket.begin(), node->bucket.end(),
                          [&](std::uint32_t x, std::uint32_t y) {
                              return values_[x] < values_[y];
                          });
                for (std::size_t k = 0; k + 1 < node->bucket.size(); ++k) {
                    const ExactReal& a = values_[node->bucket[k]];
                    const ExactReal& bval = values_[node->bucket[k + 1]];
                    ScaleFactor s = separating_level(a, bval);
                    if (lstar < s) {
                        lstar = s;
                        worst_a = a;
                        worst_b = bval;
                        have_pair = true;
                    }
                }
            }
        }
        if (lstar.log2 > cfg_.bit_cap) {
            if (have_pair)
                throw CapacityError(worst_a, worst_b, lstar.log2, cfg_.bit_cap);
            throw std::runtime_error("final level exceeds the bit cap");
        }
        metrics_.max_key_bits = lstar.log2 + 1;
        std::vector<FinalKey> out;
        out.reserve(values_.size());
        for (std::uint32_t vid = 0; vid < values_.size(); ++vid)
            out.push_back({vid, floor_scale(values_[vid], lstar)});
        return out;
    }

    // Full-structure invariant sweep; audit tooling, not part of the hot path.
    void audit_sweep() const {
        for (std::size_t i = 1; i <= ls_.top(); ++i) {
            if (!(ls_.factor(i - 1) < ls_.factor(i)))
                throw std::logic_error("stack factors not strictly increasing");
        }
        std::uint64_t bound = 1 + cfg_.e * tiers_;
        if (ls_.top() + 1 > bound + 1)
            throw std::logic_error("stack height " + std::to_string(ls_.top() + 1) +
                                   " exceeds bound " + std::to_string(bound + 1));
        auto& self = const_cast<Converter&>(*this);
        for (std::size_t i = 0; i <= ls_.top(); ++i) {
            for (const auto& [key, node] : ls_.table(i).entries) {
                self.audit_node(node);
            }
        }
    }

  private:
    std::uint32_t register_value(const ExactReal& r, std::uint64_t input_index) {
        values_.push_back(r);
        indices_.push_back({input_index});
        return static_cast<std::uint32_t>(values_.size() - 1);
    }

    std::uint64_t mass_of(const std::vector<std::uint32_t>& vids) const {
        std::uint64_t total = 0;
        for (std::uint32_t vid : vids) total += indices_[vid].size();
        return total;
    }

    // Largest stack index (>= from) at which the two values' keys agree.
    // Matching is downward closed, so binary search applies.
    std::size_t match_boundary(std::uint32_t m1, std::uint32_t m2,
                               std::size_t from) {
        std::uint64_t top_log2 = ls_.factor(ls_.top()).log2;
        BigInt k1 = floor_scale(values_[m1], ls_.factor(ls_.top()));
        BigInt k2 = floor_scale(values_[m2], ls_.factor(ls_.top()));
        auto match_at = [&](std::size_t idx) {
            unsigned long sh =
                static_cast<unsigned long>(top_log2 - ls_.factor(idx).log2);
            return (k1 >> sh) == (k2 >> sh);
        };
        std::size_t lo = from, hi = ls_.top();
        if (match_at(hi)) return hi;
        while (lo + 1 < hi) {  // match_at(lo) true, match_at(hi) false
            std::size_t mid = lo + (hi - lo) / 2;
            if (match_at(mid))
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }

    void push_separating_level(const ExactReal& a, const ExactReal& b) {
        ScaleFactor sep = separating_level(a, b);
        if (sep.log2 > cfg_.bit_cap) throw CapacityError(a, b, sep.log2, cfg_.bit_cap);
        ls_.push_level(sep);
    }

    void place_fresh(const ExactReal& r, std::uint64_t input_index,
                     const MatchResult& m) {
        if (m.levelindex == ls_.top()) {
            if (m.node->rep_value == kNoValue)
                throw std::logic_error("top-level cell without a representative");
            push_separating_level(values_[m.node->rep_value], r);
        }
        std::uint32_t vid = register_value(r, input_index);
        std::size_t target = m.levelindex + 1;
        BigInt key = floor_scale(r, ls_.factor(target));
        Node* existing = ls_.find_node(target, key);
        if (existing != nullptr) {
            // Should be unreachable: the descent is maximal. Tolerate by
            // joining rather than corrupting the cell.
            existing->has_bucket = true;
            existing->bucket.push_back(vid);
            if (static_cast<int>(existing->bucket.size()) >= cfg_.leaf_capacity)
                branch_queue_.push_back(existing);
            drain_branch_queue();
            return;
        }
        Node* parent = ls_.ensure_ladder(target, key, vid);
        Node* fresh = ls_.create_node(target, std::move(key));
        fresh->parent = parent;
        fresh->rep_value = vid;
        fresh->has_bucket = true;
        fresh->bucket = {vid};
        if (cfg_.audit) audit_node(fresh);
    }

    // Give a peeled group its own leaf at (c, key), coalescing with whatever
    // already sits there.
    void settle_group(std::size_t c, const BigInt& key,
                      std::vector<std::uint32_t> group, bool canonical_shape) {
        if (cfg_.audit && canonical_shape &&
            static_cast<int>(group.size()) >= cfg_.t)
            throw std::logic_error("branch peeled a group with >= t values");
        Node* cell = ls_.find_node(c, key);
        if (cell == nullptr) {
            Node* par = ls_.ensure_ladder(c, key, group.front());
            cell = ls_.create_node(c, key);
            cell->parent = par;
            cell->rep_value = group.front();
            cell->has_bucket = true;
            cell->bucket = std::move(group);
            return;
        }
        settle_group_at(cell, group, canonical_shape);
    }

    void settle_group_at(Node* cell, const std::vector<std::uint32_t>& group,
                         bool /*canonical_shape*/) {
        if (cell == nullptr || group.empty()) return;
        cell->has_bucket = true;
        for (std::uint32_t vid : group) {
            if (std::find(cell->bucket.begin(), cell->bucket.end(), vid) ==
                cell->bucket.end())
                cell->bucket.push_back(vid);
        }
        if (static_cast<int>(cell->bucket.size()) >= cfg_.leaf_capacity)
            branch_queue_.push_back(cell);
    }

    void drain_branch_queue() {
        while (!branch_queue_.empty()) {
            Node* cell = branch_queue_.front();
            branch_queue_.pop_front();
            if (cell->has_bucket &&
                static_cast<int>(cell->bucket.size()) >= cfg_.leaf_capacity)
                branch_leaf(cell);
        }
    }

    void merge_above(std::size_t l) {
        if (l >= ls_.top()) return;  // fewer than two levels above: nothing to do
        std::vector<std::uint32_t> before;
        if (cfg_.audit) before = bucketed_values();
        MergeReport report = ls_.merge_top_levels(l, values_);
        for (Node* leaf : report.leaves) {
            if (static_cast<int>(leaf->bucket.size()) >= cfg_.leaf_capacity)
                branch_queue_.push_back(leaf);
        }
        drain_branch_queue();
        if (cfg_.audit) {
            std::vector<std::uint32_t> after = bucketed_values();
            if (before != after)
                throw std::logic_error("merge changed the reachable value set");
            audit_sweep();
        }
    }

    std::vector<std::uint32_t> bucketed_values() const {
        std::vector<std::uint32_t> out;
        for (std::size_t i = 0; i <= ls_.top(); ++i)
            for (const auto& [key, node] : ls_.table(i).entries)
                if (node->has_bucket)
                    out.insert(out.end(), node->bucket.begin(), node->bucket.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    bool divisible_by_e_pow(std::uint64_t c, std::size_t j) const {
        for (std::size_t i = 0; i < j; ++i) {
            if (c % cfg_.e != 0) return false;
            c /= cfg_.e;
        }
        return true;
    }

    // Checks a single node's ladder and bucket discipline.
    void audit_node(Node* node) {
        if (node->has_bucket) {
            if (static_cast<int>(node->bucket.size()) >= cfg_.leaf_capacity)
                throw std::logic_error("bucket at or over capacity outside branch");
            for (std::uint32_t vid : node->bucket) {
                BigInt k = floor_scale(values_[vid], ls_.factor(node->level));
                if (!(k == node->key))
                    throw std::logic_error("bucketed value keys outside its cell");
            }
        }
        std::size_t idx = node->level;
        BigInt key = node->key;
        Node* walk = node;
        while (idx != 0) {
            std::size_t pidx = chain_parent(idx);
            BigInt pkey = key >> static_cast<unsigned long>(
                              ls_.factor(idx).log2 - ls_.factor(pidx).log2);
            Node* pnode = ls_.find_node(pidx, pkey);
            if (pnode == nullptr)
                throw std::logic_error("missing ladder cell at index " +
                                       std::to_string(pidx));
            if (walk->parent != pnode)
                throw std::logic_error("parent pointer disagrees with ladder");
            idx = pidx;
            key = std::move(pkey);
            walk = pnode;
        }
    }

    ConverterConfig cfg_;
    MetricsRecord metrics_;
    LevelStructure ls_;
    std::vector<ExactReal> values_;                   // distinct, insertion order
    std::vector<std::vector<std::uint64_t>> indices_; // parallel: input positions
    std::vector<std::size_t> boundaries_;             // per-tier watermarks
    std::size_t tiers_ = 1;
    std::deque<Node*> branch_queue_;
    std::vector<std::pair<std::uint64_t, std::size_t>> merge_events_;
};

struct ConvertResult {
    std::vector<ExactReal> values;  // distinct scaled values, first-seen order
    std::vector<BigInt> keys;        // parallel to values
    std::vector<std::vector<std::uint64_t>> indices;  // parallel; ascending
    std::vector<std::uint32_t> value_of_input;        // input position -> value id
    MetricsRecord metrics;
};

inline ConvertResult convert(const std::vector<ExactReal>& input,
                             ConverterConfig cfg) {
    using clock = std::chrono::steady_clock;
    Preprocessed pre = preprocess(input);
    Converter conv(cfg);

    std::uint64_t insert_ns = 0, merge_ns = 0;
    for (std::uint64_t i = 0; i < pre.scaled.size(); ++i) {
        auto t0 = clock::now();
        conv.insert_real(pre.scaled[i], i);
        auto t1 = clock::now();
        conv.run_merge_schedule(i + 1);
        auto t2 = clock::now();
        insert_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
        merge_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();
    }
    auto t3 = clock::now();
    conv.final_merge();
    auto t4 = clock::now();
    merge_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(t4 - t3).count();

    std::vector<FinalKey> finals = conv.finalize_keys();
    auto t5 = clock::now();

    ConvertResult out;
    out.metrics = conv.metrics();
    out.metrics.insert_ns = insert_ns;
    out.metrics.merge_ns = merge_ns;
    out.metrics.finalize_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(t5 - t4).count();
    out.values = conv.values();
    out.indices = conv.value_indices();
    out.keys.resize(out.values.size());
    for (const FinalKey& fk : finals) out.keys[fk.value_id] = fk.key;
    out.value_of_input.resize(input.size());
    for (std::uint32_t vid = 0; vid < out.indices.size(); ++vid)
        for (std::uint64_t pos : out.indices[vid]) out.value_of_input[pos] = vid;
    return out;
}

}  // namespace rksort
