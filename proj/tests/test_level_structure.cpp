#include <catch2/catch_amalgamated.hpp>

#include "rksort/level_structure.hpp"

using rksort::BigInt;
using rksort::ExactReal;
using rksort::LevelStructure;
using rksort::MetricsRecord;
using rksort::Node;
using rksort::ScaleFactor;

TEST_CASE("fresh structure has only the root level") {
    MetricsRecord m;
    LevelStructure ls(m);
    CHECK(ls.top() == 0);
    CHECK(ls.factor(0).log2 == 0);
    CHECK(ls.root() == nullptr);
}

TEST_CASE("push_level grows the stack and rejects non-increasing factors") {
    MetricsRecord m;
    LevelStructure ls(m);
    ls.push_level(ScaleFactor{5});
    CHECK(ls.top() == 1);
    CHECK(m.levels_pushed == 1);

    // five pushes on top of the root make six levels total
    ls.push_level(ScaleFactor{10});
    ls.push_level(ScaleFactor{50});
    ls.push_level(ScaleFactor{100});
    ls.push_level(ScaleFactor{300});
    CHECK(ls.top() == 5);
    CHECK(m.max_top == 5);

    CHECK_THROWS_AS(ls.push_level(ScaleFactor{3}), std::invalid_argument);
    CHECK_THROWS_AS(ls.push_level(ScaleFactor{300}), std::invalid_argument);
}

TEST_CASE("level_index finds present factors and rejects absent ones") {
    MetricsRecord m;
    LevelStructure ls(m);
    ls.push_level(ScaleFactor{5});   // 32
    ls.push_level(ScaleFactor{10});  // 1024
    CHECK(ls.level_index(ScaleFactor{5}) == 1);
    CHECK(ls.level_index(ScaleFactor{0}) == 0);
    CHECK_THROWS_AS(ls.level_index(ScaleFactor{6}), std::out_of_range);
}

TEST_CASE("table_probe counts probes and checks key range") {
    MetricsRecord m;
    LevelStructure ls(m);
    ls.push_level(ScaleFactor{3});  // keys in [0, 8)

    CHECK(ls.table_probe(1, BigInt(5)) == nullptr);
    CHECK(m.probes == 1);

    Node* n = ls.create_node(1, BigInt(5));
    CHECK(ls.table_probe(1, BigInt(5)) == n);
    CHECK(m.probes == 2);

    CHECK_THROWS_AS(ls.table_probe(1, BigInt(8)), std::domain_error);
    CHECK_THROWS_AS(ls.table_probe(1, BigInt(-1)), std::domain_error);
    // root level has factor 1, so only key 0 is addressable
    CHECK(ls.table_probe(0, BigInt(0)) == nullptr);
    CHECK_THROWS_AS(ls.table_probe(0, BigInt(1)), std::domain_error);
}

TEST_CASE("create_node refuses to overwrite an occupied cell") {
    MetricsRecord m;
    LevelStructure ls(m);
    ls.push_level(ScaleFactor{3});
    ls.create_node(1, BigInt(5));
    CHECK_THROWS_AS(ls.create_node(1, BigInt(5)), std::logic_error);
}

TEST_CASE("chain helpers follow the binary decomposition") {
    CHECK(rksort::chain_parent(6) == 4);
    CHECK(rksort::chain_parent(5) == 4);
    CHECK(rksort::chain_parent(4) == 0);
    CHECK(rksort::chain_parent(12) == 8);
    CHECK(rksort::chain_indices(13) == std::vector<std::size_t>{8, 12, 13});
    CHECK(rksort::chain_indices(1) == std::vector<std::size_t>{1});
    CHECK(rksort::chain_indices(0).empty());
}

TEST_CASE("ensure_ladder installs shifted ancestor cells once") {
    MetricsRecord m;
    LevelStructure ls(m);
    for (std::uint64_t i = 1; i <= 6; ++i) ls.push_level(ScaleFactor{i});

    // leaf at index 6 (binary 110): chain is {4, 6}
    BigInt key(0b101101);  // some 6-bit key at factor 2^6
    Node* parent = ls.ensure_ladder(6, key, 7);
    REQUIRE(parent != nullptr);
    CHECK(parent->level == 4);
    CHECK(parent->key == BigInt(0b1011));  // key >> (6 - 4)
    CHECK(parent->rep_value == 7);
    REQUIRE(parent->parent != nullptr);
    CHECK(parent->parent->level == 0);
    CHECK(m.ladder_writes == 2);  // root and the index-4 cell

    // second leaf sharing the same prefix creates nothing new
    Node* parent2 = ls.ensure_ladder(6, BigInt(0b101110), 8);
    CHECK(parent2 == parent);
    CHECK(m.ladder_writes == 2);
}

TEST_CASE("merge re-keys residents at the top factor") {
    // S = {1, 4, 16} with 1/3 resident at both upper levels; merging at
    // watermark 1 leaves S = {1, 16} and keys 1/3 as floor(16/3) = 5.
    MetricsRecord m;
    LevelStructure ls(m);
    ls.push_level(ScaleFactor{2});
    ls.push_level(ScaleFactor{4});
    std::vector<ExactReal> values{ExactReal(1, 3)};

    Node* a = ls.create_node(1, BigInt(1));  // floor(4/3)
    a->parent = ls.ensure_ladder(1, BigInt(1), 0);
    a->has_bucket = true;
    a->bucket = {0};
    Node* b = ls.create_node(2, BigInt(5));  // floor(16/3)
    b->parent = ls.ensure_ladder(2, BigInt(5), 0);
    b->has_bucket = true;
    b->bucket = {0};

    auto report = ls.merge_top_levels(1, values);
    CHECK(ls.top() == 1);
    CHECK(ls.factor(1).log2 == 4);
    CHECK(report.entries_rekeyed == 2);
    CHECK(report.reals_rekeyed == 2);
    CHECK(report.new_leaves == 1);
    Node* merged = ls.find_node(1, BigInt(5));
    REQUIRE(merged != nullptr);
    CHECK(merged->has_bucket);
    CHECK(merged->bucket == std::vector<std::uint32_t>{0});
    CHECK(merged->parent == ls.root());
    CHECK(m.merge_rekeys == 2);
}

TEST_CASE("merge with watermark at top rebuilds idempotently") {
    MetricsRecord m;
    LevelStructure ls(m);
    ls.push_level(ScaleFactor{2});
    std::vector<ExactReal> values{ExactReal(1, 4)};
    Node* leaf = ls.create_node(1, BigInt(1));
    leaf->parent = ls.ensure_ladder(1, BigInt(1), 0);
    leaf->has_bucket = true;
    leaf->bucket = {0};

    auto report = ls.merge_top_levels(1, values);
    CHECK(ls.top() == 1);
    CHECK(ls.factor(1).log2 == 2);
    CHECK(report.new_leaves == 1);
    Node* rebuilt = ls.find_node(1, BigInt(1));
    REQUIRE(rebuilt != nullptr);
    CHECK(rebuilt->bucket == std::vector<std::uint32_t>{0});
}

TEST_CASE("merge rejects the root watermark and out-of-range watermarks") {
    MetricsRecord m;
    LevelStructure ls(m);
    ls.push_level(ScaleFactor{2});
    std::vector<ExactReal> values;
    CHECK_THROWS_AS(ls.merge_top_levels(0, values), std::invalid_argument);
    CHECK_THROWS_AS(ls.merge_top_levels(2, values), std::out_of_range);
}

TEST_CASE("merge repairs missing ladder cells in surviving tables") {
    // Leaf at index 5 (chain {4, 5}) merged down to watermark 3 (chain
    // {2, 3}): the index-2 cell was never written and must appear.
    MetricsRecord m;
    LevelStructure ls(m);
    for (std::uint64_t i = 1; i <= 5; ++i) ls.push_level(ScaleFactor{i});
    std::vector<ExactReal> values{ExactReal(1, 3)};

    BigInt key(10);  // floor(32/3)
    Node* leaf = ls.create_node(5, key);
    leaf->parent = ls.ensure_ladder(5, key, 0);
    leaf->has_bucket = true;
    leaf->bucket = {0};
    CHECK(ls.find_node(2, BigInt(1)) == nullptr);

    auto report = ls.merge_top_levels(3, values);
    CHECK(ls.top() == 3);
    CHECK(ls.factor(3).log2 == 5);
    Node* moved = ls.find_node(3, BigInt(10));
    REQUIRE(moved != nullptr);
    CHECK(moved->bucket == std::vector<std::uint32_t>{0});
    Node* repaired = ls.find_node(2, BigInt(1));  // 10 >> (5 - 2)
    REQUIRE(repaired != nullptr);
    CHECK(moved->parent == repaired);
    CHECK(report.new_leaves == 1);
}

TEST_CASE("merge groups values that collide at the merged factor") {
    // Two leaves on one prefix chain whose values share a key at the top
    // factor collapse into a single bucket.
    MetricsRecord m;
    LevelStructure ls(m);
    ls.push_level(ScaleFactor{2});
    ls.push_level(ScaleFactor{3});
    // 17/32 and 9/16 both key to 4 at factor 8 but to 2 at factor 4.
    std::vector<ExactReal> values{ExactReal(17, 32), ExactReal(9, 16)};

    Node* shallow = ls.create_node(1, BigInt(2));
    shallow->parent = ls.ensure_ladder(1, BigInt(2), 0);
    shallow->has_bucket = true;
    shallow->bucket = {0};
    Node* deep = ls.create_node(2, BigInt(4));
    deep->parent = ls.ensure_ladder(2, BigInt(4), 1);
    deep->has_bucket = true;
    deep->bucket = {1};

    auto report = ls.merge_top_levels(1, values);
    CHECK(report.new_leaves == 1);
    Node* joined = ls.find_node(1, BigInt(4));
    REQUIRE(joined != nullptr);
    CHECK(joined->bucket == std::vector<std::uint32_t>{0, 1});
}
