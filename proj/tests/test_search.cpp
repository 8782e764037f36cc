#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "dvfs/search.hpp"

using namespace dvfs;

namespace {

struct World {
    MasterKey key = MasterKey::generate();
    LshFamily fam;
    LocalRepo lr;
    ChainRepo br;
    EncryptedIndex index;

    explicit World(int height) : index(height) {
        std::array<std::uint8_t, 32> seed{};
        seed.fill(0x37);
        fam = LshFamily::from_seed(seed, 8);
    }

    void add(const std::string& raw, std::uint64_t doc) {
        add_keyword(lr, br, index, key, fuzzify(fam, raw), doc);
    }

    void ensure_digest(std::uint64_t doc) {
        PathCode leaf = path_of(doc, index.height());
        if (!index.digest(leaf))
            index.store_digest(
                leaf, EncryptedIndex::leaf_digest(
                          key, leaf, Ciphertext{doc, bytes_of("doc" + std::to_string(doc))}));
    }

    void del(const std::string& raw, std::uint64_t doc) {
        delete_keyword(lr, index, key, fuzzify(fam, raw), doc);
    }

    SearchTranscript query(const std::vector<std::string>& q) {
        Trapdoor tk = trapgen(lr, key, fam, q);
        return search(index, br, tk);
    }
};

}  // namespace

TEST_CASE("trapgen rejects empty queries and flips the queried flag") {
    World w(4);
    CHECK_THROWS_AS(trapgen(w.lr, w.key, w.fam, {}), QueryError);

    Trapdoor tk = trapgen(w.lr, w.key, w.fam, {"alpha", "beta"});
    CHECK(tk.tokens.size() == 2);
    CHECK(w.lr.find(fuzzify(w.fam, "alpha"))->queried);
    CHECK(w.lr.find(fuzzify(w.fam, "beta"))->queried);

    // Search-pattern leakage is by design: the same query repeats its tokens.
    Trapdoor again = trapgen(w.lr, w.key, w.fam, {"alpha", "beta"});
    CHECK(tk.tokens == again.tokens);
}

TEST_CASE("searching an empty index stops at the root") {
    World w(4);
    SearchTranscript t = w.query({"anything"});
    REQUIRE(t.main.ap.size() == 1);
    CHECK(t.main.ap[0] == ApEntry{"", 0});
    CHECK(t.results.empty());
}

TEST_CASE("the eight-leaf two-keyword scenario reproduces the canonical proof") {
    World w(4);
    // Only f_1 carries both keywords; w1 also lives in f_6, w2 in f_3.
    w.add("apple", 1);
    w.add("banana", 1);
    w.add("apple", 6);
    w.add("banana", 3);
    for (std::uint64_t d : {1, 3, 6}) w.ensure_digest(d);

    SearchTranscript t = w.query({"apple", "banana"});

    std::vector<ApEntry> expect = {{"", 1},   {"0", 1},  {"00", 1}, {"000", 0},
                                   {"001", 1}, {"01", 0}, {"1", 0}};
    CHECK(t.main.ap == expect);
    CHECK(t.results == std::set<std::uint64_t>{1});
    REQUIRE(t.main.digests.size() == 1);
    CHECK(t.main.digests[0].first == "001");
}

TEST_CASE("a query for an unindexed keyword returns empty but is well formed") {
    World w(4);
    w.add("apple", 1);
    w.ensure_digest(1);
    SearchTranscript t = w.query({"nonexistent"});
    CHECK(t.results.empty());
    CHECK(t.main.ap.size() == 1);
}

TEST_CASE("conjunction requires every keyword at the same leaf") {
    World w(5);
    w.add("red", 2);
    w.add("blue", 2);
    w.add("red", 9);
    for (std::uint64_t d : {2, 9}) w.ensure_digest(d);

    CHECK(w.query({"red"}).results == std::set<std::uint64_t>{2, 9});
    CHECK(w.query({"red", "blue"}).results == std::set<std::uint64_t>{2});
    CHECK(w.query({"blue", "red"}).results == std::set<std::uint64_t>{2});
}

TEST_CASE("deleted keywords drop documents via the shadow pass") {
    World w(5);
    w.add("kiwi", 4);
    w.add("kiwi", 11);
    for (std::uint64_t d : {4, 11}) w.ensure_digest(d);

    CHECK(w.query({"kiwi"}).results == std::set<std::uint64_t>{4, 11});
    w.del("kiwi", 4);
    SearchTranscript t = w.query({"kiwi"});
    CHECK(t.deleted == std::set<std::uint64_t>{4});
    CHECK(t.results == std::set<std::uint64_t>{11});
}

TEST_CASE("deleting a keyword a document never had changes nothing") {
    World w(5);
    w.add("kiwi", 4);
    w.ensure_digest(4);
    w.del("mango", 4);
    CHECK(w.query({"kiwi"}).results == std::set<std::uint64_t>{4});
}

TEST_CASE("a deleted keyword re-added after a bump reappears") {
    World w(5);
    w.add("pear", 6);
    w.ensure_digest(6);
    w.del("pear", 6);
    CHECK(w.query({"pear"}).results.empty());
    w.add("pear", 6);  // deletion forces a version bump on this add
    CHECK(w.query({"pear"}).results == std::set<std::uint64_t>{6});
}

TEST_CASE("post-bump search still finds pre-bump documents") {
    World w(5);
    w.add("fig", 3);
    w.ensure_digest(3);
    w.query({"fig"});  // sets b, next add bumps
    w.add("fig", 12);
    w.ensure_digest(12);
    SearchTranscript t = w.query({"fig"});
    CHECK(t.results == std::set<std::uint64_t>{3, 12});
}

TEST_CASE("pruning is subtree-local") {
    World w(5);
    // One keyword across two versions living in different subtrees: pruning
    // the old version's token under one child must not suppress it under
    // the other.
    w.add("grape", 1);   // version 0, leaf 0001
    w.ensure_digest(1);
    w.query({"grape"});
    w.add("grape", 14);  // version 1, leaf 1110
    w.ensure_digest(14);
    SearchTranscript t = w.query({"grape"});
    CHECK(t.results == std::set<std::uint64_t>{1, 14});

    // Exhaustive cross-check: a token absent at a node is absent below it.
    PrfOutput t0 = versioned_token(w.key, fuzzify(w.fam, "grape"), 0);
    PrfOutput t1 = versioned_token(w.key, fuzzify(w.fam, "grape"), 1);
    for (const PrfOutput& tok : {t0, t1}) {
        for (int len = 0; len < 4; ++len) {
            for (int node = 0; node < (1 << len); ++node) {
                PathCode p;
                for (int b = len - 1; b >= 0; --b)
                    p.push_back((node >> b) & 1 ? '1' : '0');
                if (!w.index.contains(TreeTag::Main, p, tok)) {
                    CHECK_FALSE(w.index.contains(TreeTag::Main, p + '0', tok));
                    CHECK_FALSE(w.index.contains(TreeTag::Main, p + '1', tok));
                }
            }
        }
    }
}

TEST_CASE("a matched leaf without a digest aborts the search") {
    World w(4);
    w.add("apple", 2);  // no digest stored on purpose
    CHECK_THROWS_AS(w.query({"apple"}), CorruptionError);
}

TEST_CASE("transcripts serialize and parse losslessly") {
    World w(4);
    w.add("apple", 1);
    w.add("banana", 1);
    w.add("apple", 6);
    for (std::uint64_t d : {1, 6}) w.ensure_digest(d);
    w.del("banana", 6);
    SearchTranscript t = w.query({"apple", "banana"});

    SearchTranscript back = parse_transcript(serialize(t));
    CHECK(back.height == t.height);
    CHECK(back.keyword_count == t.keyword_count);
    CHECK(back.main.ap == t.main.ap);
    CHECK(back.main.results == t.main.results);
    CHECK(back.main.digests == t.main.digests);
    CHECK(back.main.max_versions == t.main.max_versions);
    CHECK(back.shadow.ap == t.shadow.ap);
    CHECK(back.shadow.results == t.shadow.results);
    CHECK(back.deleted == t.deleted);
    CHECK(back.results == t.results);
    CHECK(back.probe_count == t.probe_count);
}

TEST_CASE("malformed transcripts are rejected") {
    CHECK_THROWS_AS(parse_transcript(""), FormatError);
    CHECK_THROWS_AS(parse_transcript("BOGUS 1 L=4 q=1\n"), FormatError);
    CHECK_THROWS_AS(parse_transcript("DVFS-TRANSCRIPT 1 L=4 q=1\nXX huh\n"),
                    FormatError);
}
