#include <catch2/catch_amalgamated.hpp>

#include "dvfs/bench.hpp"
#include "dvfs/fuzzy.hpp"

using namespace dvfs;

namespace {

std::array<std::uint8_t, 32> test_seed(std::uint8_t fill = 0x5c) {
    std::array<std::uint8_t, 32> s{};
    s.fill(fill);
    return s;
}

}  // namespace

TEST_CASE("vectorize sets one slot per capped character occurrence") {
    UnigramVector v = vectorize("aab");
    int total = 0;
    for (auto b : v) total += b;
    CHECK(total == 3);
    CHECK(v[0] == 1);  // (a, 1st occurrence)
    CHECK(v[1] == 1);  // (a, 2nd occurrence)
    CHECK(v[5] == 1);  // (b, 1st occurrence)
    CHECK(v[2] == 0);
}

TEST_CASE("vectorize rejects empty and invalid input") {
    CHECK_THROWS_AS(vectorize(""), RejectedKeyword);
    CHECK_THROWS_AS(vectorize("no way"), RejectedKeyword);
}

TEST_CASE("one-letter substitution toggles exactly two slots") {
    CHECK(hamming(vectorize("secure"), vectorize("secare")) == 2);
}

TEST_CASE("anagrams share a vector") {
    CHECK(vectorize("listen") == vectorize("silent"));
}

TEST_CASE("digit slots are capped at three occurrences") {
    UnigramVector v = vectorize("77777");
    int total = 0;
    for (auto b : v) total += b;
    CHECK(total == 3);
}

TEST_CASE("letter slots are capped at five occurrences") {
    UnigramVector a6 = vectorize("aaaaaa");
    UnigramVector a5 = vectorize("aaaaa");
    CHECK(a6 == a5);
}

TEST_CASE("the LSH family regenerates bit-identically from its seed") {
    LshFamily f1 = LshFamily::from_seed(test_seed(), 8);
    LshFamily f2 = LshFamily::from_seed(test_seed(), 8);
    for (const char* w : {"secure", "encrypt", "verifiable", "ledger"})
        CHECK(f1.bucket(vectorize(w)) == f2.bucket(vectorize(w)));

    LshFamily f3 = LshFamily::from_seed(test_seed(0x11), 8);
    bool any_diff = false;
    for (const char* w : {"secure", "encrypt", "verifiable", "ledger"})
        any_diff = any_diff || !(f1.bucket(vectorize(w)) == f3.bucket(vectorize(w)));
    CHECK(any_diff);
}

TEST_CASE("bucket strings parse back into k integers") {
    LshFamily fam = LshFamily::from_seed(test_seed(), 8);
    BucketString s = fam.bucket(vectorize("keyword"));
    int parts = 1;
    for (char c : s.text) parts += (c == '|');
    CHECK(parts == 8);
}

TEST_CASE("fuzzify stems before hashing") {
    LshFamily fam = LshFamily::from_seed(test_seed(), 8);
    CHECK(fuzzify(fam, "Encrypting") == fuzzify(fam, "encrypts"));
    CHECK(fuzzify(fam, "walked") == fuzzify(fam, "walking"));
}

TEST_CASE("adjacent transposition never changes the bucket") {
    LshFamily fam = LshFamily::from_seed(test_seed(), 8);
    // stem("secrue"): no suffix rule applies, so only the character
    // multiset matters and it matches "secure" exactly.
    CHECK(vectorize("secure") == vectorize("secrue"));
}

TEST_CASE("calibration rates bracket the target collision curve") {
    LshFamily fam = LshFamily::from_seed(test_seed(), 8);
    CalibrationResult res = lsh_calibrate(fam, 2000, 99);
    CHECK(res.near_collision >= 0.51);
    CHECK(res.far_collision <= 0.33);
}

TEST_CASE("family construction validates parameters") {
    CHECK_THROWS_AS(LshFamily::from_seed(test_seed(), 0), ContractViolation);
    CHECK_THROWS_AS(LshFamily::from_seed(test_seed(), 8, -1.0), ContractViolation);
}
