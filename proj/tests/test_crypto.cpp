#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dvfs/crypto.hpp"

using namespace dvfs;

TEST_CASE("prf is deterministic and domain separated") {
    MasterKey k = MasterKey::generate();
    Bytes msg = bytes_of("some message");

    CHECK(prf(k, "idx", msg) == prf(k, "idx", msg));
    CHECK(prf(k, "idx", msg) != prf(k, "dig", msg));

    MasterKey k2 = MasterKey::generate();
    REQUIRE(k.key_bytes != k2.key_bytes);
    CHECK(prf(k, "idx", msg) != prf(k2, "idx", msg));
}

TEST_CASE("prf output is 32 bytes and sensitive to message") {
    MasterKey k = MasterKey::from_hex(std::string(64, 'a'));
    PrfOutput a = prf(k, "tok", std::string_view("x"));
    PrfOutput b = prf(k, "tok", std::string_view("y"));
    CHECK(a.size() == 32);
    CHECK(a != b);
}

TEST_CASE("hash_h1 matches the published SHA-512 empty-input vector") {
    H1Digest d = hash_h1(std::string_view(""));
    CHECK(to_hex(d) ==
          "cf83e1357eefb8bdf1542850d66d8007d620e4050b5715dc83f4a921d36ce9ce"
          "47d0d13c5d85f2b0ff8318d2877eec2f63b931bd47417a81a538327af927da3e");
    CHECK(hash_h1(std::string_view("abc")) == hash_h1(std::string_view("abc")));
}

TEST_CASE("hash_h1 has no collisions over a small corpus") {
    std::set<std::string> seen;
    for (int i = 0; i < 2000; ++i) {
        auto d = hash_h1(std::string_view("key-" + std::to_string(i)));
        CHECK(seen.insert(to_hex(d)).second);
    }
}

TEST_CASE("hash_h2 and hash_h3 are distinct and XOR round-trips") {
    PrfOutput t{};
    Bytes r = random_bytes(32);
    std::copy(r.begin(), r.end(), t.begin());

    CHECK(hash_h2(t) != hash_h3(t));

    PrfOutput zero{};
    CHECK(xor_bytes(hash_h3(t), hash_h3(t)) == zero);

    PrfOutput p{};
    Bytes r2 = random_bytes(32);
    std::copy(r2.begin(), r2.end(), p.begin());
    CHECK(xor_bytes(xor_bytes(hash_h3(t), p), hash_h3(t)) == p);
}

TEST_CASE("document encryption round-trips") {
    MasterKey k = MasterKey::generate();
    Bytes pt = bytes_of("attack at dawn");
    Ciphertext ct = encrypt_doc(k, 7, pt);
    CHECK(ct.doc_id == 7);
    CHECK(ct.body.size() == pt.size() + kNonceLen + kTagLen);
    CHECK(decrypt_doc(k, ct) == pt);
}

TEST_CASE("encryption uses a fresh nonce per call") {
    MasterKey k = MasterKey::generate();
    Bytes pt = bytes_of("same plaintext");
    CHECK(encrypt_doc(k, 1, pt).body != encrypt_doc(k, 1, pt).body);
}

TEST_CASE("tampered or wrong-key ciphertexts fail authenticated decryption") {
    MasterKey k = MasterKey::generate();
    Ciphertext ct = encrypt_doc(k, 3, bytes_of("secret"));

    Ciphertext bad = ct;
    bad.body[bad.body.size() / 2] ^= 0x01;
    CHECK_THROWS_AS(decrypt_doc(k, bad), CryptoError);

    MasterKey other = MasterKey::generate();
    CHECK_THROWS_AS(decrypt_doc(other, ct), CryptoError);
}

TEST_CASE("empty plaintext is rejected") {
    MasterKey k = MasterKey::generate();
    CHECK_THROWS_AS(encrypt_doc(k, 0, Bytes{}), ContractViolation);
}

TEST_CASE("encryption round-trips across random plaintext lengths") {
    MasterKey k = MasterKey::generate();
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::size_t> len(1, 100000);
    for (int i = 0; i < 200; ++i) {
        Bytes pt(len(rng));
        for (auto& b : pt) b = std::uint8_t(rng());
        CHECK(decrypt_doc(k, encrypt_doc(k, std::uint64_t(i), pt)) == pt);
    }
}

TEST_CASE("master key hex round-trips") {
    MasterKey k = MasterKey::generate();
    CHECK(MasterKey::from_hex(k.hex()).key_bytes == k.key_bytes);
    CHECK_THROWS_AS(MasterKey::from_hex("abcd"), FormatError);
}
