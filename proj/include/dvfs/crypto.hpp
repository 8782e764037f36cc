#pragma once

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dvfs/bytes.hpp"

namespace dvfs {

struct CryptoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 32-byte keyed-PRF output. Fixed width keeps XOR chaining well-defined.
using PrfOutput = std::array<std::uint8_t, 32>;
using H1Digest = std::array<std::uint8_t, 64>;

inline Bytes random_bytes(std::size_t n) {
    Bytes out(n);
    if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1)
        throw CryptoError("RAND_bytes failed");
    return out;
}

/// 256-bit master secret.
struct MasterKey {
    std::array<std::uint8_t, 32> key_bytes{};

    static MasterKey generate() {
        MasterKey k;
        Bytes r = random_bytes(32);
        std::copy(r.begin(), r.end(), k.key_bytes.begin());
        return k;
    }

    static MasterKey from_hex(std::string_view hex) {
        MasterKey k;
        k.key_bytes = array_from_hex<32>(hex);
        return k;
    }

    std::string hex() const { return to_hex(key_bytes); }
};

/// F_K: HMAC-SHA256 keyed by the master key, with an ASCII domain tag
/// prepended so distinct protocol usages never share an input space.
inline PrfOutput prf(const MasterKey& key, std::string_view domain_tag,
                     const std::uint8_t* msg, std::size_t msg_len) {
    Bytes input;
    input.reserve(domain_tag.size() + 1 + msg_len);
    append(input, domain_tag);
    input.push_back(kSep);
    append(input, msg, msg_len);

    PrfOutput out{};
    unsigned int out_len = 0;
    if (HMAC(EVP_sha256(), key.key_bytes.data(), int(key.key_bytes.size()),
             input.data(), input.size(), out.data(), &out_len) == nullptr ||
        out_len != out.size())
        throw CryptoError("HMAC-SHA256 failed");
    return out;
}

inline PrfOutput prf(const MasterKey& key, std::string_view domain_tag,
                     const Bytes& msg) {
    return prf(key, domain_tag, msg.data(), msg.size());
}

inline PrfOutput prf(const MasterKey& key, std::string_view domain_tag,
                     std::string_view msg) {
    return prf(key, domain_tag,
               reinterpret_cast<const std::uint8_t*>(msg.data()), msg.size());
}

/// H_1: SHA-512, used as the random oracle producing index keys.
inline H1Digest hash_h1(const std::uint8_t* msg, std::size_t len) {
    H1Digest out{};
    SHA512(msg, len, out.data());
    return out;
}

inline H1Digest hash_h1(const Bytes& msg) { return hash_h1(msg.data(), msg.size()); }

inline H1Digest hash_h1(std::string_view msg) {
    return hash_h1(reinterpret_cast<const std::uint8_t*>(msg.data()), msg.size());
}

namespace detail {
inline PrfOutput tagged_sha256(std::uint8_t tag, const PrfOutput& t) {
    std::array<std::uint8_t, 33> input{};
    input[0] = tag;
    std::copy(t.begin(), t.end(), input.begin() + 1);
    PrfOutput out{};
    SHA256(input.data(), input.size(), out.data());
    return out;
}
}  // namespace detail

/// H_2 / H_3: domain-separated SHA-256 over a 32-byte token. H_2 keys the
/// chained-trapdoor repository; H_3 masks the previous version's token.
inline PrfOutput hash_h2(const PrfOutput& t) { return detail::tagged_sha256(0x02, t); }
inline PrfOutput hash_h3(const PrfOutput& t) { return detail::tagged_sha256(0x03, t); }

/// AES-256-GCM document encryption. body = 12-byte nonce || ciphertext || 16-byte tag.
struct Ciphertext {
    std::uint64_t doc_id = 0;
    Bytes body;
};

inline constexpr std::size_t kNonceLen = 12;
inline constexpr std::size_t kTagLen = 16;

namespace detail {

struct EvpCtx {
    EVP_CIPHER_CTX* ctx;
    EvpCtx() : ctx(EVP_CIPHER_CTX_new()) {
        if (!ctx) throw CryptoError("EVP_CIPHER_CTX_new failed");
    }
    ~EvpCtx() { EVP_CIPHER_CTX_free(ctx); }
    EvpCtx(const EvpCtx&) = delete;
    EvpCtx& operator=(const EvpCtx&) = delete;
};

inline std::array<std::uint8_t, 32> data_key(const MasterKey& key) {
    return prf(key, "enc", std::string_view("data-key"));
}

}  // namespace detail

inline Ciphertext encrypt_doc(const MasterKey& key, std::uint64_t doc_id,
                              const Bytes& plaintext) {
    if (plaintext.empty()) throw ContractViolation("encrypt_doc: empty plaintext");
    auto dk = detail::data_key(key);
    Bytes nonce = random_bytes(kNonceLen);

    detail::EvpCtx c;
    if (EVP_EncryptInit_ex(c.ctx, EVP_aes_256_gcm(), nullptr, dk.data(),
                           nonce.data()) != 1)
        throw CryptoError("EVP_EncryptInit_ex failed");

    Ciphertext out;
    out.doc_id = doc_id;
    out.body.resize(kNonceLen + plaintext.size() + kTagLen);
    std::copy(nonce.begin(), nonce.end(), out.body.begin());

    int len = 0;
    if (EVP_EncryptUpdate(c.ctx, out.body.data() + kNonceLen, &len,
                          plaintext.data(), int(plaintext.size())) != 1)
        throw CryptoError("EVP_EncryptUpdate failed");
    int fin = 0;
    if (EVP_EncryptFinal_ex(c.ctx, out.body.data() + kNonceLen + len, &fin) != 1)
        throw CryptoError("EVP_EncryptFinal_ex failed");
    if (EVP_CIPHER_CTX_ctrl(c.ctx, EVP_CTRL_GCM_GET_TAG, kTagLen,
                            out.body.data() + kNonceLen + plaintext.size()) != 1)
        throw CryptoError("EVP_CTRL_GCM_GET_TAG failed");
    return out;
}

inline Bytes decrypt_doc(const MasterKey& key, const Ciphertext& ct) {
    if (ct.body.size() < kNonceLen + kTagLen + 1)
        throw CryptoError("ciphertext body too short");
    auto dk = detail::data_key(key);
    std::size_t pt_len = ct.body.size() - kNonceLen - kTagLen;

    detail::EvpCtx c;
    if (EVP_DecryptInit_ex(c.ctx, EVP_aes_256_gcm(), nullptr, dk.data(),
                           ct.body.data()) != 1)
        throw CryptoError("EVP_DecryptInit_ex failed");

    Bytes out(pt_len);
    int len = 0;
    if (EVP_DecryptUpdate(c.ctx, out.data(), &len, ct.body.data() + kNonceLen,
                          int(pt_len)) != 1)
        throw CryptoError("EVP_DecryptUpdate failed");
    Bytes tag(ct.body.end() - kTagLen, ct.body.end());
    if (EVP_CIPHER_CTX_ctrl(c.ctx, EVP_CTRL_GCM_SET_TAG, kTagLen, tag.data()) != 1)
        throw CryptoError("EVP_CTRL_GCM_SET_TAG failed");
    int fin = 0;
    if (EVP_DecryptFinal_ex(c.ctx, out.data() + len, &fin) != 1)
        throw CryptoError("authenticated decryption failed");
    return out;
}

}  // namespace dvfs
