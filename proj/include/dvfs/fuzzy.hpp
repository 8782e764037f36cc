#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dvfs/bytes.hpp"
#include "dvfs/stem.hpp"

namespace dvfs {

inline constexpr std::size_t kUnigramDims = 160;
inline constexpr int kLetterSlots = 5;  // 26 letters x 5 occurrence slots
inline constexpr int kDigitSlots = 3;   // 10 digits x 3 occurrence slots

/// Binary occurrence-count encoding of a keyword: slot (ch, j) is set
/// iff ch occurs at least j+1 times.
using UnigramVector = std::array<std::uint8_t, kUnigramDims>;

inline UnigramVector vectorize(std::string_view word) {
    std::string w = normalize_keyword(word);
    UnigramVector v{};
    int counts[36] = {};
    for (char c : w) {
        int idx = (c >= 'a') ? c - 'a' : 26 + (c - '0');
        ++counts[idx];
    }
    for (int i = 0; i < 26; ++i)
        for (int j = 0; j < std::min(counts[i], kLetterSlots); ++j)
            v[i * kLetterSlots + j] = 1;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < std::min(counts[26 + i], kDigitSlots); ++j)
            v[26 * kLetterSlots + i * kDigitSlots + j] = 1;
    return v;
}

inline int hamming(const UnigramVector& a, const UnigramVector& b) {
    int d = 0;
    for (std::size_t i = 0; i < kUnigramDims; ++i) d += a[i] != b[i];
    return d;
}

/// Concatenated LSH outputs: k signed integers joined by '|'.
struct BucketString {
    std::string text;
    bool operator==(const BucketString&) const = default;
    auto operator<=>(const BucketString&) const = default;
};

/// p-stable (Gaussian) LSH family: h(v) = floor((a.v + b) / c).
/// All parameters are reproducible bit-for-bit from the 32-byte seed;
/// the Gaussian draws use an explicit Box-Muller transform so the
/// family does not depend on library distribution internals.
class LshFamily {
  public:
    static constexpr double kDefaultWindow = 2.5;

    LshFamily() = default;

    static LshFamily from_seed(const std::array<std::uint8_t, 32>& seed, int k,
                               double window = kDefaultWindow) {
        if (k < 1) throw ContractViolation("LshFamily: k must be >= 1");
        if (window <= 0) throw ContractViolation("LshFamily: window must be > 0");
        LshFamily fam;
        fam.k_ = k;
        fam.c_ = window;
        std::uint64_t s = 0;
        for (int i = 0; i < 8; ++i) s = (s << 8) | seed[i];
        std::mt19937_64 rng(s);
        auto uniform01 = [&rng]() {
            return (rng() >> 11) * 0x1.0p-53;  // 53-bit uniform in [0,1)
        };
        fam.coeffs_.resize(std::size_t(k));
        fam.offsets_.resize(std::size_t(k));
        for (int t = 0; t < k; ++t) {
            auto& a = fam.coeffs_[std::size_t(t)];
            a.resize(kUnigramDims);
            for (std::size_t i = 0; i < kUnigramDims; i += 2) {
                double u1 = uniform01(), u2 = uniform01();
                while (u1 <= 0) u1 = uniform01();
                double r = std::sqrt(-2.0 * std::log(u1));
                a[i] = r * std::cos(2.0 * M_PI * u2);
                if (i + 1 < kUnigramDims) a[i + 1] = r * std::sin(2.0 * M_PI * u2);
            }
            fam.offsets_[std::size_t(t)] = uniform01() * window;
        }
        return fam;
    }

    int k() const { return k_; }
    double window() const { return c_; }

    long long bucket_of(int t, const UnigramVector& v) const {
        const auto& a = coeffs_[std::size_t(t)];
        double dot = 0.0;
        for (std::size_t i = 0; i < kUnigramDims; ++i)
            if (v[i]) dot += a[i];
        return static_cast<long long>(std::floor((dot + offsets_[std::size_t(t)]) / c_));
    }

    BucketString bucket(const UnigramVector& v) const {
        if (k_ == 0) throw ContractViolation("LshFamily not initialized");
        std::string out;
        for (int t = 0; t < k_; ++t) {
            if (t) out.push_back('|');
            out += std::to_string(bucket_of(t, v));
        }
        return BucketString{std::move(out)};
    }

  private:
    int k_ = 0;
    double c_ = 0.0;
    std::vector<std::vector<double>> coeffs_;
    std::vector<double> offsets_;
};

inline BucketString lsh_bucket(const LshFamily& fam, const UnigramVector& v) {
    return fam.bucket(v);
}

/// stem -> unigram vector -> bucket string.
inline BucketString fuzzify(const LshFamily& fam, std::string_view raw_word) {
    return fam.bucket(vectorize(stem(raw_word)));
}

}  // namespace dvfs
