#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dvfs/stem.hpp"

namespace dvfs {

/// Seeded synthetic corpus: a fixed pseudo-word dictionary with Zipf-ish
/// frequencies, 45-92 distinct keywords per document. Deterministic for a
/// given seed so oracle tests can be replayed.
class CorpusGen {
  public:
    explicit CorpusGen(std::uint64_t seed, std::size_t dict_size = 600) : rng_(seed) {
        std::set<std::string> seen;
        while (dict_.size() < dict_size) {
            std::string w = make_word();
            // Distinct stems keep the oracle's keyword space unambiguous.
            if (seen.insert(stem(w)).second) dict_.push_back(std::move(w));
        }
        std::vector<double> weights(dict_.size());
        for (std::size_t i = 0; i < weights.size(); ++i)
            weights[i] = 1.0 / std::pow(double(i + 1), 0.7);
        zipf_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
    }

    const std::vector<std::string>& dictionary() const { return dict_; }

    std::string pick_word() { return dict_[zipf_(rng_)]; }

    /// Space-joined distinct dictionary words.
    std::string document(std::size_t min_kw = 45, std::size_t max_kw = 92) {
        std::uniform_int_distribution<std::size_t> count(min_kw, max_kw);
        std::size_t want = count(rng_);
        std::set<std::string> chosen;
        while (chosen.size() < want) chosen.insert(pick_word());
        std::string text;
        for (const auto& w : chosen) {
            if (!text.empty()) text.push_back(' ');
            text += w;
        }
        return text;
    }

    std::mt19937_64& rng() { return rng_; }

  private:
    // Consonant-vowel alternation gives plausible 7-11 letter words.
    std::string make_word() {
        static const char vowels[] = "aeiou";
        static const char consonants[] = "bcdfghjklmnpqrstvwz";
        std::uniform_int_distribution<int> len(7, 11);
        std::uniform_int_distribution<int> vi(0, 4);
        std::uniform_int_distribution<int> ci(0, 18);
        int n = len(rng_);
        std::string w;
        for (int i = 0; i < n; ++i)
            w.push_back(i % 2 == 0 ? consonants[ci(rng_)] : vowels[vi(rng_)]);
        return w;
    }

    std::mt19937_64 rng_;
    std::vector<std::string> dict_;
    std::discrete_distribution<std::size_t> zipf_;
};

}  // namespace dvfs
