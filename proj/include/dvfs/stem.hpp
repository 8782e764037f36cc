#pragma once

#include <string>
#include <string_view>

#include "dvfs/bytes.hpp"

namespace dvfs {

struct RejectedKeyword : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace porter {

inline bool is_vowel(const std::string& w, std::size_t i) {
    char c = w[i];
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return true;
    // y is a vowel when preceded by a consonant
    if (c == 'y') return i > 0 && !is_vowel(w, i - 1);
    return false;
}

// Porter's measure: number of VC sequences in w[0..len).
inline int measure(const std::string& w, std::size_t len) {
    int m = 0;
    bool in_vowel = false;
    for (std::size_t i = 0; i < len; ++i) {
        bool v = is_vowel(w, i);
        if (in_vowel && !v) ++m;
        in_vowel = v;
    }
    return m;
}

inline bool has_vowel(const std::string& w, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i)
        if (is_vowel(w, i)) return true;
    return false;
}

inline bool double_consonant(const std::string& w, std::size_t len) {
    if (len < 2) return false;
    return w[len - 1] == w[len - 2] && !is_vowel(w, len - 1);
}

// *o: stem ends consonant-vowel-consonant where the final consonant
// is not w, x or y.
inline bool cvc(const std::string& w, std::size_t len) {
    if (len < 3) return false;
    if (is_vowel(w, len - 3) || !is_vowel(w, len - 2) || is_vowel(w, len - 1))
        return false;
    char c = w[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

inline bool ends_with(const std::string& w, std::string_view suffix) {
    return w.size() >= suffix.size() &&
           w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Replace suffix if the condition on the remaining stem holds.
inline bool replace_if(std::string& w, std::string_view suffix,
                       std::string_view repl, int min_measure) {
    if (!ends_with(w, suffix)) return false;
    std::size_t stem_len = w.size() - suffix.size();
    if (measure(w, stem_len) <= min_measure) return true;  // matched, no change
    w.resize(stem_len);
    w.append(repl);
    return true;
}

inline void step1(std::string& w) {
    // 1a: plurals
    if (ends_with(w, "sses"))
        w.resize(w.size() - 2);
    else if (ends_with(w, "ies"))
        w.resize(w.size() - 2);
    else if (!ends_with(w, "ss") && ends_with(w, "s") && w.size() > 1)
        w.resize(w.size() - 1);

    // 1b: -eed/-ed/-ing
    bool cleanup = false;
    if (ends_with(w, "eed")) {
        if (measure(w, w.size() - 3) > 0) w.resize(w.size() - 1);
    } else if (ends_with(w, "ed") && has_vowel(w, w.size() - 2)) {
        w.resize(w.size() - 2);
        cleanup = true;
    } else if (ends_with(w, "ing") && has_vowel(w, w.size() - 3)) {
        w.resize(w.size() - 3);
        cleanup = true;
    }
    if (cleanup) {
        if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
            w.push_back('e');
        } else if (double_consonant(w, w.size()) && !ends_with(w, "l") &&
                   !ends_with(w, "s") && !ends_with(w, "z")) {
            w.resize(w.size() - 1);
        } else if (measure(w, w.size()) == 1 && cvc(w, w.size())) {
            w.push_back('e');
        }
    }

    // 1c: y -> i when the stem has a vowel
    if (ends_with(w, "y") && w.size() > 1 && has_vowel(w, w.size() - 1))
        w.back() = 'i';
}

inline void step2(std::string& w) {
    static constexpr std::pair<std::string_view, std::string_view> rules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
        {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
        {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
        {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
        {"iviti", "ive"},   {"biliti", "ble"}};
    for (auto [suf, rep] : rules)
        if (replace_if(w, suf, rep, 0)) return;
}

inline void step3(std::string& w) {
    static constexpr std::pair<std::string_view, std::string_view> rules[] = {
        {"icate", "ic"}, {"ative", ""},  {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},    {"ness", ""}};
    for (auto [suf, rep] : rules)
        if (replace_if(w, suf, rep, 0)) return;
}

inline void step4(std::string& w) {
    static constexpr std::string_view suffixes[] = {
        "al",   "ance", "ence", "er",  "ic",   "able", "ible", "ant",
        "ement", "ment", "ent", "ou",  "ism",  "ate",  "iti",  "ous",
        "ive",  "ize"};
    for (auto suf : suffixes) {
        if (!ends_with(w, suf)) continue;
        std::size_t stem_len = w.size() - suf.size();
        if (suf == "ent" && ends_with(w, "ement")) continue;  // longest match first
        if (measure(w, stem_len) > 1) w.resize(stem_len);
        return;
    }
    // -ion only after s or t
    if (ends_with(w, "ion") && w.size() >= 4) {
        char c = w[w.size() - 4];
        if ((c == 's' || c == 't') && measure(w, w.size() - 3) > 1)
            w.resize(w.size() - 3);
    }
}

inline void step5(std::string& w) {
    // 5a: drop final e
    if (ends_with(w, "e")) {
        int m = measure(w, w.size() - 1);
        if (m > 1 || (m == 1 && !cvc(w, w.size() - 1))) w.resize(w.size() - 1);
    }
    // 5b: -ll -> -l when m > 1
    if (ends_with(w, "ll") && measure(w, w.size()) > 1) w.resize(w.size() - 1);
}

}  // namespace porter

/// Lowercase the word and reject anything outside [a-z0-9].
inline std::string normalize_keyword(std::string_view word) {
    std::string out;
    out.reserve(word.size());
    for (char c : word) {
        if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))
            out.push_back(c);
        else
            throw RejectedKeyword("keyword contains invalid character");
    }
    if (out.empty()) throw RejectedKeyword("keyword empty after normalization");
    return out;
}

/// Porter stem of a normalized word. Words of length <= 2 and words
/// containing digits pass through unchanged.
inline std::string stem(std::string_view word) {
    std::string w = normalize_keyword(word);
    if (w.size() <= 2) return w;
    for (char c : w)
        if (c >= '0' && c <= '9') return w;
    porter::step1(w);
    porter::step2(w);
    porter::step3(w);
    porter::step4(w);
    porter::step5(w);
    return w;
}

}  // namespace dvfs
