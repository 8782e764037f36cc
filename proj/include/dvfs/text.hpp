#pragma once

#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dvfs/stem.hpp"

namespace dvfs {

inline const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = {
        "a",     "about", "above", "after",  "again", "all",   "also",  "am",
        "an",    "and",   "any",   "are",    "as",    "at",    "be",    "because",
        "been",  "before", "being", "below", "between", "both", "but",  "by",
        "can",   "could", "did",   "do",     "does",  "doing", "down",  "during",
        "each",  "few",   "for",   "from",   "further", "had", "has",   "have",
        "having", "he",   "her",   "here",   "hers",  "him",  "his",   "how",
        "i",     "if",    "in",    "into",   "is",    "it",    "its",   "itself",
        "just",  "may",   "me",    "might",  "more",  "most",  "must",  "my",
        "no",    "nor",   "not",   "now",    "of",    "off",   "on",    "once",
        "only",  "or",    "other", "our",    "out",   "over",  "own",   "same",
        "shall", "she",   "should", "so",    "some",  "such",  "than",  "that",
        "the",   "their", "them",  "then",   "there", "these", "they",  "this",
        "those", "through", "to",  "too",    "under", "until", "up",    "upon",
        "very",  "was",   "we",    "were",   "what",  "when",  "where", "which",
        "while", "who",   "whom",  "why",    "will",  "with",  "would", "you",
        "your",  "yours"};
    return words;
}

/// Split on anything outside [a-zA-Z0-9], lowercase.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            cur.push_back(c);
        } else if (c >= 'A' && c <= 'Z') {
            cur.push_back(char(c - 'A' + 'a'));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

/// tokenize -> stopword filter -> Porter stem -> dedup (order preserved).
inline std::vector<std::string> extract_keywords(std::string_view text) {
    std::vector<std::string> keywords;
    std::set<std::string> seen;
    for (auto& tok : tokenize(text)) {
        if (tok.size() < 3 || tok.size() > 32) continue;
        if (stopwords().count(tok)) continue;
        std::string s = stem(tok);
        if (seen.insert(s).second) keywords.push_back(std::move(s));
    }
    return keywords;
}

}  // namespace dvfs
